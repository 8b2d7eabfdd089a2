#ifndef RNK_BINARY_IO_H_
#define RNK_BINARY_IO_H_

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rnk::io {

// Little-endian scalar/array helpers for the on-disk cache formats.

template <typename T>
void write_scalar(std::ostream& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_scalar(std::istream& in) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char buf[sizeof(T)];
    in.read(reinterpret_cast<char*>(buf), sizeof(T));
    if (!in) throw std::runtime_error("binary cache truncated");
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
}

template <typename T>
void write_vector(std::ostream& out, const std::vector<T>& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    write_scalar<std::uint64_t>(out, v.size());
    if (!v.empty())
        out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
void read_vector(std::istream& in, std::vector<T>& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto n = read_scalar<std::uint64_t>(in);
    v.resize(n);
    if (n > 0) {
        in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
        if (!in) throw std::runtime_error("binary cache truncated");
    }
}

inline void write_magic(std::ostream& out, const char (&magic)[8], std::uint32_t version) {
    out.write(magic, 8);
    write_scalar<std::uint32_t>(out, version);
}

inline void check_magic(std::istream& in, const char (&magic)[8], std::uint32_t version) {
    char buf[8];
    in.read(buf, 8);
    if (!in || std::memcmp(buf, magic, 8) != 0) throw std::runtime_error("bad cache magic");
    const auto v = read_scalar<std::uint32_t>(in);
    if (v != version) throw std::runtime_error("unsupported cache version " + std::to_string(v));
}

}  // namespace rnk::io

#endif  // RNK_BINARY_IO_H_
