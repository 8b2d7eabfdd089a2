#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "rnk/search.h"

using namespace rnk;

TEST_CASE("MinQueue pops keys in nondecreasing order") {
    std::mt19937_64 rng(7);
    MinQueue q;
    std::vector<Distance> keys;
    for (int i = 0; i < 1000; ++i) {
        const Distance k = rng() % 500;
        keys.push_back(k);
        q.push(k, i);
    }
    std::sort(keys.begin(), keys.end());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        CHECK(q.top().key == keys[i]);
        CHECK(q.pop_min().key == keys[i]);
    }
    CHECK(q.empty());
}

TEST_CASE("MinQueue allows duplicate ids") {
    MinQueue q;
    q.push(5, 1);
    q.push(3, 1);
    q.push(4, 2);
    CHECK(q.pop_min().id == 1);
    CHECK(q.pop_min().id == 2);
    CHECK(q.pop_min().id == 1);
}

TEST_CASE("SettledSet mark/query/reset") {
    SettledSet s(200);
    for (std::uint32_t id : {0u, 63u, 64u, 199u}) {
        CHECK_FALSE(s.query(id));
        s.mark(id);
        CHECK(s.query(id));
    }
    s.reset();
    for (std::uint32_t id = 0; id < 200; ++id) CHECK_FALSE(s.query(id));
}

TEST_CASE("SettledSet reset works past the dirty-list overflow") {
    SettledSet s(256);  // dirty limit 256/64 + 1 = 5
    for (std::uint32_t id = 0; id < 100; ++id) s.mark(id);
    s.reset();
    for (std::uint32_t id = 0; id < 256; ++id) CHECK_FALSE(s.query(id));
    s.mark(7);
    CHECK(s.query(7));
    CHECK_FALSE(s.query(8));
}

TEST_CASE("SettledSet double mark keeps dirty list consistent") {
    SettledSet s(128);
    s.mark(3);
    s.mark(3);
    s.mark(90);
    s.reset();
    CHECK_FALSE(s.query(3));
    CHECK_FALSE(s.query(90));
}
