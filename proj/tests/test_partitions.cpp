#include <algorithm>
#include <set>

#include "doctest.h"
#include "mqc/partitions.hpp"

using namespace mqc;

namespace {

SubRepartition P(const std::string& s, int n) { return parse_partition(s, n); }

// Independent characterization: R <= P iff supp R is inside supp P and every
// block of P meets the support of R inside a single block of R.
bool coarser_oracle(const SubRepartition& r, const SubRepartition& p) {
    const Mask rs = r.support();
    if (rs & ~p.support()) return false;
    for (Mask pb : p.masks()) {
        const Mask inter = pb & rs;
        if (!inter) continue;
        if (std::none_of(r.masks().begin(), r.masks().end(), [inter](Mask rb) { return (rb & inter) == inter; })) return false;
    }
    return true;
}

long bell(int n) {
    std::vector<std::vector<long>> t(n + 1, std::vector<long>(n + 1, 0));
    t[0][0] = 1;
    for (int i = 1; i <= n; ++i) {
        t[i][0] = t[i - 1][i - 1];
        for (int j = 1; j <= i; ++j) t[i][j] = t[i][j - 1] + t[i - 1][j - 1];
    }
    return t[n][0];
}

}  // namespace

TEST_CASE("parsing and canonical form") {
    auto p = P(" 3 | 1 , 2 ", 3);
    CHECK(p.to_string() == "1,2|3");
    CHECK(p.size() == 2);
    CHECK(p.depth() == 2);
    CHECK(P("2|1", 2) == P("1|2", 2));
    CHECK_THROWS_AS(P("1,2|2", 3), ParseError);
    CHECK_THROWS_AS(P("1||2", 3), ParseError);
    CHECK_THROWS_AS(P("1,|2", 3), ParseError);
    CHECK_THROWS_AS(P("4", 3), ParseError);
    CHECK_THROWS_AS(P("a|1", 3), ParseError);
    CHECK_THROWS_AS(P("", 3), ParseError);
    CHECK_THROWS_AS(SubRepartition(3, {}), InvalidArgument);
}

TEST_CASE("enumeration counts follow Bell numbers") {
    // Every non-empty subset S contributes Bell(|S|) partitions, giving
    // Bell(n + 1) - 1 in total.
    CHECK(enumerate_subrepartitions(1).size() == 1);
    CHECK(enumerate_subrepartitions(2).size() == 4);
    CHECK(enumerate_subrepartitions(3).size() == 14);
    for (int n = 1; n <= 6; ++n) CHECK(static_cast<long>(enumerate_subrepartitions(n).size()) == bell(n + 1) - 1);
    auto all = enumerate_subrepartitions(4);
    CHECK(std::set<SubRepartition>(all.begin(), all.end()).size() == all.size());
}

TEST_CASE("basic coarsening relations") {
    CHECK(coarser_basic(P("1|2", 3), P("1|2|3", 3), Coarsening::a));
    CHECK_FALSE(coarser_basic(P("1,2|3", 3), P("1|2|3", 3), Coarsening::a));
    CHECK(coarser_basic(P("1,2|3", 3), P("1|2|3", 3), Coarsening::b));
    CHECK(coarser_basic(P("1,2", 3), P("1|2|3", 3), Coarsening::b));
    CHECK_FALSE(coarser_basic(P("1,2|3", 3), P("1,3|2", 3), Coarsening::b));
    CHECK(coarser_basic(P("1|3", 3), P("1,2|3", 3), Coarsening::c));
    CHECK_FALSE(coarser_basic(P("1|2", 3), P("1,2|3", 3), Coarsening::c));
    CHECK_FALSE(coarser_basic(P("1|2", 3), P("1|2|3", 3), Coarsening::c));
}

TEST_CASE("closure matches the independent characterization") {
    for (int n = 1; n <= 4; ++n) {
        auto all = enumerate_subrepartitions(n);
        for (const auto& p : all)
            for (const auto& q : all) CHECK(coarser(q, p) == coarser_oracle(q, p));
    }
    CHECK(coarser(P("1|2", 3), P("1|2|3", 3)));
    CHECK(coarser(P("1,2|3", 3), P("1|2|3", 3)));
    CHECK(coarser(P("1|2", 3), P("1,3|2", 3)));
    CHECK_FALSE(coarser(P("1|2", 3), P("1,2|3", 3)));
}

TEST_CASE("coarsening is a partial order") {
    for (int n = 1; n <= 4; ++n) {
        auto all = enumerate_subrepartitions(n);
        for (const auto& a : all) {
            CHECK(coarser(a, a));
            for (const auto& b : all) {
                if (a != b && coarser(a, b)) CHECK_FALSE(coarser(b, a));
                if (!coarser(a, b)) continue;
                for (const auto& c : all)
                    if (coarser(b, c)) CHECK(coarser(a, c));
            }
        }
    }
}

TEST_CASE("closure at larger n agrees with the characterization on samples") {
    auto all = enumerate_subrepartitions(6);
    for (std::size_t i = 0; i < all.size(); i += 37)
        for (std::size_t j = 0; j < all.size(); j += 11) CHECK(coarser(all[j], all[i]) == coarser_oracle(all[j], all[i]));
    CHECK_THROWS_AS(coarser(P("1|2", 8), P("1|2|3", 8)), UnsupportedError);
}

TEST_CASE("bounded coarsenings") {
    auto c = bounded_coarsenings(P("1|2|3", 3), 2);
    CHECK(c.size() == 4);
    std::set<std::string> names;
    for (const auto& x : c) names.insert(x.to_string());
    CHECK(names == std::set<std::string>{"1|2|3", "1,2|3", "1,3|2", "1|2,3"});
    CHECK(bounded_coarsenings(P("1|2|3", 3), 1).size() == 1);
    CHECK(bounded_coarsenings(P("1|2|3", 3), 3).size() == 5);
    CHECK(block_groupings(P("1|2|3|4", 4), 2).size() == 7);
}

TEST_CASE("complementary family of the worked example") {
    auto xi = complementarity(P("1|2|3,4|5", 5), P("1|2", 5));
    const std::vector<std::string> expected = {
        "3,4|5", "1|3,4|5", "2|3,4|5", "1|3,4", "2|3,4", "2|3|5", "2|4|5", "1|3|5", "1|4|5", "1|5", "2|5", "1|3",
        "1|4", "2|3", "2|4", "3|5", "4|5", "1|3,4,5", "2|3,4,5", "1,2|3,4,5", "1,2|3,4|5", "1,2|3,4", "1,2|5"};
    std::set<SubRepartition> want;
    for (const auto& s : expected) want.insert(P(s, 5));
    CHECK(xi.size() == 23);
    CHECK(std::set<SubRepartition>(xi.begin(), xi.end()) == want);
}

TEST_CASE("complementary family properties") {
    auto small = complementarity(P("1|2|3", 3), P("1|2", 3));
    std::set<SubRepartition> got(small.begin(), small.end());
    CHECK(got == std::set<SubRepartition>{P("1|3", 3), P("2|3", 3), P("1,2|3", 3)});
    // Every member has at least two blocks, is comparable with no Q, and is
    // below P.
    for (int n = 2; n <= 4; ++n) {
        auto all = enumerate_subrepartitions(n);
        for (const auto& p : all) {
            if (p.size() < 2) continue;
            for (const auto& q : all) {
                if (q.size() < 2 || !coarser(q, p)) continue;
                for (const auto& r : complementarity(p, q)) {
                    CHECK(r.size() >= 2);
                    CHECK(coarser(r, p));
                }
            }
        }
    }
    CHECK_THROWS_AS(complementarity(P("1,2|3", 3), P("1|2", 3)), InvalidArgument);
}

TEST_CASE("k-entanglement hierarchy") {
    TaggedPartition q{2, P("1|2", 3)}, p{3, P("1|2|3", 3)};
    CHECK(ke_basic(q, p, Coarsening::a));
    CHECK(ke_hierarchy(q, p));
    CHECK_THROWS_AS(ke_basic({3, P("1|2", 3)}, p, Coarsening::a), InvalidArgument);
    for (int n = 2; n <= 4; ++n) {
        auto all = enumerate_subrepartitions(n);
        std::vector<TaggedPartition> nodes;
        for (const auto& r : all)
            for (int k = 2; k <= static_cast<int>(r.size()); ++k) nodes.push_back({k, r});
        for (const auto& a : nodes) {
            CHECK(ke_hierarchy(a, a));
            for (const auto& b : nodes) {
                if (!ke_hierarchy(a, b)) continue;
                CHECK(coarser(a.p, b.p));
                if (a != b) CHECK_FALSE(ke_hierarchy(b, a));
            }
        }
        // Dropping blocks at the top level always stays inside the hierarchy.
        for (const auto& pp : all)
            for (const auto& qq : all)
                if (pp.size() >= 2 && qq.size() >= 2 && coarser_basic(qq, pp, Coarsening::a))
                    CHECK(ke_hierarchy({static_cast<int>(qq.size()), qq}, {static_cast<int>(pp.size()), pp}));
    }
}

TEST_CASE("k-producibility hierarchy") {
    CHECK(kpe_basic({3, P("1|2|3", 3)}, {2, P("1|2|3", 3)}, Coarsening::a));
    CHECK(kpe_basic({2, P("1,2|3,4", 4)}, {2, P("1|2|3|4", 4)}, Coarsening::b));
    CHECK_FALSE(kpe_basic({2, P("1|2|3", 3)}, {3, P("1|2|3", 3)}, Coarsening::a));
    for (int n = 2; n <= 4; ++n) {
        auto all = enumerate_subrepartitions(n);
        for (const auto& p : all)
            for (const auto& q : all) {
                if (p.size() < 2 || q.size() < 2) continue;
                // At level two the hierarchy reduces to the coarsening order.
                CHECK(kpe_hierarchy({2, q}, {2, p}) == coarser(q, p));
            }
    }
}

TEST_CASE("steering hierarchy") {
    auto lo = make_split(2, P("1", 4), P("3", 4));
    auto hi = make_split(2, P("1|2", 4), P("3|4", 4));
    CHECK(steering_basic(lo, hi, Coarsening::a, Coarsening::a));
    CHECK(steering_hierarchy(lo, hi));
    // Grouping untrusted parties points the other way.
    auto grouped = make_split(2, P("1,2", 4), P("3|4", 4));
    CHECK(steering_basic(hi, grouped, Coarsening::b, Coarsening::a));
    CHECK_FALSE(steering_basic(grouped, hi, Coarsening::b, Coarsening::a));
    CHECK_THROWS_AS(make_split(2, P("3", 4), P("4", 4)), InvalidArgument);
    auto s = parse_split("1,2;3|4", 2, 4);
    CHECK(s.to_string() == "1,2;3|4");
    CHECK_THROWS_AS(parse_split("1|2", 2, 4), ParseError);
}
