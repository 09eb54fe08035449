#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <deque>
#include <map>
#include <set>

#include "hfl/group.hpp"
#include "hfl/rng.hpp"

using namespace hfl;

namespace {

GroupContext f2() { return GroupContext::free_group(2); }

// tokens: a = 0, a^-1 = 1, b = 2, b^-1 = 3
Element w(const GroupContext& ctx, std::initializer_list<int> tokens) {
    return ctx.from_tokens(std::vector<int>(tokens));
}

std::vector<std::vector<int>> cyclic_table(int n) {
    std::vector<std::vector<int>> table(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n)));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = (a + b) % n;
    return table;
}

GroupContext z4() { return GroupContext::finite_group(cyclic_table(4), {1, 3}); }

// independent BFS oracle over the multiplication table
std::vector<int> bfs_oracle(const std::vector<std::vector<int>>& table, const std::vector<int>& gens, int e) {
    std::vector<int> dist(table.size(), -1);
    std::deque<int> queue{e};
    dist[static_cast<std::size_t>(e)] = 0;
    while (!queue.empty()) {
        int g = queue.front();
        queue.pop_front();
        for (int s : gens)
            if (int h = table[static_cast<std::size_t>(g)][static_cast<std::size_t>(s)];
                dist[static_cast<std::size_t>(h)] < 0) {
                dist[static_cast<std::size_t>(h)] = dist[static_cast<std::size_t>(g)] + 1;
                queue.push_back(h);
            }
    }
    return dist;
}

}  // namespace

TEST_CASE("free multiplication cancels across the seam") {
    auto ctx = f2();
    CHECK(ctx.multiply(w(ctx, {0, 1}), w(ctx, {2})) == w(ctx, {2}));
    CHECK(ctx.multiply(w(ctx, {0, 2}), w(ctx, {3, 0})) == w(ctx, {0, 0}));
    CHECK(ctx.multiply(w(ctx, {0}), w(ctx, {1})) == ctx.identity());
}

TEST_CASE("finite multiplication follows the table") {
    auto ctx = z4();
    Element three = ctx.parse("3");
    Element two = ctx.parse("2");
    CHECK(ctx.multiply(three, two) == ctx.parse("1"));
}

TEST_CASE("inverse reverses and inverts letters") {
    auto ctx = f2();
    CHECK(ctx.inverse(w(ctx, {0, 2})) == w(ctx, {3, 1}));
    CHECK(ctx.inverse(ctx.identity()) == ctx.identity());
    auto z = z4();
    CHECK(z.inverse(z.parse("1")) == z.parse("3"));
}

TEST_CASE("word length") {
    auto ctx = f2();
    CHECK(ctx.word_length(w(ctx, {0, 2, 0})) == 3);
    CHECK(ctx.word_length(ctx.identity()) == 0);

    auto z = z4();
    auto oracle = bfs_oracle(cyclic_table(4), {1, 3}, 0);
    for (int g = 0; g < 4; ++g) CHECK(z.word_length(z.parse(std::to_string(g))) == oracle[static_cast<std::size_t>(g)]);
    CHECK(z.word_length(z.parse("3")) == 1);
}

TEST_CASE("conjugacy length is the cyclically reduced length") {
    auto ctx = f2();
    CHECK(ctx.conjugacy_length(w(ctx, {0, 2, 1})) == 1);  // a b a^-1 ~ b
    CHECK(ctx.conjugacy_length(w(ctx, {0, 2})) == 2);

    // brute-force conjugation oracle
    auto conjugators = ctx.ball(3);
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<int> tokens;
        for (std::uint64_t i = 0, n = rng.next_below(7); i < n; ++i)
            tokens.push_back(static_cast<int>(rng.next_below(4)));
        Element word = ctx.from_tokens(tokens);
        int best = ctx.word_length(word);
        for (const auto& u : conjugators)
            best = std::min(best, ctx.word_length(ctx.multiply(ctx.multiply(u, word), ctx.inverse(u))));
        CHECK(ctx.conjugacy_length(word) == best);
        CHECK(ctx.conjugacy_length(word) <= ctx.word_length(word));
    }
}

TEST_CASE("finite conjugacy length minimizes over the class") {
    // dihedral group of order 8: generated by rotation r (order 4) and flip s
    // elements 0..3 = r^k, 4..7 = r^k s
    std::vector<std::vector<int>> table(8, std::vector<int>(8));
    auto idx = [](int k, int flip) { return (k % 4 + 4) % 4 + 4 * flip; };
    for (int k1 = 0; k1 < 4; ++k1)
        for (int f1 = 0; f1 < 2; ++f1)
            for (int k2 = 0; k2 < 4; ++k2)
                for (int f2 = 0; f2 < 2; ++f2) {
                    // (r^k1 s^f1)(r^k2 s^f2) = r^(k1 + (f1 ? -k2 : k2)) s^(f1+f2)
                    int k = f1 ? k1 - k2 : k1 + k2;
                    table[static_cast<std::size_t>(idx(k1, f1))][static_cast<std::size_t>(idx(k2, f2))] =
                        idx(k, (f1 + f2) % 2);
                }
    GroupContext d4 = GroupContext::finite_group(table, {1, 3, 4});
    // r^2 is central: conjugacy class {r^2}, word length 2
    CHECK(d4.conjugacy_length(d4.parse("2")) == 2);
    // r and r^3 are conjugate (s r s = r^-1): class length 1
    CHECK(d4.conjugacy_length(d4.parse("3")) == 1);
    for (int g = 0; g < 8; ++g) {
        Element el = d4.parse(std::to_string(g));
        CHECK(d4.conjugacy_length(el) <= d4.word_length(el));
    }
}

TEST_CASE("ball sizes") {
    auto ctx = f2();
    CHECK(ctx.ball(0).size() == 1);
    CHECK(ctx.ball(1).size() == 5);
    CHECK(ctx.ball(2).size() == 17);  // 1 + 4 + 12
    CHECK(ctx.ball(3).size() == 53);
    CHECK(z4().ball(2).size() == 4);

    for (const auto& g : ctx.ball(2)) CHECK(ctx.word_length(g) <= 2);
    CHECK_THROWS_AS((void)ctx.ball(8, 100), std::runtime_error);
    CHECK_THROWS_AS((void)ctx.ball(-1), std::invalid_argument);
}

TEST_CASE("walk convolution matches the two-step enumeration") {
    auto ctx = f2();
    CHECK(ctx.walk_convolution(0).mass.at(ctx.identity()) == 1.0);

    // oracle: enumerate all 16 two-step walks explicitly
    std::map<Element, double> oracle;
    for (int s = 0; s < 4; ++s)
        for (int t = 0; t < 4; ++t) oracle[ctx.from_tokens(std::vector<int>{s, t})] += 1.0 / 16.0;
    WalkMeasure mu = ctx.walk_convolution(2);
    CHECK(mu.mass.size() == oracle.size());
    for (const auto& [g, p] : oracle) CHECK(mu.mass.at(g) == doctest::Approx(p).epsilon(1e-14));
    CHECK(mu.mass.at(ctx.identity()) == doctest::Approx(0.25));
    CHECK(mu.mass.at(w(ctx, {0, 2})) == doctest::Approx(1.0 / 16.0));
}

TEST_CASE("walk measures are probability measures supported in the ball") {
    auto ctx = f2();
    for (int n = 0; n <= 6; ++n) {
        WalkMeasure mu = ctx.walk_convolution(n);
        mu.validate();
        std::set<Element> ball;
        for (const auto& g : ctx.ball(n)) ball.insert(g);
        for (const auto& [g, p] : mu.mass) {
            CHECK(p >= 0.0);
            CHECK(ball.count(g) == 1);
        }
    }
    auto z = z4();
    for (int n = 0; n <= 8; ++n) z.walk_convolution(n).validate();
    CHECK_THROWS_AS((void)ctx.walk_convolution(12, 1000), std::runtime_error);
}

TEST_CASE("walk masses are invariant under generator permutations") {
    auto ctx = f2();
    // automorphism of F2 swapping the two generators (token map 0<->2, 1<->3)
    auto swap_tokens = [&](const Element& g) {
        std::vector<int> mapped;
        for (int t : g.letters) mapped.push_back(t ^ 2);
        return ctx.from_tokens(mapped);
    };
    WalkMeasure mu = ctx.walk_convolution(3);
    for (const auto& [g, p] : mu.mass) CHECK(mu.mass.at(swap_tokens(g)) == doctest::Approx(p).epsilon(1e-14));
    // and under inversion of one generator (0 <-> 1)
    auto flip = [&](const Element& g) {
        std::vector<int> mapped;
        for (int t : g.letters) mapped.push_back(t < 2 ? t ^ 1 : t);
        return ctx.from_tokens(mapped);
    };
    for (const auto& [g, p] : mu.mass) CHECK(mu.mass.at(flip(g)) == doctest::Approx(p).epsilon(1e-14));
}

TEST_CASE("group axioms hold exhaustively on small balls") {
    auto ctx = f2();
    auto small = ctx.ball(2);
    for (const auto& g : ctx.ball(3)) {
        CHECK(ctx.multiply(g, ctx.inverse(g)) == ctx.identity());
        CHECK(ctx.multiply(ctx.identity(), g) == g);
        CHECK(ctx.multiply(g, ctx.identity()) == g);
    }
    for (const auto& g : small)
        for (const auto& h : small)
            for (const auto& k : small)
                CHECK(ctx.multiply(ctx.multiply(g, h), k) == ctx.multiply(g, ctx.multiply(h, k)));

    auto z = z4();
    auto all = z.ball(4);
    for (const auto& g : all)
        for (const auto& h : all)
            for (const auto& k : all)
                CHECK(z.multiply(z.multiply(g, h), k) == z.multiply(g, z.multiply(h, k)));
}

TEST_CASE("involutive generators are supported and flagged") {
    GeneratorSet gens = GeneratorSet::with_involution({0, 2, 1}, {"t", "u", "u^-1"});
    CHECK(gens.involutive(0));
    CHECK_FALSE(gens.involutive(1));
    GroupContext ctx = GroupContext::free_product(gens);
    Element t = ctx.generator(0);
    CHECK(ctx.multiply(t, t) == ctx.identity());
    CHECK(ctx.ball(1).size() == 4);  // e, t, u, u^-1
    ctx.walk_convolution(4).validate();
}

TEST_CASE("finite group construction validates its input") {
    CHECK_THROWS_AS((void)GroupContext::finite_group(cyclic_table(4), {2}), std::invalid_argument);  // 2 not symmetric? 2 = -2, ok; but does not generate
    CHECK_THROWS_AS((void)GroupContext::finite_group(cyclic_table(4), {0}), std::invalid_argument);  // identity as generator
    CHECK_THROWS_AS((void)GroupContext::finite_group(cyclic_table(4), {1}), std::invalid_argument);  // not symmetric
    std::vector<std::vector<int>> bad = cyclic_table(3);
    bad[1][1] = 1;  // breaks associativity/latin property
    CHECK_THROWS_AS((void)GroupContext::finite_group(bad, {1, 2}), std::invalid_argument);
}

TEST_CASE("identity is never a token and tokens parse back") {
    auto ctx = f2();
    CHECK(ctx.format(ctx.identity()) == "e");
    Element g = w(ctx, {0, 3, 0});
    CHECK(ctx.parse(ctx.format(g)) == g);
    CHECK_THROWS_AS((void)ctx.parse("nope"), std::invalid_argument);
    CHECK_THROWS_AS((void)ctx.from_tokens(std::vector<int>{9}), std::invalid_argument);
}
