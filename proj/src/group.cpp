#include "hfl/group.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace hfl {

GeneratorSet GeneratorSet::free_symmetric(int m) {
    if (m < 1) throw std::invalid_argument("free generating set needs m >= 1");
    GeneratorSet s;
    s.free_rank_ = m;
    s.inv_.resize(static_cast<std::size_t>(2 * m));
    s.names_.resize(static_cast<std::size_t>(2 * m));
    for (int k = 0; k < m; ++k) {
        s.inv_[static_cast<std::size_t>(2 * k)] = 2 * k + 1;
        s.inv_[static_cast<std::size_t>(2 * k + 1)] = 2 * k;
        s.names_[static_cast<std::size_t>(2 * k)] = "g" + std::to_string(k);
        s.names_[static_cast<std::size_t>(2 * k + 1)] = "g" + std::to_string(k) + "^-1";
    }
    return s;
}

GeneratorSet GeneratorSet::with_involution(std::vector<int> involution, std::vector<std::string> names) {
    const int n = static_cast<int>(involution.size());
    if (n == 0) throw std::invalid_argument("empty generating set");
    if (names.size() != involution.size()) throw std::invalid_argument("token name count mismatch");
    for (int t = 0; t < n; ++t) {
        int u = involution[static_cast<std::size_t>(t)];
        if (u < 0 || u >= n) throw std::invalid_argument("involution token out of range");
        if (involution[static_cast<std::size_t>(u)] != t) throw std::invalid_argument("inv(inv(t)) != t");
    }
    GeneratorSet s;
    s.inv_ = std::move(involution);
    s.names_ = std::move(names);
    bool plain_free = s.inv_.size() % 2 == 0;
    for (int t = 0; plain_free && t < n; t += 2) plain_free = s.inv_[static_cast<std::size_t>(t)] == t + 1;
    s.free_rank_ = plain_free ? n / 2 : -1;
    return s;
}

std::optional<int> GeneratorSet::token_by_name(const std::string& name) const {
    for (int t = 0; t < count(); ++t)
        if (names_[static_cast<std::size_t>(t)] == name) return t;
    return std::nullopt;
}

double WalkMeasure::total_mass() const {
    double s = 0.0;
    for (const auto& [g, w] : mass) s += w;
    return s;
}

void WalkMeasure::validate(double tol) const {
    for (const auto& [g, w] : mass)
        if (w < 0.0) throw std::runtime_error("walk measure has a negative weight");
    if (std::abs(total_mass() - 1.0) > tol) throw std::runtime_error("walk measure does not sum to 1");
}

GroupContext GroupContext::free_group(int m) { return free_product(GeneratorSet::free_symmetric(m)); }

GroupContext GroupContext::free_product(GeneratorSet gens) {
    GroupContext ctx;
    ctx.gens_ = std::move(gens);
    ctx.finite_ = false;
    return ctx;
}

GroupContext GroupContext::finite_group(std::vector<std::vector<int>> table, std::vector<int> generator_elements) {
    const int n = static_cast<int>(table.size());
    if (n == 0) throw std::invalid_argument("finite group table is empty");
    for (const auto& row : table) {
        if (static_cast<int>(row.size()) != n) throw std::invalid_argument("finite group table is not square");
        for (int v : row)
            if (v < 0 || v >= n) throw std::invalid_argument("finite group table entry out of range");
    }

    GroupContext ctx;
    ctx.finite_ = true;
    ctx.table_ = std::move(table);

    // locate the two-sided identity
    ctx.identity_index_ = -1;
    for (int e = 0; e < n; ++e) {
        bool ok = true;
        for (int x = 0; x < n && ok; ++x)
            ok = ctx.table_[static_cast<std::size_t>(e)][static_cast<std::size_t>(x)] == x &&
                 ctx.table_[static_cast<std::size_t>(x)][static_cast<std::size_t>(e)] == x;
        if (ok) {
            ctx.identity_index_ = e;
            break;
        }
    }
    if (ctx.identity_index_ < 0) throw std::invalid_argument("finite group table has no identity");

    // associativity: exhaustive for small orders, sampled otherwise
    auto mul = [&ctx](int a, int b) { return ctx.table_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; };
    if (n <= 64) {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    if (mul(mul(a, b), c) != mul(a, mul(b, c)))
                        throw std::invalid_argument("finite group table is not associative");
    } else {
        std::uint64_t h = 0x2545f4914f6cdd1dULL;
        for (int trial = 0; trial < 4096; ++trial) {
            h ^= h << 13; h ^= h >> 7; h ^= h << 17;
            int a = static_cast<int>(h % static_cast<std::uint64_t>(n));
            int b = static_cast<int>((h >> 20) % static_cast<std::uint64_t>(n));
            int c = static_cast<int>((h >> 40) % static_cast<std::uint64_t>(n));
            if (mul(mul(a, b), c) != mul(a, mul(b, c)))
                throw std::invalid_argument("finite group table is not associative");
        }
    }

    ctx.inverse_elem_.assign(static_cast<std::size_t>(n), -1);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            if (mul(a, b) == ctx.identity_index_ && mul(b, a) == ctx.identity_index_) {
                ctx.inverse_elem_[static_cast<std::size_t>(a)] = b;
                break;
            }
        }
        if (ctx.inverse_elem_[static_cast<std::size_t>(a)] < 0)
            throw std::invalid_argument("finite group table has a non-invertible element");
    }

    if (generator_elements.empty()) throw std::invalid_argument("finite group needs a generating set");
    for (int g : generator_elements) {
        if (g < 0 || g >= n) throw std::invalid_argument("generator index out of range");
        if (g == ctx.identity_index_) throw std::invalid_argument("identity cannot be a generator");
    }
    // S must be symmetric; order tokens so that inverse pairs map to each other
    std::vector<int> sorted = generator_elements;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<int> inv_token(sorted.size());
    std::vector<std::string> names(sorted.size());
    for (std::size_t t = 0; t < sorted.size(); ++t) {
        int ginv = ctx.inverse_elem_[static_cast<std::size_t>(sorted[t])];
        auto it = std::lower_bound(sorted.begin(), sorted.end(), ginv);
        if (it == sorted.end() || *it != ginv)
            throw std::invalid_argument("generating set is not symmetric (missing an inverse)");
        inv_token[t] = static_cast<int>(it - sorted.begin());
        names[t] = "s" + std::to_string(sorted[t]);
    }
    ctx.generator_elements_ = sorted;
    ctx.gens_ = GeneratorSet::with_involution(std::move(inv_token), std::move(names));

    // BFS from identity: distances, geodesic parents, generation check
    ctx.distance_.assign(static_cast<std::size_t>(n), -1);
    ctx.bfs_parent_token_.assign(static_cast<std::size_t>(n), -1);
    std::deque<int> queue;
    ctx.distance_[static_cast<std::size_t>(ctx.identity_index_)] = 0;
    queue.push_back(ctx.identity_index_);
    while (!queue.empty()) {
        int g = queue.front();
        queue.pop_front();
        for (int t = 0; t < static_cast<int>(ctx.generator_elements_.size()); ++t) {
            int h = mul(g, ctx.generator_elements_[static_cast<std::size_t>(t)]);
            if (ctx.distance_[static_cast<std::size_t>(h)] < 0) {
                ctx.distance_[static_cast<std::size_t>(h)] = ctx.distance_[static_cast<std::size_t>(g)] + 1;
                ctx.bfs_parent_token_[static_cast<std::size_t>(h)] = t;
                queue.push_back(h);
            }
        }
    }
    for (int g = 0; g < n; ++g)
        if (ctx.distance_[static_cast<std::size_t>(g)] < 0)
            throw std::invalid_argument("generating set does not generate the group");
    return ctx;
}

void GroupContext::check_token(int token) const {
    if (token < 0 || token >= gens_.count()) throw std::invalid_argument("token not in generating set");
}

void GroupContext::check_element(const Element& g) const {
    if (finite_) {
        if (!g.is_finite() || g.index >= static_cast<int>(table_.size()))
            throw std::invalid_argument("element does not belong to this finite group");
    } else {
        if (g.is_finite()) throw std::invalid_argument("element does not belong to this free group");
        for (std::size_t i = 0; i < g.letters.size(); ++i) {
            check_token(g.letters[i]);
            if (i + 1 < g.letters.size() && g.letters[i + 1] == gens_.inv(g.letters[i]))
                throw std::invalid_argument("word is not reduced");
        }
    }
}

Element GroupContext::identity() const {
    Element e;
    if (finite_) e.index = identity_index_;
    return e;
}

Element GroupContext::generator(int token) const {
    check_token(token);
    Element g;
    if (finite_) {
        g.index = generator_elements_[static_cast<std::size_t>(token)];
    } else {
        g.letters = {token};
    }
    return g;
}

Element GroupContext::from_tokens(std::span<const int> tokens) const {
    Element g = identity();
    if (finite_) {
        for (int t : tokens) {
            check_token(t);
            g.index = table_[static_cast<std::size_t>(g.index)]
                            [static_cast<std::size_t>(generator_elements_[static_cast<std::size_t>(t)])];
        }
        return g;
    }
    g.letters.reserve(tokens.size());
    for (int t : tokens) {
        check_token(t);
        if (!g.letters.empty() && g.letters.back() == gens_.inv(t))
            g.letters.pop_back();
        else
            g.letters.push_back(t);
    }
    return g;
}

std::vector<int> GroupContext::token_word(const Element& g) const {
    check_element(g);
    if (!finite_) return g.letters;
    std::vector<int> word;
    int cur = g.index;
    while (cur != identity_index_) {
        int t = bfs_parent_token_[static_cast<std::size_t>(cur)];
        word.push_back(t);
        int step_inv = generator_elements_[static_cast<std::size_t>(gens_.inv(t))];
        cur = table_[static_cast<std::size_t>(cur)][static_cast<std::size_t>(step_inv)];
    }
    std::reverse(word.begin(), word.end());
    return word;
}

Element GroupContext::multiply(const Element& g, const Element& h) const {
    check_element(g);
    check_element(h);
    Element out;
    if (finite_) {
        out.index = table_[static_cast<std::size_t>(g.index)][static_cast<std::size_t>(h.index)];
        return out;
    }
    out.letters = g.letters;
    for (int t : h.letters) {
        if (!out.letters.empty() && out.letters.back() == gens_.inv(t))
            out.letters.pop_back();
        else
            out.letters.push_back(t);
    }
    return out;
}

Element GroupContext::inverse(const Element& g) const {
    check_element(g);
    Element out;
    if (finite_) {
        out.index = inverse_elem_[static_cast<std::size_t>(g.index)];
        return out;
    }
    out.letters.reserve(g.letters.size());
    for (auto it = g.letters.rbegin(); it != g.letters.rend(); ++it) out.letters.push_back(gens_.inv(*it));
    return out;
}

int GroupContext::word_length(const Element& g) const {
    check_element(g);
    if (finite_) return distance_[static_cast<std::size_t>(g.index)];
    return static_cast<int>(g.letters.size());
}

int GroupContext::conjugacy_length(const Element& g) const {
    check_element(g);
    if (!finite_) {
        // cyclic reduction: strip matching outer letters
        std::size_t lo = 0, hi = g.letters.size();
        while (hi - lo >= 2 && g.letters[lo] == gens_.inv(g.letters[hi - 1])) {
            ++lo;
            --hi;
        }
        return static_cast<int>(hi - lo);
    }
    // enumerate the conjugacy class
    int best = distance_[static_cast<std::size_t>(g.index)];
    for (int u = 0; u < static_cast<int>(table_.size()); ++u) {
        int c = table_[static_cast<std::size_t>(table_[static_cast<std::size_t>(u)][static_cast<std::size_t>(g.index)])]
                      [static_cast<std::size_t>(inverse_elem_[static_cast<std::size_t>(u)])];
        best = std::min(best, distance_[static_cast<std::size_t>(c)]);
    }
    return best;
}

std::vector<Element> GroupContext::ball(int radius, std::size_t cap) const {
    if (radius < 0) throw std::invalid_argument("ball radius must be >= 0");
    std::vector<Element> out;
    if (finite_) {
        for (int g = 0; g < static_cast<int>(table_.size()); ++g)
            if (distance_[static_cast<std::size_t>(g)] <= radius) {
                Element el;
                el.index = g;
                out.push_back(el);
            }
        return out;
    }
    // breadth-first over reduced words
    out.push_back(identity());
    std::size_t layer_begin = 0;
    for (int r = 1; r <= radius; ++r) {
        std::size_t layer_end = out.size();
        for (std::size_t i = layer_begin; i < layer_end; ++i) {
            for (int t = 0; t < gens_.count(); ++t) {
                const auto& w = out[i].letters;
                if (!w.empty() && t == gens_.inv(w.back())) continue;
                Element next;
                next.letters = w;
                next.letters.push_back(t);
                out.push_back(std::move(next));
                if (out.size() > cap) throw std::runtime_error("ball support cap exceeded");
            }
        }
        layer_begin = layer_end;
    }
    std::sort(out.begin(), out.end());
    return out;
}

WalkMeasure GroupContext::walk_convolution(int steps, std::size_t cap) const {
    if (steps < 0) throw std::invalid_argument("walk steps must be >= 0");
    WalkMeasure mu;
    mu.basepoint = identity();
    mu.mass[identity()] = 1.0;
    const double step_weight = 1.0 / static_cast<double>(gens_.count());
    for (int k = 0; k < steps; ++k) {
        std::map<Element, double> next;
        for (const auto& [g, w] : mu.mass) {
            for (int t = 0; t < gens_.count(); ++t) {
                next[multiply(g, generator(t))] += w * step_weight;
            }
            if (next.size() > cap) throw std::runtime_error("walk support cap exceeded");
        }
        mu.mass = std::move(next);
    }
    return mu;
}

std::string GroupContext::format(const Element& g) const {
    check_element(g);
    if (finite_) return std::to_string(g.index);
    if (g.letters.empty()) return "e";
    std::ostringstream os;
    for (std::size_t i = 0; i < g.letters.size(); ++i) {
        if (i) os << ' ';
        os << gens_.name(g.letters[i]);
    }
    return os.str();
}

Element GroupContext::parse(const std::string& text) const {
    if (finite_) {
        Element g;
        g.index = std::stoi(text);
        check_element(g);
        return g;
    }
    if (text == "e" || text.empty()) return identity();
    std::istringstream is(text);
    std::vector<int> tokens;
    std::string name;
    while (is >> name) {
        auto t = gens_.token_by_name(name);
        if (!t) throw std::invalid_argument("unknown generator token '" + name + "'");
        tokens.push_back(*t);
    }
    return from_tokens(tokens);
}

}  // namespace hfl
