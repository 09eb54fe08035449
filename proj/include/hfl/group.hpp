#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hfl {

inline constexpr std::size_t kDefaultSupportCap = 1'000'000;

/// Symmetric generating alphabet. Tokens 0..count()-1; inv() is the pairing
/// involution. A token with inv(t) == t is an involutive generator (s = s^-1)
/// and must be flagged as such at construction.
class GeneratorSet {
public:
    GeneratorSet() = default;  // empty; only valid as a placeholder

    // free-group alphabet: tokens 2k = g_k, 2k+1 = g_k^-1
    static GeneratorSet free_symmetric(int m);
    // explicit alphabet; involution[i] gives each token's inverse token
    static GeneratorSet with_involution(std::vector<int> involution, std::vector<std::string> names);

    int count() const { return static_cast<int>(inv_.size()); }  // #S
    int free_rank() const { return free_rank_; }                 // m, -1 if not a plain free alphabet
    int inv(int token) const { return inv_.at(static_cast<std::size_t>(token)); }
    bool involutive(int token) const { return inv(token) == token; }
    const std::string& name(int token) const { return names_.at(static_cast<std::size_t>(token)); }
    std::optional<int> token_by_name(const std::string& name) const;

private:
    std::vector<int> inv_;
    std::vector<std::string> names_;
    int free_rank_ = -1;
};

/// Canonical group element. Free backend: `letters` is a reduced token word
/// and index == -1. Finite backend: `index` is the multiplication-table row
/// and letters is empty.
struct Element {
    std::vector<int> letters;
    int index = -1;

    bool is_finite() const { return index >= 0; }
    bool operator==(const Element& o) const { return index == o.index && letters == o.letters; }
    bool operator!=(const Element& o) const { return !(*this == o); }
    bool operator<(const Element& o) const {  // shortlex; deterministic map ordering
        if (index != o.index) return index < o.index;
        if (letters.size() != o.letters.size()) return letters.size() < o.letters.size();
        return letters < o.letters;
    }
};

struct WalkMeasure {
    Element basepoint;
    std::map<Element, double> mass;

    double total_mass() const;
    // all weights >= 0, total within tol of 1
    void validate(double tol = 1e-12) const;
};

/// Finitely generated group backend: free group F_m (optionally with
/// involutive generators, i.e. a free product of Z's and Z/2's) or an
/// explicit finite group given by its multiplication table.
class GroupContext {
public:
    static GroupContext free_group(int m);
    static GroupContext free_product(GeneratorSet gens);
    static GroupContext finite_group(std::vector<std::vector<int>> table, std::vector<int> generator_elements);

    bool is_free() const { return !finite_; }
    const GeneratorSet& gens() const { return gens_; }
    int token_count() const { return gens_.count(); }
    std::size_t order() const { return finite_ ? table_.size() : 0; }  // 0 = infinite

    Element identity() const;
    Element generator(int token) const;
    /// reduced/canonical element from an arbitrary token sequence
    Element from_tokens(std::span<const int> tokens) const;
    /// geodesic token word for an element (free: the letters themselves;
    /// finite: a BFS geodesic from the identity)
    std::vector<int> token_word(const Element& g) const;

    Element multiply(const Element& g, const Element& h) const;
    Element inverse(const Element& g) const;
    int word_length(const Element& g) const;
    int conjugacy_length(const Element& g) const;

    /// all elements with word_length <= radius, each exactly once, shortlex order
    std::vector<Element> ball(int radius, std::size_t cap = kDefaultSupportCap) const;
    /// exact n-step distribution of the uniform generator walk from e
    WalkMeasure walk_convolution(int steps, std::size_t cap = kDefaultSupportCap) const;

    std::string format(const Element& g) const;
    Element parse(const std::string& text) const;

private:
    GroupContext() = default;
    void check_token(int token) const;
    void check_element(const Element& g) const;

    GeneratorSet gens_;
    bool finite_ = false;

    // finite backend
    std::vector<std::vector<int>> table_;
    std::vector<int> generator_elements_;  // S as element indices, aligned with tokens
    std::vector<int> inverse_elem_;
    std::vector<int> distance_;            // BFS distance from identity
    std::vector<int> bfs_parent_token_;    // token used to reach each element
    int identity_index_ = -1;
};

}  // namespace hfl
