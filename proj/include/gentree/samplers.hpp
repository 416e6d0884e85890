#pragma once

#include "gentree/criticality.hpp"
#include "gentree/rng.hpp"
#include "gentree/tree.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gentree {

/// Thrown by uncapped generation when a tree outgrows size_cap. Critical
/// trees have N^{-3/2} size tails, so callers must decide: retry (conditioned
/// sampling) or count the event as censored. Never drop it silently.
struct TreeTooLarge : std::runtime_error {
    explicit TreeTooLarge(std::int64_t reached)
        : std::runtime_error("sampled tree exceeded size cap"), size_reached(reached) {}
    std::int64_t size_reached;
};

/// O(1) draws from a fixed discrete law (Vose alias method).
class AliasTable {
public:
    static AliasTable build(const std::vector<double>& probs);
    std::uint32_t sample(RngStream& rng) const;
    std::size_t size() const { return prob_.size(); }

private:
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
};

/// Sampling tables derived from a CriticalData: the offspring law p_n and the
/// spine branch-count marginal (m+1) p_{m+1}. Build once, share across
/// threads read-only.
class SamplerTables {
public:
    explicit SamplerTables(const CriticalData& crit);

    const CriticalData& crit() const { return crit_; }

    std::uint32_t sample_offspring(RngStream& rng) const { return offspring_.sample(rng); }

    /// Number of branches at a spine vertex (the k+l marginal of phi).
    std::uint32_t sample_branch_total(RngStream& rng) const { return branch_total_.sample(rng); }

    /// A (k, l) pair from phi: total from the marginal, then k uniform.
    std::pair<int, int> sample_branch_pair(RngStream& rng) const;

private:
    CriticalData crit_;
    AliasTable offspring_;
    AliasTable branch_total_;
};

inline constexpr std::int64_t kDefaultSizeCap = 10'000'000;

/// Critical Galton-Watson tree from mu: the root gets one child, every later
/// vertex an independent p_n offspring count. With depth_cap set, vertices at
/// that depth are left open (exact for all observables of B_{depth_cap});
/// without it, generation throws TreeTooLarge past size_cap.
Tree sample_gw(const SamplerTables& tables, RngStream& rng,
               std::optional<int> depth_cap = std::nullopt,
               std::int64_t size_cap = kDefaultSizeCap);

/// Exact nu_N sample by rejection from mu (accept iff |T| = N). Throws
/// std::invalid_argument when Z_N = 0 (divisor obstruction) and
/// std::runtime_error carrying the attempt count when max_attempts runs out.
Tree sample_nu_n(const SamplerTables& tables, int N, RngStream& rng, int max_attempts = 1 << 22);

/// Truncated sample from nu: L spine vertices, each carrying phi-distributed
/// left/right branch lists, branches generated to depth branch_depth_cap.
struct SpineSection {
    struct Vertex {
        std::vector<Tree> left, right;
        int branch_count() const { return static_cast<int>(left.size() + right.size()); }
    };
    std::vector<Vertex> vertices;   // s_1 .. s_L
    int branch_depth_cap = 0;

    int length() const { return static_cast<int>(vertices.size()); }
};

SpineSection sample_spine(const SamplerTables& tables, int L, int branch_depth_cap, RngStream& rng);

/// Ball of radius R of the infinite tree behind a spine section, as a Tree
/// (spine path plus branch balls, planar order preserved).
/// Requires R <= spine length and R <= branch_depth_cap.
Tree spine_ball_tree(const SpineSection& spine, int R);

struct Estimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

/// Two routes to the same number (the size-biasing identity between nu and
/// mu): the nu-side mean of u over spine samples and the mu-side mean of
/// u * D_R over GW samples, for a functional u of the radius-R ball.
std::pair<Estimate, Estimate> size_biasing_check(const SamplerTables& tables, int R,
                                           const std::function<double(const Tree&)>& u,
                                           std::size_t n_samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Flat BFS arena for the Monte Carlo hot path.
//
// Holds the ball of one nu-tree, generated lazily layer by layer. Vertices
// are stored in BFS order; children of vertex v occupy the contiguous index
// range [child_begin[v], child_begin[v+1]) once v's layer has been expanded.
// The RNG state rides along so extending the same sample deeper replays
// deterministically and never re-draws settled structure.
// ---------------------------------------------------------------------------
class NuBallArena {
public:
    /// Starts a fresh sample: vertex 0 is the root, vertex 1 is s_1.
    void reset(const SamplerTables& tables, RngStream rng);

    /// Extends generation to the given depth (no-op if already there).
    /// Stops early when the vertex budget is exhausted (censored() turns
    /// true); the stored prefix remains a valid truncated sample.
    void extend(const SamplerTables& tables, int target_depth,
                std::int64_t max_vertices = kDefaultSizeCap);

    int generated_depth() const { return gen_depth_; }
    bool censored() const { return censored_; }

    std::uint32_t num_vertices() const { return static_cast<std::uint32_t>(depth_.size()); }

    /// Edge count of B_R; requires R <= generated_depth().
    std::int64_t ball_edges(int R) const;

    /// Number of vertices at distance exactly R (profile D_R).
    std::int64_t profile(int R) const;

    std::uint32_t spine_vertex(int i) const { return spine_[static_cast<std::size_t>(i)]; }

    /// sigma of spine vertex s_n (needs n < generated_depth()).
    int spine_degree(int n) const;

    bool expanded(std::uint32_t v) const { return depth_[v] < gen_depth_; }
    std::uint32_t child_begin(std::uint32_t v) const { return child_begin_[v]; }
    std::uint32_t child_end(std::uint32_t v) const { return child_begin_[v + 1]; }
    int depth(std::uint32_t v) const { return depth_[v]; }

private:
    std::vector<std::uint32_t> child_begin_;   // covers the expanded prefix, plus one
    std::vector<std::uint16_t> depth_;
    std::vector<std::uint32_t> spine_;         // spine_[i] = id of s_i
    std::vector<std::uint32_t> layer_begin_;   // layer_begin_[d] = first vertex of depth d
    int gen_depth_ = 0;
    bool censored_ = false;
    RngStream rng_;
};

} // namespace gentree
