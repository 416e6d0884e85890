#include "gentree/samplers.hpp"

#include "gentree/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gentree {

AliasTable AliasTable::build(const std::vector<double>& probs) {
    if (probs.empty()) throw std::invalid_argument("AliasTable: empty law");
    double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    if (!(total > 0)) throw std::invalid_argument("AliasTable: zero mass");
    std::size_t n = probs.size();
    AliasTable t;
    t.prob_.assign(n, 0.0);
    t.alias_.assign(n, 0);
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) scaled[i] = probs[i] / total * static_cast<double>(n);
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < n; ++i)
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    while (!small.empty() && !large.empty()) {
        std::uint32_t s = small.back(); small.pop_back();
        std::uint32_t l = large.back(); large.pop_back();
        t.prob_[s] = scaled[s];
        t.alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        (scaled[l] < 1.0 ? small : large).push_back(l);
    }
    for (std::uint32_t i : large) t.prob_[i] = 1.0;
    for (std::uint32_t i : small) t.prob_[i] = 1.0;
    return t;
}

std::uint32_t AliasTable::sample(RngStream& rng) const {
    double u = rng.next_double() * static_cast<double>(prob_.size());
    auto i = static_cast<std::uint32_t>(u);
    if (i >= prob_.size()) i = static_cast<std::uint32_t>(prob_.size()) - 1;
    double frac = u - static_cast<double>(i);
    return frac < prob_[i] ? i : alias_[i];
}

SamplerTables::SamplerTables(const CriticalData& crit)
    : crit_(crit),
      offspring_(AliasTable::build(crit.offspring)),
      branch_total_(AliasTable::build([&] {
          // marginal of k+l under phi: (m+1) p_{m+1}
          std::vector<double> q;
          for (std::size_t m = 0; m + 1 < crit.offspring.size(); ++m)
              q.push_back(static_cast<double>(m + 1) * crit.offspring[m + 1]);
          if (q.empty()) q.push_back(1.0);
          return q;
      }())) {}

std::pair<int, int> SamplerTables::sample_branch_pair(RngStream& rng) const {
    int m = static_cast<int>(sample_branch_total(rng));
    int k = static_cast<int>(rng.next_below(static_cast<std::uint32_t>(m + 1)));
    return {k, m - k};
}

namespace {

// Layered BFS below an existing vertex. Returns false if size_cap was hit;
// in that case the unexpanded frontier is marked open and generation stops
// at a layer boundary.
bool grow_gw(const SamplerTables& tables, RngStream& rng, Tree& out,
             std::int32_t below, std::optional<int> depth_cap, std::int64_t size_cap,
             bool cap_throws) {
    std::vector<std::int32_t> layer{out.add_child(below)}, next;
    int depth = 1;
    while (!layer.empty()) {
        if (depth_cap && depth >= *depth_cap) {
            for (auto v : layer) out.mark_open(v);
            return true;
        }
        next.clear();
        for (auto v : layer) {
            auto c = static_cast<int>(tables.sample_offspring(rng));
            for (int i = 0; i < c; ++i) next.push_back(out.add_child(v));
        }
        if (out.size() > size_cap) {
            if (cap_throws) throw TreeTooLarge(out.size());
            for (auto v : next) out.mark_open(v);
            return false;
        }
        layer.swap(next);
        ++depth;
    }
    return true;
}

} // namespace

Tree sample_gw(const SamplerTables& tables, RngStream& rng,
               std::optional<int> depth_cap, std::int64_t size_cap) {
    if (depth_cap && *depth_cap < 1)
        throw std::invalid_argument("sample_gw: depth_cap must be >= 1");
    if (size_cap < 1) throw std::invalid_argument("sample_gw: size_cap must be >= 1");
    Tree out;
    grow_gw(tables, rng, out, 0, depth_cap, size_cap, /*cap_throws=*/true);
    return out;
}

Tree sample_nu_n(const SamplerTables& tables, int N, RngStream& rng, int max_attempts) {
    if (N < 1) throw std::invalid_argument("sample_nu_n: N must be >= 1");
    if ((N - 1) % tables.crit().divisor_d != 0)
        throw std::invalid_argument("sample_nu_n: Z_N = 0 for this N (divisor obstruction)");
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        Tree t;
        // Reject as soon as the tree outgrows N; acceptance needs |T| = N exactly.
        if (!grow_gw(tables, rng, t, 0, std::nullopt, N, /*cap_throws=*/false)) continue;
        if (t.size() == N) return t;
    }
    throw std::runtime_error("sample_nu_n: no acceptance after " + std::to_string(max_attempts) +
                             " attempts");
}

SpineSection sample_spine(const SamplerTables& tables, int L, int branch_depth_cap, RngStream& rng) {
    if (L < 1) throw std::invalid_argument("sample_spine: L must be >= 1");
    if (branch_depth_cap < 0) throw std::invalid_argument("sample_spine: branch_depth_cap must be >= 0");
    SpineSection out;
    out.branch_depth_cap = branch_depth_cap;
    out.vertices.resize(static_cast<std::size_t>(L));
    for (auto& sv : out.vertices) {
        auto [k, l] = tables.sample_branch_pair(rng);
        sv.left.reserve(static_cast<std::size_t>(k));
        sv.right.reserve(static_cast<std::size_t>(l));
        for (int i = 0; i < k + l; ++i) {
            Tree branch;
            // A branch always has its structural root child, so cap 0 and cap 1
            // carry the same information: root child present, subtree open.
            grow_gw(tables, rng, branch, 0, std::max(branch_depth_cap, 1),
                    kDefaultSizeCap, /*cap_throws=*/false);
            (i < k ? sv.left : sv.right).push_back(std::move(branch));
        }
    }
    return out;
}

namespace {

void copy_ball_below(const Tree& src, std::int32_t sv, Tree& dst, std::int32_t dv, int budget) {
    if (budget == 0) return;
    for (std::int32_t c = src.first_child(sv); c != -1; c = src.next_sibling(c)) {
        std::int32_t nc = dst.add_child(dv);
        if (src.is_open(c)) dst.mark_open(nc);
        copy_ball_below(src, c, dst, nc, budget - 1);
    }
}

} // namespace

Tree spine_ball_tree(const SpineSection& spine, int R) {
    if (R < 1 || R > spine.length())
        throw std::invalid_argument("spine_ball_tree: need 1 <= R <= spine length");
    if (spine.branch_depth_cap < R - 1)
        throw std::invalid_argument("spine_ball_tree: branches too shallow for this R");
    Tree out;
    std::int32_t cur = out.add_child(0);   // s_1
    for (int i = 1; i <= R; ++i) {
        const auto& sv = spine.vertices[static_cast<std::size_t>(i - 1)];
        // planar order at s_i: left branches, spine continuation, right branches
        for (const auto& b : sv.left) copy_ball_below(b, 0, out, cur, R - i);
        std::int32_t next = (i < R) ? out.add_child(cur) : -1;
        for (const auto& b : sv.right) copy_ball_below(b, 0, out, cur, R - i);
        cur = next;
    }
    return out;
}

std::pair<Estimate, Estimate> size_biasing_check(const SamplerTables& tables, int R,
                                           const std::function<double(const Tree&)>& u,
                                           std::size_t n_samples, std::uint64_t seed) {
    if (R < 1) throw std::invalid_argument("size_biasing_check: R must be >= 1");
    MeanAccumulator nu_side, mu_side;
    for (std::size_t i = 0; i < n_samples; ++i) {
        RngStream rng(seed, 2 * i);
        SpineSection s = sample_spine(tables, R, R, rng);
        nu_side.add(u(spine_ball_tree(s, R)));
    }
    for (std::size_t i = 0; i < n_samples; ++i) {
        RngStream rng(seed, 2 * i + 1);
        Tree t = sample_gw(tables, rng, R);
        double d = static_cast<double>(profile(t, R));
        mu_side.add(d == 0.0 ? 0.0 : u(ball(t, R)) * d);
    }
    auto mk = [](const MeanAccumulator& a) {
        return Estimate{a.mean, a.stderr_of_mean(), a.n};
    };
    return {mk(nu_side), mk(mu_side)};
}

void NuBallArena::reset(const SamplerTables& tables, RngStream rng) {
    (void)tables;
    child_begin_.assign(2, 0);
    child_begin_[0] = 1;   // root's children = [1, 2)
    child_begin_[1] = 2;
    depth_.assign(2, 0);
    depth_[1] = 1;
    spine_.assign(2, 0);
    spine_[1] = 1;
    layer_begin_.assign(2, 0);
    layer_begin_[1] = 1;
    gen_depth_ = 1;
    censored_ = false;
    rng_ = rng;
}

void NuBallArena::extend(const SamplerTables& tables, int target_depth, std::int64_t max_vertices) {
    while (gen_depth_ < target_depth && !censored_) {
        if (static_cast<std::int64_t>(num_vertices()) > max_vertices) {
            censored_ = true;
            break;
        }
        int d = gen_depth_;
        std::uint32_t lb = layer_begin_[static_cast<std::size_t>(d)];
        std::uint32_t le = num_vertices();
        std::uint32_t spine_v = spine_[static_cast<std::size_t>(d)];
        layer_begin_.push_back(le);
        for (std::uint32_t v = lb; v < le; ++v) {
            std::uint32_t c;
            if (v == spine_v) {
                c = tables.sample_branch_total(rng_) + 1;
                spine_.push_back(num_vertices());   // spine child placed first
            } else {
                c = tables.sample_offspring(rng_);
            }
            for (std::uint32_t i = 0; i < c; ++i)
                depth_.push_back(static_cast<std::uint16_t>(d + 1));
            child_begin_.push_back(num_vertices());
        }
        ++gen_depth_;
    }
}

std::int64_t NuBallArena::ball_edges(int R) const {
    if (R < 0 || R > gen_depth_) throw std::invalid_argument("ball_edges: R beyond generated depth");
    if (R == gen_depth_) return static_cast<std::int64_t>(num_vertices()) - 1;
    return static_cast<std::int64_t>(layer_begin_[static_cast<std::size_t>(R + 1)]) - 1;
}

std::int64_t NuBallArena::profile(int R) const {
    if (R < 0 || R > gen_depth_) throw std::invalid_argument("profile: R beyond generated depth");
    std::int64_t hi = (R == gen_depth_) ? static_cast<std::int64_t>(num_vertices())
                                        : static_cast<std::int64_t>(layer_begin_[static_cast<std::size_t>(R + 1)]);
    return hi - static_cast<std::int64_t>(layer_begin_[static_cast<std::size_t>(R)]);
}

int NuBallArena::spine_degree(int n) const {
    if (n < 1 || n >= gen_depth_)
        throw std::invalid_argument("spine_degree: spine vertex not expanded");
    std::uint32_t v = spine_[static_cast<std::size_t>(n)];
    return static_cast<int>(child_begin_[v + 1] - child_begin_[v]) + 1;
}

} // namespace gentree
