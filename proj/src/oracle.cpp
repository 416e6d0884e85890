#include "gentree/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace gentree {

WalkSumResult walk_sum_q(const Tree& tree, double x, std::int32_t source, std::int32_t target,
                         WalkMode mode, int t_max) {
    if (!(x > 0.0) || x > 1.0) throw std::domain_error("walk_sum_q: x must be in (0, 1]");
    if (tree.num_vertices() > 1000) throw std::invalid_argument("walk_sum_q: tree too large for the oracle");
    if (source < 0 || source >= tree.num_vertices() || target < 0 || target >= tree.num_vertices())
        throw std::invalid_argument("walk_sum_q: bad vertex index");
    if (mode == WalkMode::first_return && source != target)
        throw std::invalid_argument("walk_sum_q: first_return needs source == target");
    if (mode == WalkMode::first_passage && source == target)
        throw std::invalid_argument("walk_sum_q: first_passage needs source != target");
    if (t_max < 1) throw std::invalid_argument("walk_sum_q: t_max must be >= 1");

    auto n = static_cast<std::size_t>(tree.num_vertices());
    // adjacency and degrees
    std::vector<std::vector<std::int32_t>> adj(n);
    for (std::int32_t v = 1; v < tree.num_vertices(); ++v) {
        adj[static_cast<std::size_t>(v)].push_back(tree.parent(v));
        adj[static_cast<std::size_t>(tree.parent(v))].push_back(v);
    }
    std::vector<double> deg(n);
    for (std::size_t v = 0; v < n; ++v) deg[v] = static_cast<double>(adj[v].size());

    const double step = std::sqrt(1.0 - x);
    const bool source_blocked = mode != WalkMode::all_walks;

    std::vector<double> cur(n, 0.0), nxt(n, 0.0);
    WalkSumResult res;
    res.t_max = t_max;

    // t = 0
    if (mode == WalkMode::all_walks && source == target) res.value += 1.0;

    // t = 1: endpoints carry no 1/sigma factor.
    double wt = step;
    for (auto u : adj[static_cast<std::size_t>(source)]) cur[static_cast<std::size_t>(u)] = 1.0;
    if (mode != WalkMode::first_return) res.value += wt * cur[static_cast<std::size_t>(target)];
    if (source_blocked) cur[static_cast<std::size_t>(source)] = 0.0;

    for (int t = 2; t <= t_max; ++t) {
        wt *= step;
        std::fill(nxt.begin(), nxt.end(), 0.0);
        for (std::size_t v = 0; v < n; ++v) {
            double m = cur[v];
            if (m == 0.0) continue;
            double out = m / deg[v];
            for (auto u : adj[v]) nxt[static_cast<std::size_t>(u)] += out;
        }
        if (mode == WalkMode::first_return) {
            // trees are bipartite: returns happen at even t only
            if (t % 2 == 0) res.value += wt * nxt[static_cast<std::size_t>(source)];
            nxt[static_cast<std::size_t>(source)] = 0.0;
        } else {
            res.value += wt * nxt[static_cast<std::size_t>(target)];
            if (source_blocked) nxt[static_cast<std::size_t>(source)] = 0.0;
        }
        cur.swap(nxt);
    }

    double sigma_source = deg[static_cast<std::size_t>(source)];
    res.tail_bound = sigma_source * std::pow(step, t_max + 1) / (1.0 - step);
    return res;
}

double tree_weight(const WeightSpec& spec, const Tree& tree) {
    double w = 1.0;
    for (std::int32_t v = 1; v < tree.num_vertices(); ++v) w *= spec.w(tree.degree(v));
    return w;
}

double oracle_z_n(const WeightSpec& spec, int N) {
    double z = 0.0;
    for (const Tree& t : enumerate_trees(N)) z += tree_weight(spec, t);
    return z;
}

std::vector<std::pair<Tree, double>> exact_nu_n(const WeightSpec& spec, int N) {
    if (N < 1 || N > 8) throw std::invalid_argument("exact_nu_n: N must be in [1,8]");
    std::vector<Tree> trees = enumerate_trees(N);
    double z = 0.0;
    std::vector<double> w(trees.size());
    for (std::size_t i = 0; i < trees.size(); ++i) {
        w[i] = tree_weight(spec, trees[i]);
        z += w[i];
    }
    if (!(z > 0)) throw std::runtime_error("exact_nu_n: Z_N = 0 for this N");
    std::vector<std::pair<Tree, double>> out;
    out.reserve(trees.size());
    for (std::size_t i = 0; i < trees.size(); ++i) {
        if (w[i] == 0.0) continue;
        out.emplace_back(std::move(trees[i]), w[i] / z);
    }
    return out;
}

} // namespace gentree
