#include "gentree/walk_gf.hpp"

#include <cmath>
#include <stdexcept>

namespace gentree {

namespace {

void check_x(double x) {
    if (!(x > 0.0) || x > 1.0) throw std::domain_error("walk_gf: x must be in (0, 1]");
}

// Post-order P brackets for every non-root vertex of a Tree. Vertices are
// stored parent-before-child, so one reverse index pass suffices.
void tree_p_pass(const Tree& tree, double x, std::vector<double>& plo, std::vector<double>& phi) {
    auto n = static_cast<std::size_t>(tree.num_vertices());
    std::vector<double> slo(n, 0.0), shi(n, 0.0);
    std::vector<std::int32_t> nchild(n, 0);
    for (std::int32_t v = 1; v < tree.num_vertices(); ++v)
        ++nchild[static_cast<std::size_t>(tree.parent(v))];
    plo.assign(n, 0.0);
    phi.assign(n, 0.0);
    const double w = 1.0 - x;
    for (std::int32_t v = tree.num_vertices() - 1; v >= 1; --v) {
        auto i = static_cast<std::size_t>(v);
        double lo, hi;
        if (tree.is_open(v)) {
            lo = 0.0;
            hi = 1.0;
        } else {
            double m = static_cast<double>(nchild[i]);
            lo = w / (1.0 + m - slo[i]);
            hi = w / (1.0 + m - shi[i]);
        }
        plo[i] = lo;
        phi[i] = hi;
        auto p = static_cast<std::size_t>(tree.parent(v));
        slo[p] += lo;
        shi[p] += hi;
    }
}

} // namespace

double p_finite(const Tree& tree, double x) {
    check_x(x);
    if (tree.has_open())
        throw std::invalid_argument("p_finite: tree has unexplored vertices; use p_interval");
    if (tree.child_count(0) != 1)
        throw std::invalid_argument("p_finite: root must have exactly one child");
    std::vector<double> plo, phi;
    tree_p_pass(tree, x, plo, phi);
    return plo[static_cast<std::size_t>(tree.first_child(0))];
}

PInterval p_interval(const Tree& tree, double x) {
    check_x(x);
    if (tree.child_count(0) != 1)
        throw std::invalid_argument("p_interval: root must have exactly one child");
    std::vector<double> plo, phi;
    tree_p_pass(tree, x, plo, phi);
    auto c = static_cast<std::size_t>(tree.first_child(0));
    return {plo[c], phi[c]};
}

double q_from_p(double p) {
    if (p >= 1.0) throw std::domain_error("q_from_p: p must be < 1");
    if (p < 0.0) throw std::domain_error("q_from_p: p must be >= 0");
    return 1.0 / (1.0 - p);
}

namespace {

// Branch P sums at a spine vertex, brackets included.
void branch_sums(const SpineSection::Vertex& sv, double x, double& slo, double& shi) {
    slo = 0.0;
    shi = 0.0;
    auto add = [&](const Tree& t) {
        PInterval p = p_interval(t, x);
        slo += p.lo;
        shi += p.hi;
    };
    for (const auto& t : sv.left) add(t);
    for (const auto& t : sv.right) add(t);
}

// S_k brackets for k = L-1 down to 0, with S_{L-1} seeded at [0, 1].
void spine_pass(const SpineSection& spine, double x, int L,
                std::vector<double>& slo, std::vector<double>& shi) {
    slo.assign(static_cast<std::size_t>(L), 0.0);
    shi.assign(static_cast<std::size_t>(L), 0.0);
    slo[static_cast<std::size_t>(L - 1)] = 0.0;
    shi[static_cast<std::size_t>(L - 1)] = 1.0;
    const double w = 1.0 - x;
    for (int i = L - 1; i >= 1; --i) {
        const auto& sv = spine.vertices[static_cast<std::size_t>(i - 1)];
        double blo, bhi;
        branch_sums(sv, x, blo, bhi);
        double sigma = static_cast<double>(sv.branch_count()) + 2.0;
        slo[static_cast<std::size_t>(i - 1)] = w / (sigma - blo - slo[static_cast<std::size_t>(i)]);
        shi[static_cast<std::size_t>(i - 1)] = w / (sigma - bhi - shi[static_cast<std::size_t>(i)]);
    }
}

} // namespace

BoundedGF p_spine_bounds(const SpineSection& spine, double x, int L) {
    check_x(x);
    if (L < 1 || L > spine.length())
        throw std::invalid_argument("p_spine_bounds: need 1 <= L <= spine length");
    std::vector<double> slo, shi;
    spine_pass(spine, x, L, slo, shi);
    return {slo[0], shi[0], L};
}

double r_l_closed(double x, int L) {
    check_x(x);
    if (L < 1) throw std::invalid_argument("r_l_closed: L must be >= 1");
    double sx = std::sqrt(x);
    double lq = std::log1p(-2.0 * sx / (1.0 + sx));     // log((1-sx)/(1+sx))
    double num = -std::expm1(static_cast<double>(L - 1) * lq);   // 1 - q^{L-1}
    double den = -std::expm1(static_cast<double>(L) * lq);       // 1 - q^L
    return (1.0 - x) / (1.0 + sx) * (num / den);
}

double chain_green_closed(double x, int L) {
    check_x(x);
    if (L < 0) throw std::invalid_argument("chain_green_closed: L must be >= 0");
    if (L == 0) return 1.0;
    double sx = std::sqrt(x);
    // a = sqrt(1-x)/(1+sx), q = (1-sx)/(1+sx); G = 2 a^L / (1 + q^L)
    double la = 0.5 * std::log1p(-x) - std::log1p(sx);
    double lq = std::log1p(-2.0 * sx / (1.0 + sx));
    double aL = std::exp(static_cast<double>(L) * la);
    double qL = std::exp(static_cast<double>(L) * lq);
    return 2.0 * aL / (1.0 + qL);
}

double green_finite(const Tree& tree, double x, std::int32_t v) {
    check_x(x);
    if (tree.has_open())
        throw std::invalid_argument("green_finite: tree has unexplored vertices");
    if (v <= 0 || v >= tree.num_vertices())
        throw std::invalid_argument("green_finite: v must be a non-root vertex");
    std::vector<double> plo, phi;
    tree_p_pass(tree, x, plo, phi);
    double prod = 1.0;
    int n = 0;
    for (std::int32_t u = v; u != 0; u = tree.parent(u)) {
        prod *= plo[static_cast<std::size_t>(u)];
        ++n;
    }
    return static_cast<double>(tree.degree(v)) * std::pow(1.0 - x, -0.5 * n) * prod;
}

GreenBounds green_to_spine_vertex(const SpineSection& spine, double x, int n) {
    check_x(x);
    if (n < 1 || n >= spine.length())
        throw std::invalid_argument("green_to_spine_vertex: need 1 <= n < spine length");
    int L = spine.length();
    std::vector<double> slo, shi;
    spine_pass(spine, x, L, slo, shi);
    double sigma = static_cast<double>(spine.vertices[static_cast<std::size_t>(n - 1)].branch_count()) + 2.0;
    double pre = sigma * std::pow(1.0 - x, -0.5 * n);
    double lo = pre, hi = pre;
    for (int k = 0; k < n; ++k) {
        lo *= slo[static_cast<std::size_t>(k)];
        hi *= shi[static_cast<std::size_t>(k)];
    }
    return {lo, hi};
}

bool q_upper_bound_check(double q_upper, double x, int R, std::int64_t ball_edges) {
    if (R < 1 || ball_edges < 1) throw std::invalid_argument("q_upper_bound_check: bad R or ball size");
    return q_upper <= static_cast<double>(R) + 2.0 / (x * static_cast<double>(ball_edges));
}

bool q_upper_bound_check(const Tree& tree, double x, int R) {
    double q = q_from_p(p_finite(tree, x));
    Tree b = ball(tree, R);
    return q_upper_bound_check(q, x, R, b.size());
}

void eval_arena(const NuBallArena& arena, double x, ArenaEval& out, ArenaEvalScratch& scratch) {
    check_x(x);
    std::uint32_t n = arena.num_vertices();
    scratch.plo.assign(n, 0.0);
    scratch.phi.assign(n, 0.0);
    const double w = 1.0 - x;
    for (std::uint32_t v = n - 1; v >= 1; --v) {
        double lo, hi;
        if (!arena.expanded(v)) {
            lo = 0.0;
            hi = 1.0;
        } else {
            std::uint32_t cb = arena.child_begin(v), ce = arena.child_end(v);
            double slo = 0.0, shi = 0.0;
            for (std::uint32_t c = cb; c < ce; ++c) {
                slo += scratch.plo[c];
                shi += scratch.phi[c];
            }
            double m = static_cast<double>(ce - cb);
            lo = w / (1.0 + m - slo);
            hi = w / (1.0 + m - shi);
        }
        scratch.plo[v] = lo;
        scratch.phi[v] = hi;
    }
    out.p_root = {scratch.plo[1], scratch.phi[1]};
    int depth = arena.generated_depth();
    out.spine_sub.resize(static_cast<std::size_t>(depth));
    for (int k = 0; k < depth; ++k) {
        std::uint32_t sv = arena.spine_vertex(k + 1);
        out.spine_sub[static_cast<std::size_t>(k)] = {scratch.plo[sv], scratch.phi[sv]};
    }
}

GreenBounds arena_green(const NuBallArena& arena, const ArenaEval& eval, double x, int n) {
    if (n < 1 || n >= arena.generated_depth())
        throw std::invalid_argument("arena_green: spine vertex not expanded");
    double sigma = static_cast<double>(arena.spine_degree(n));
    double pre = sigma * std::pow(1.0 - x, -0.5 * n);
    double lo = pre, hi = pre;
    for (int k = 0; k < n; ++k) {
        lo *= eval.spine_sub[static_cast<std::size_t>(k)].lo;
        hi *= eval.spine_sub[static_cast<std::size_t>(k)].hi;
    }
    return {lo, hi};
}

} // namespace gentree
