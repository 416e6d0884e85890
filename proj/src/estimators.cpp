#include "gentree/estimators.hpp"

#include "gentree/walk_gf.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace gentree {

namespace {

int resolve_workers(int workers) {
    if (workers > 0) return workers;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs body(chunk_index, begin, end) over samples [0, n) in fixed chunks.
// Threads race for chunk indices but every chunk's state is its own, so the
// final in-order merge is bit-stable for any worker count.
template <typename Body>
void run_chunked(std::size_t n_samples, const McOptions& opts, const Body& body) {
    std::size_t chunk = std::max<std::size_t>(1, opts.chunk);
    std::size_t n_chunks = (n_samples + chunk - 1) / chunk;
    int workers = std::min<int>(resolve_workers(opts.workers), static_cast<int>(std::max<std::size_t>(1, n_chunks)));
    if (workers <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c)
            body(c, c * chunk, std::min(n_samples, (c + 1) * chunk));
        return;
    }
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) break;
            body(c, c * chunk, std::min(n_samples, (c + 1) * chunk));
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
}

struct PointAcc {
    MeanAccumulator acc;
    double residual_sum = 0.0;
    std::size_t censored = 0;

    void merge(const PointAcc& o) {
        acc.merge(o.acc);
        residual_sum += o.residual_sum;
        censored += o.censored;
    }
};

EstimateRecord to_record(double abscissa, const PointAcc& a) {
    EstimateRecord r;
    r.abscissa = abscissa;
    r.mean = a.acc.mean;
    r.stderr_ = a.acc.stderr_of_mean();
    r.n_samples = a.acc.n;
    r.censored = a.censored;
    r.bracket_residual = a.acc.n ? a.residual_sum / static_cast<double>(a.acc.n) : 0.0;
    return r;
}

int depth_limit(double x) {
    return static_cast<int>(std::ceil(16.0 / std::sqrt(x))) + 2;
}

QBracketResult adaptive_q(NuBallArena& arena, const SamplerTables& tables, double x,
                          ArenaEval& eval, ArenaEvalScratch& scratch,
                          double tol, std::int64_t max_vertices, int min_depth) {
    const double q_cap = 1.0 / std::sqrt(x);    // pathwise Q <= x^{-1/2}
    int limit = std::max(depth_limit(x), min_depth);
    int depth = std::max({arena.generated_depth(), min_depth, 8});
    QBracketResult out;
    for (;;) {
        arena.extend(tables, depth, max_vertices);
        eval_arena(arena, x, eval, scratch);
        out.p_mid = 0.5 * (eval.p_root.lo + eval.p_root.hi);
        out.lo = 1.0 / (1.0 - eval.p_root.lo);
        out.hi = eval.p_root.hi < 1.0 ? 1.0 / (1.0 - eval.p_root.hi) : q_cap;
        out.hi = std::min(out.hi, q_cap);
        out.lo = std::min(out.lo, out.hi);
        out.depth = arena.generated_depth();
        double mid = 0.5 * (out.lo + out.hi);
        if (out.hi - out.lo <= tol * mid) {
            out.converged = true;
            return out;
        }
        if (depth >= limit || arena.censored()) return out;
        depth = std::min(2 * depth, limit);
    }
}

// Point estimate q_from_p(P-bracket midpoint), clamped into the certified
// Q bracket, and the worst-case offset from it to anywhere in the bracket.
double q_point_estimate(const QBracketResult& q, double* residual) {
    double est = std::clamp(1.0 / (1.0 - std::min(q.p_mid, 1.0 - 1e-300)), q.lo, q.hi);
    *residual = std::max(est - q.lo, q.hi - est);
    return est;
}

} // namespace

QBracketResult q_bracket_adaptive(NuBallArena& arena, const SamplerTables& tables, double x,
                                  double tol, std::int64_t max_vertices, int min_depth) {
    ArenaEval eval;
    ArenaEvalScratch scratch;
    return adaptive_q(arena, tables, x, eval, scratch, tol, max_vertices, min_depth);
}

std::vector<EstimateRecord> estimate_q(const SamplerTables& tables,
                                       const std::vector<double>& x_grid,
                                       const McOptions& opts,
                                       std::vector<EstimateRecord>* mean_field) {
    for (double x : x_grid)
        if (!(x > 0.0) || x > 1.0) throw std::domain_error("estimate_q: x must be in (0,1]");
    if (opts.n_samples < 1) throw std::invalid_argument("estimate_q: need samples");

    // Shared tree samples across the grid; deepest (smallest x) last.
    std::vector<std::size_t> order(x_grid.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return x_grid[a] > x_grid[b]; });

    std::size_t chunk = std::max<std::size_t>(1, opts.chunk);
    std::size_t n_chunks = (opts.n_samples + chunk - 1) / chunk;
    std::vector<std::vector<PointAcc>> states(n_chunks, std::vector<PointAcc>(x_grid.size()));
    std::vector<std::vector<PointAcc>> mf_states(
        mean_field ? n_chunks : 0, std::vector<PointAcc>(x_grid.size()));

    run_chunked(opts.n_samples, opts, [&](std::size_t c, std::size_t begin, std::size_t end) {
        NuBallArena arena;
        ArenaEval eval;
        ArenaEvalScratch scratch;
        auto& st = states[c];
        for (std::size_t j = begin; j < end; ++j) {
            arena.reset(tables, RngStream(opts.seed, j));
            for (std::size_t oi : order) {
                double x = x_grid[oi];
                auto& pa = st[oi];
                if (x == 1.0) {
                    pa.acc.add(1.0);   // only the trivial walk survives
                    if (mean_field) mf_states[c][oi].acc.add(1.0);
                    continue;
                }
                QBracketResult q = adaptive_q(arena, tables, x, eval, scratch,
                                              opts.bracket_tol, opts.max_vertices, 0);
                double resid = 0.0;
                pa.acc.add(q_point_estimate(q, &resid));
                pa.residual_sum += resid;
                if (!q.converged) ++pa.censored;
                if (mean_field) {
                    // 1 - P bracket: Q = 1/(1-P), so 1-P = 1/Q with ends swapped
                    double lo = 1.0 / q.hi, hi = 1.0 / q.lo;
                    auto& ma = mf_states[c][oi];
                    ma.acc.add(0.5 * (lo + hi));
                    ma.residual_sum += 0.5 * (hi - lo);
                    if (!q.converged) ++ma.censored;
                }
            }
        }
    });

    std::vector<PointAcc> total(x_grid.size());
    for (const auto& st : states)
        for (std::size_t i = 0; i < total.size(); ++i) total[i].merge(st[i]);
    std::vector<EstimateRecord> out;
    out.reserve(x_grid.size());
    for (std::size_t i = 0; i < x_grid.size(); ++i) out.push_back(to_record(x_grid[i], total[i]));
    if (mean_field) {
        std::vector<PointAcc> mt(x_grid.size());
        for (const auto& st : mf_states)
            for (std::size_t i = 0; i < mt.size(); ++i) mt[i].merge(st[i]);
        mean_field->clear();
        for (std::size_t i = 0; i < x_grid.size(); ++i)
            mean_field->push_back(to_record(x_grid[i], mt[i]));
    }
    return out;
}

namespace {

FitResult loglog_fit(const std::vector<double>& xs, const std::vector<double>& ys,
                     const std::vector<double>& sigmas) {
    std::vector<double> lx, ly, w;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(ys[i] > 0)) continue;
        lx.push_back(std::log(xs[i]));
        ly.push_back(std::log(ys[i]));
        double slog = std::max(sigmas[i] / ys[i], 1e-12);
        w.push_back(1.0 / (slog * slog));
    }
    LinFit f = weighted_linear_fit(lx, ly, w);
    FitResult out;
    out.exponent = f.slope;
    out.exponent_stderr = f.slope_se;
    auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
    out.window_lo = *mn;
    out.window_hi = *mx;
    out.residual_diagnostic = f.n > 2 ? std::sqrt(f.chi2 / static_cast<double>(f.n - 2)) : 0.0;
    return out;
}

} // namespace

FitResult fit_spectral(const std::vector<EstimateRecord>& records) {
    if (records.size() < 4) throw std::invalid_argument("fit_spectral: need >= 4 grid points");
    double mn = records[0].abscissa, mx = records[0].abscissa;
    std::vector<double> xs, ys, ss;
    for (const auto& r : records) {
        mn = std::min(mn, r.abscissa);
        mx = std::max(mx, r.abscissa);
        xs.push_back(r.abscissa);
        ys.push_back(r.mean);
        ss.push_back(r.total_uncertainty());
    }
    if (mx / mn < 100.0) throw std::invalid_argument("fit_spectral: grid must span >= 2 decades");
    FitResult f = loglog_fit(xs, ys, ss);
    f.exponent = -f.exponent;   // Q ~ x^{-alpha}
    return f;
}

VolumeResult estimate_volume(const SamplerTables& tables,
                             const std::vector<int>& r_grid,
                             const McOptions& opts) {
    if (r_grid.empty()) throw std::invalid_argument("estimate_volume: empty R grid");
    for (int r : r_grid)
        if (r < 1) throw std::invalid_argument("estimate_volume: R must be >= 1");
    int r_max = *std::max_element(r_grid.begin(), r_grid.end());

    std::size_t chunk = std::max<std::size_t>(1, opts.chunk);
    std::size_t n_chunks = (opts.n_samples + chunk - 1) / chunk;
    struct VolAcc {
        std::vector<PointAcc> mean_a, inv_a;
    };
    std::vector<VolAcc> states(n_chunks);
    for (auto& s : states) {
        s.mean_a.resize(r_grid.size());
        s.inv_a.resize(r_grid.size());
    }

    run_chunked(opts.n_samples, opts, [&](std::size_t c, std::size_t begin, std::size_t end) {
        NuBallArena arena;
        auto& st = states[c];
        for (std::size_t j = begin; j < end; ++j) {
            arena.reset(tables, RngStream(opts.seed, j));
            arena.extend(tables, r_max, opts.max_vertices);
            for (std::size_t ri = 0; ri < r_grid.size(); ++ri) {
                if (r_grid[ri] > arena.generated_depth()) {
                    ++st.mean_a[ri].censored;
                    ++st.inv_a[ri].censored;
                    continue;
                }
                auto edges = static_cast<double>(arena.ball_edges(r_grid[ri]));
                st.mean_a[ri].acc.add(edges);
                st.inv_a[ri].acc.add(1.0 / edges);
            }
        }
    });

    VolumeResult out;
    std::vector<PointAcc> tm(r_grid.size()), ti(r_grid.size());
    for (const auto& st : states)
        for (std::size_t i = 0; i < r_grid.size(); ++i) {
            tm[i].merge(st.mean_a[i]);
            ti[i].merge(st.inv_a[i]);
        }
    std::vector<double> xs, ym, sm, yi, si;
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        out.mean_records.push_back(to_record(r_grid[i], tm[i]));
        out.inv_records.push_back(to_record(r_grid[i], ti[i]));
        xs.push_back(static_cast<double>(r_grid[i]));
        ym.push_back(out.mean_records.back().mean);
        sm.push_back(out.mean_records.back().total_uncertainty());
        yi.push_back(out.inv_records.back().mean);
        si.push_back(out.inv_records.back().total_uncertainty());
    }
    out.dh_fit = loglog_fit(xs, ym, sm);
    out.inv_fit = loglog_fit(xs, yi, si);
    return out;
}

MassResult estimate_mass(const SamplerTables& tables,
                         const std::vector<double>& x_grid,
                         std::vector<int> n_grid,
                         const McOptions& opts,
                         int transient_cut) {
    for (double x : x_grid)
        if (!(x > 0.0) || x >= 1.0) throw std::domain_error("estimate_mass: x must be in (0,1)");
    if (x_grid.empty()) throw std::invalid_argument("estimate_mass: empty x grid");

    // Decay window per x: the mass scale is x^{1/3}, so n up to ~5 x^{-1/3}
    // resolves a few e-foldings past the transient.
    auto n_upper = [&](double x) {
        return transient_cut + 2 + static_cast<int>(std::ceil(4.5 * std::pow(x, -1.0 / 3.0)));
    };
    if (n_grid.empty()) {
        int top = 0;
        for (double x : x_grid) top = std::max(top, n_upper(x));
        for (int n = 1; n <= top; ++n) n_grid.push_back(n);
    }
    std::sort(n_grid.begin(), n_grid.end());
    int n_top = n_grid.back();

    std::vector<std::size_t> order(x_grid.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return x_grid[a] > x_grid[b]; });

    std::size_t chunk = std::max<std::size_t>(1, opts.chunk);
    std::size_t n_chunks = (opts.n_samples + chunk - 1) / chunk;
    std::vector<std::vector<std::vector<PointAcc>>> states(
        n_chunks, std::vector<std::vector<PointAcc>>(x_grid.size(),
                                                     std::vector<PointAcc>(n_grid.size())));

    run_chunked(opts.n_samples, opts, [&](std::size_t c, std::size_t begin, std::size_t end) {
        NuBallArena arena;
        ArenaEval eval;
        ArenaEvalScratch scratch;
        auto& st = states[c];
        for (std::size_t j = begin; j < end; ++j) {
            arena.reset(tables, RngStream(opts.seed, j));
            for (std::size_t oi : order) {
                double x = x_grid[oi];
                int nup = std::min(n_top, n_upper(x));
                // Bracket target at the deepest n used for this x.
                QBracketResult q = adaptive_q(arena, tables, x, eval, scratch,
                                              opts.bracket_tol, opts.max_vertices, nup + 8);
                bool bad = !q.converged;
                for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
                    int n = n_grid[ni];
                    if (n >= arena.generated_depth()) {
                        ++st[oi][ni].censored;
                        continue;
                    }
                    GreenBounds g = arena_green(arena, eval, x, n);
                    double lo = q.lo * g.lower, hi = q.hi * g.upper;
                    st[oi][ni].acc.add(0.5 * (lo + hi));
                    st[oi][ni].residual_sum += 0.5 * (hi - lo);
                    if (bad) ++st[oi][ni].censored;
                }
            }
        }
    });

    MassResult out;
    out.x_grid = x_grid;
    out.n_grid = n_grid;
    out.records.resize(x_grid.size());
    std::vector<double> m_sigma(x_grid.size());
    for (std::size_t xi = 0; xi < x_grid.size(); ++xi) {
        std::vector<PointAcc> tot(n_grid.size());
        for (const auto& st : states)
            for (std::size_t ni = 0; ni < n_grid.size(); ++ni) tot[ni].merge(st[xi][ni]);
        for (std::size_t ni = 0; ni < n_grid.size(); ++ni)
            out.records[xi].push_back(to_record(n_grid[ni], tot[ni]));

        // -log Q(x;n) vs n, weighted, over [transient_cut, n_upper(x)].
        int nup = std::min(n_top, n_upper(x_grid[xi]));
        std::vector<double> ns, ys, ws;
        for (const auto& r : out.records[xi]) {
            int n = static_cast<int>(r.abscissa);
            if (n < transient_cut || n > nup) continue;
            if (!(r.mean > 0) || r.mean <= 3.0 * r.total_uncertainty()) continue;
            double slog = std::max(r.total_uncertainty() / r.mean, 1e-12);
            ns.push_back(r.abscissa);
            ys.push_back(-std::log(r.mean));
            ws.push_back(1.0 / (slog * slog));
        }
        FitResult mf;
        if (ns.size() >= 3) {
            LinFit f = weighted_linear_fit(ns, ys, ws);
            mf.exponent = f.slope;
            mf.exponent_stderr = f.slope_se;
            mf.window_lo = ns.front();
            mf.window_hi = ns.back();
            mf.residual_diagnostic = f.n > 2 ? std::sqrt(f.chi2 / static_cast<double>(f.n - 2)) : 0.0;
        } else {
            mf.exponent = std::numeric_limits<double>::quiet_NaN();
        }
        out.mass_fits.push_back(mf);
        out.m_hat.push_back(mf.exponent);
        m_sigma[xi] = std::max(mf.exponent_stderr, 1e-12 * std::fabs(mf.exponent));
    }

    // log m(x) vs log x.
    std::vector<double> xs, ms, ss;
    for (std::size_t xi = 0; xi < x_grid.size(); ++xi) {
        if (!(out.m_hat[xi] > 0)) continue;
        xs.push_back(x_grid[xi]);
        ms.push_back(out.m_hat[xi]);
        ss.push_back(m_sigma[xi]);
    }
    if (xs.size() >= 2) out.exponent_fit = loglog_fit(xs, ms, ss);
    else out.exponent_fit.exponent = std::numeric_limits<double>::quiet_NaN();
    return out;
}

TailReport tail_checks(const SamplerTables& tables, int R,
                       const std::vector<double>& lambda_grid,
                       const McOptions& opts) {
    if (R < 2) throw std::invalid_argument("tail_checks: R must be >= 2");
    TailReport rep;
    rep.R = R;
    rep.lambda = lambda_grid;
    std::sort(rep.lambda.begin(), rep.lambda.end());
    rep.hits.assign(rep.lambda.size(), 0);

    double r2 = static_cast<double>(R) * static_cast<double>(R);

    std::size_t chunk = std::max<std::size_t>(1, opts.chunk);
    std::size_t n_chunks = (opts.n_samples + chunk - 1) / chunk;
    std::vector<std::vector<std::size_t>> hit_states(n_chunks,
                                                     std::vector<std::size_t>(rep.lambda.size(), 0));
    run_chunked(opts.n_samples, opts, [&](std::size_t c, std::size_t begin, std::size_t end) {
        NuBallArena arena;
        auto& hits = hit_states[c];
        for (std::size_t j = begin; j < end; ++j) {
            arena.reset(tables, RngStream(opts.seed, j));
            arena.extend(tables, R, opts.max_vertices);
            if (arena.generated_depth() < R) continue;
            auto edges = static_cast<double>(arena.ball_edges(R));
            for (std::size_t li = 0; li < rep.lambda.size(); ++li)
                if (edges < rep.lambda[li] * r2) ++hits[li];
        }
    });
    for (const auto& h : hit_states)
        for (std::size_t li = 0; li < rep.lambda.size(); ++li) rep.hits[li] += h[li];
    rep.prob.resize(rep.lambda.size());
    for (std::size_t li = 0; li < rep.lambda.size(); ++li)
        rep.prob[li] = static_cast<double>(rep.hits[li]) / static_cast<double>(opts.n_samples);

    std::vector<double> ax, ay;
    for (std::size_t li = 0; li < rep.lambda.size(); ++li) {
        if (rep.hits[li] < 20) continue;
        ax.push_back(1.0 / std::sqrt(rep.lambda[li]));
        ay.push_back(std::log(rep.prob[li]));
    }
    if (ax.size() >= 3) {
        std::vector<double> w(ax.size(), 1.0);
        LinFit f = weighted_linear_fit(ax, ay, w);
        rep.slope = f.slope;
        rep.correlation = pearson_correlation(ax, ay);
    }

    // Y_R tail: branch ball volume at one spine vertex, radii R/4, R/2, R.
    rep.y_radii = {std::max(1, R / 4), std::max(1, R / 2), R};
    std::vector<std::vector<std::int64_t>> ys(rep.y_radii.size());
    for (std::size_t ri = 0; ri < rep.y_radii.size(); ++ri) {
        int rr = rep.y_radii[ri];
        ys[ri].resize(opts.n_samples);
        run_chunked(opts.n_samples, opts, [&](std::size_t, std::size_t begin, std::size_t end) {
            for (std::size_t j = begin; j < end; ++j) {
                RngStream rng(opts.seed ^ (0x9E3779B97F4A7C15ull + ri), j);
                auto m = tables.sample_branch_total(rng);
                std::int64_t y = 0;
                for (std::uint32_t b = 0; b < m; ++b) {
                    Tree t = sample_gw(tables, rng, rr);
                    y += t.size();
                }
                ys[ri][j] = y;
            }
        });
    }
    // Grid search c': maximize the worst R' * P(Y >= c' R'^2).
    double best_score = -1.0;
    for (int ci = 1; ci <= 40; ++ci) {
        double c = 0.05 * ci;
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t ri = 0; ri < rep.y_radii.size(); ++ri) {
            double rr = static_cast<double>(rep.y_radii[ri]);
            std::size_t h = 0;
            for (auto y : ys[ri])
                if (static_cast<double>(y) >= c * rr * rr) ++h;
            worst = std::min(worst, rr * static_cast<double>(h) / static_cast<double>(opts.n_samples));
        }
        if (worst > best_score) {
            best_score = worst;
            rep.c_prime = c;
        }
    }
    rep.y_scaled.resize(rep.y_radii.size());
    rep.y_hits.assign(rep.y_radii.size(), 0);
    for (std::size_t ri = 0; ri < rep.y_radii.size(); ++ri) {
        double rr = static_cast<double>(rep.y_radii[ri]);
        std::size_t h = 0;
        for (auto y : ys[ri])
            if (static_cast<double>(y) >= rep.c_prime * rr * rr) ++h;
        rep.y_hits[ri] = h;
        rep.y_scaled[ri] = rr * static_cast<double>(h) / static_cast<double>(opts.n_samples);
    }
    return rep;
}

} // namespace gentree
