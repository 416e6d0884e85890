// gentree: criticality constants, partition-function coefficients, and Monte
// Carlo exponent estimation for generic random-tree ensembles.
//
// Subcommands:
//   constants  solved criticality data for the configured weight family
//   zn         partition-function coefficients and their asymptotic ratio
//   spectral   Q(x) estimates and the spectral-dimension fit
//   volume     ball-volume means, Hausdorff fit, inverse-volume slope
//   mass       two-point function decay, per-x mass, mass-exponent fit
//   validate   oracle/property suite; exit status reflects the outcome
//
// Every run writes CSV plus a manifest (config, hash, seed, workers). With a
// fixed seed the CSV bytes are identical across runs and worker counts.

#include "gentree/criticality.hpp"
#include "gentree/estimators.hpp"
#include "gentree/run_config.hpp"
#include "gentree/series.hpp"
#include "gentree/validate.hpp"
#include "gentree/walk_gf.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace gentree;

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream f(cfg.out_dir + "/" + name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + cfg.out_dir + "/" + name);
    return f;
}

int cmd_constants(const RunConfig& cfg) {
    CriticalData crit = family_crit(cfg);
    std::printf("family        %s\n", cfg.family.c_str());
    std::printf("Z0            %s\n", format_double(crit.z0).c_str());
    std::printf("zeta0         %s\n", format_double(crit.zeta0).c_str());
    std::printf("f''(1)        %s\n", format_double(crit.fpp1).c_str());
    std::printf("divisor d     %d\n", crit.divisor_d);
    if (crit.divisor_d > 1)
        std::printf("note          Z_N = 0 unless N = 1 mod %d\n", crit.divisor_d);
    std::printf("generic       %s\n", crit.z0 < crit.spec.rho ? "yes" : "no");
    std::printf("offspring p_n (tail cut at %s):\n", format_double(crit.tail_mass_tol).c_str());
    for (std::size_t n = 0; n < crit.offspring.size() && n < 16; ++n)
        std::printf("  p_%-3zu %s\n", n, format_double(crit.offspring[n]).c_str());
    if (crit.offspring.size() > 16)
        std::printf("  ... (%zu entries)\n", crit.offspring.size());
    auto csv = open_out(cfg, "constants.csv");
    csv << "n,p_n\n";
    for (std::size_t n = 0; n < crit.offspring.size(); ++n)
        csv << n << "," << format_double(crit.offspring[n]) << "\n";
    write_manifest(cfg, "constants", {"constants.csv"}, "ok");
    return 0;
}

int cmd_zn(const RunConfig& cfg) {
    WeightSpec spec = family_spec(cfg);
    CriticalData crit = family_crit(cfg);
    auto zn = partition_coeffs(spec, crit, cfg.zn_nmax);
    auto zs = partition_coeffs_scaled(spec, crit, cfg.zn_nmax);
    auto csv = open_out(cfg, "zn.csv");
    csv << "N,Z_N,Z_N_scaled,asymptotic_ratio\n";
    for (int n = 1; n <= cfg.zn_nmax; ++n) {
        csv << n << "," << format_double(zn[static_cast<std::size_t>(n - 1)]) << ","
            << format_double(zs[static_cast<std::size_t>(n - 1)]) << ",";
        if ((n - 1) % crit.divisor_d == 0)
            csv << format_double(zn_asymptotic_ratio(crit, zs, n));
        csv << "\n";
    }
    if ((cfg.zn_nmax - 1) % crit.divisor_d == 0)
        std::printf("Z_N ratio at N=%d: %s\n", cfg.zn_nmax,
                    format_double(zn_asymptotic_ratio(crit, zs, cfg.zn_nmax)).c_str());
    write_manifest(cfg, "zn", {"zn.csv"}, "ok");
    return 0;
}

void write_records_csv(std::ofstream& csv, const char* abscissa_name, const char* mean_name,
                       const std::vector<EstimateRecord>& records) {
    csv << abscissa_name << "," << mean_name << ",stderr,bracket_residual,n_samples,censored\n";
    for (const auto& r : records)
        csv << format_double(r.abscissa) << "," << format_double(r.mean) << ","
            << format_double(r.stderr_) << "," << format_double(r.bracket_residual) << ","
            << r.n_samples << "," << r.censored << "\n";
}

void warn_flagged(const char* what, const std::vector<EstimateRecord>& records) {
    for (const auto& r : records)
        if (r.censored * 100 > r.n_samples)
            std::fprintf(stderr, "warning: %s point %s flagged: %zu/%zu samples censored\n", what,
                         format_double(r.abscissa).c_str(), r.censored, r.n_samples);
}

McOptions mc_options(const RunConfig& cfg, std::size_t n_samples) {
    McOptions o;
    o.n_samples = n_samples;
    o.seed = cfg.seed;
    o.workers = cfg.workers;
    o.bracket_tol = cfg.bracket_tol;
    return o;
}

int cmd_spectral(const RunConfig& cfg) {
    CriticalData crit = family_crit(cfg);
    SamplerTables tables(crit);
    std::vector<EstimateRecord> mean_field;
    auto records =
        estimate_q(tables, cfg.spectral_x, mc_options(cfg, cfg.spectral_samples), &mean_field);
    {
        auto csv = open_out(cfg, "spectral.csv");
        write_records_csv(csv, "x", "Q_mean", records);
        warn_flagged("spectral", records);
        // exploratory companion: <1 - P> for the mean-field comparison
        auto mcsv = open_out(cfg, "spectral_meanfield.csv");
        write_records_csv(mcsv, "x", "one_minus_p_mean", mean_field);
    }
    FitResult fit;
    try {
        fit = fit_spectral(records);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "spectral fit failed: %s\n", e.what());
        write_manifest(cfg, "spectral", {"spectral.csv", "spectral_meanfield.csv"},
                       std::string("failed: ") + e.what());
        return 1;
    }
    double ds = 2.0 - 2.0 * fit.exponent;
    double ds_se = 2.0 * fit.exponent_stderr;
    auto fcsv = open_out(cfg, "spectral_fit.csv");
    fcsv << "alpha,alpha_stderr,d_s,d_s_stderr,x_min,x_max,residual_diagnostic\n";
    fcsv << format_double(fit.exponent) << "," << format_double(fit.exponent_stderr) << ","
         << format_double(ds) << "," << format_double(ds_se) << ","
         << format_double(fit.window_lo) << "," << format_double(fit.window_hi) << ","
         << format_double(fit.residual_diagnostic) << "\n";
    std::printf("alpha = %.4f +- %.4f    d_s = %.4f +- %.4f\n", fit.exponent,
                fit.exponent_stderr, ds, ds_se);
    write_manifest(cfg, "spectral", {"spectral.csv", "spectral_meanfield.csv", "spectral_fit.csv"},
                   "ok");
    return 0;
}

int cmd_volume(const RunConfig& cfg) {
    CriticalData crit = family_crit(cfg);
    SamplerTables tables(crit);
    VolumeResult vr = estimate_volume(tables, cfg.volume_r, mc_options(cfg, cfg.volume_samples));
    auto csv = open_out(cfg, "volume.csv");
    csv << "R,mean_ball,stderr,inv_mean,inv_stderr,n_samples,censored\n";
    for (std::size_t i = 0; i < vr.mean_records.size(); ++i) {
        const auto& m = vr.mean_records[i];
        const auto& v = vr.inv_records[i];
        csv << format_double(m.abscissa) << "," << format_double(m.mean) << ","
            << format_double(m.stderr_) << "," << format_double(v.mean) << ","
            << format_double(v.stderr_) << "," << m.n_samples << "," << m.censored << "\n";
    }
    std::printf("d_h = %.4f +- %.4f    inverse-volume slope = %.4f +- %.4f\n",
                vr.dh_fit.exponent, vr.dh_fit.exponent_stderr, vr.inv_fit.exponent,
                vr.inv_fit.exponent_stderr);
    write_manifest(cfg, "volume", {"volume.csv"}, "ok");
    return 0;
}

int cmd_mass(const RunConfig& cfg) {
    CriticalData crit = family_crit(cfg);
    SamplerTables tables(crit);
    MassResult mr = estimate_mass(tables, cfg.mass_x, cfg.mass_n,
                                  mc_options(cfg, cfg.mass_samples), cfg.mass_transient_cut);
    auto csv = open_out(cfg, "mass.csv");
    csv << "x,n,Q_mean,stderr,bracket_residual,n_samples,censored\n";
    for (std::size_t xi = 0; xi < mr.x_grid.size(); ++xi)
        for (const auto& r : mr.records[xi])
            csv << format_double(mr.x_grid[xi]) << "," << format_double(r.abscissa) << ","
                << format_double(r.mean) << "," << format_double(r.stderr_) << ","
                << format_double(r.bracket_residual) << "," << r.n_samples << "," << r.censored
                << "\n";
    auto fcsv = open_out(cfg, "mass_fit.csv");
    fcsv << "x,m_hat,m_stderr,n_window_lo,n_window_hi,residual_diagnostic\n";
    for (std::size_t xi = 0; xi < mr.x_grid.size(); ++xi) {
        const auto& f = mr.mass_fits[xi];
        fcsv << format_double(mr.x_grid[xi]) << "," << format_double(f.exponent) << ","
             << format_double(f.exponent_stderr) << "," << format_double(f.window_lo) << ","
             << format_double(f.window_hi) << "," << format_double(f.residual_diagnostic) << "\n";
        std::printf("x = %-12s m = %.5f +- %.5f\n", format_double(mr.x_grid[xi]).c_str(),
                    f.exponent, f.exponent_stderr);
    }
    std::printf("mass exponent = %.4f +- %.4f\n", mr.exponent_fit.exponent,
                mr.exponent_fit.exponent_stderr);
    bool fit_ok = std::isfinite(mr.exponent_fit.exponent);
    write_manifest(cfg, "mass", {"mass.csv", "mass_fit.csv"},
                   fit_ok ? "ok" : "failed: mass exponent fit did not resolve");
    return fit_ok ? 0 : 1;
}

int cmd_validate(const RunConfig& cfg) {
    ValidateOptions vo;
    vo.seed = cfg.seed;
    vo.workers = cfg.workers;
    auto results = run_validation_suite(vo);
    std::size_t failed = 0;
    auto csv = open_out(cfg, "validate.csv");
    csv << "check,status,detail\n";
    for (const auto& r : results) {
        if (!r.pass) ++failed;
        std::printf("[%s] %-44s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        csv << r.name << "," << (r.pass ? "pass" : "fail") << ",\"" << r.detail << "\"\n";
    }
    std::printf("%zu/%zu checks passed\n", results.size() - failed, results.size());
    write_manifest(cfg, "validate", {"validate.csv"}, failed == 0 ? "ok" : "failed");
    return failed == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"generic random-tree ensembles: constants, samplers, exponents"};
    app.require_subcommand(1);

    std::string config_path;
    std::string family;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = -1;
    std::string out_dir;

    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--family", family, "weight family: uniform | binary | halfline");
    app.add_option("--seed", seed, "master RNG seed")->each([&](const std::string&) { seed_set = true; });
    app.add_option("--workers", workers, "worker threads (0 = all cores)");
    app.add_option("--out", out_dir, "output directory");

    auto* c_constants = app.add_subcommand("constants", "criticality constants");
    auto* c_zn = app.add_subcommand("zn", "partition-function coefficients");
    auto* c_spectral = app.add_subcommand("spectral", "return-probability exponent");
    auto* c_volume = app.add_subcommand("volume", "ball-volume growth");
    auto* c_mass = app.add_subcommand("mass", "two-point function decay");
    auto* c_validate = app.add_subcommand("validate", "oracle and property suite");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        if (!family.empty()) cfg.family = family;
        if (seed_set) cfg.seed = seed;
        if (workers >= 0) cfg.workers = workers;
        if (!out_dir.empty()) cfg.out_dir = out_dir;

        if (c_constants->parsed()) return cmd_constants(cfg);
        if (c_zn->parsed()) return cmd_zn(cfg);
        if (c_spectral->parsed()) return cmd_spectral(cfg);
        if (c_volume->parsed()) return cmd_volume(cfg);
        if (c_mass->parsed()) return cmd_mass(cfg);
        if (c_validate->parsed()) return cmd_validate(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
