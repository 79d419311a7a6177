#ifndef ERGOPT_CLI_HPP
#define ERGOPT_CLI_HPP

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "ergopt/config.hpp"
#include "ergopt/dadic.hpp"
#include "ergopt/hfamily.hpp"
#include "ergopt/linearize.hpp"
#include "ergopt/optimize.hpp"
#include "ergopt/stats.hpp"

namespace ergopt::cli {

inline constexpr const char* version = "0.1.0";

/// Minimal CSV emitter: header row, '.' decimal separator, %.17g doubles,
/// newline-terminated. Identical inputs give byte-identical files.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
        : out_(path) {
        if (!out_) throw std::runtime_error("cannot open " + path.string());
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) out_ << ',';
            out_ << header[i];
        }
        out_ << '\n';
    }

    template <typename... Cells>
    void row(const Cells&... cells) {
        bool first = true;
        ((write_cell(cells, first), first = false), ...);
        out_ << '\n';
    }

private:
    void write_cell(double v, bool first) {
        if (!first) out_ << ',';
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out_ << buf;
    }
    void write_cell(int v, bool first) {
        if (!first) out_ << ',';
        out_ << v;
    }
    void write_cell(std::uint64_t v, bool first) {
        if (!first) out_ << ',';
        out_ << v;
    }
    void write_cell(const std::string& v, bool first) {
        if (!first) out_ << ',';
        out_ << v;
    }
    void write_cell(const char* v, bool first) {
        if (!first) out_ << ',';
        out_ << v;
    }

    std::ofstream out_;
};

inline void write_manifest(const std::filesystem::path& dir, const std::string& command,
                           const RunConfig& cfg) {
    std::ofstream out(dir / "manifest.txt");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(config_hash(cfg)));
    out << "command = " << command << "\n"
        << "config_hash = " << buf << "\n"
        << "seed = " << cfg.seed << "\n"
        << "version = " << version << "\n";
}

namespace detail {

struct Instance {
    ExpandingMap map;
    Potential potential;
};

inline Instance make_instance(const RunConfig& cfg) {
    ExpandingMap map = build_map(cfg);
    Potential f = build_potential(cfg, map);
    return {std::move(map), std::move(f)};
}

inline double auto_epsilon(const RunConfig& cfg, const SubActionGrid& sub) {
    if (cfg.epsilon > sub.defect) return cfg.epsilon;
    return std::max(10.0 * std::max(sub.defect, 0.0), 1e-4);
}

inline std::vector<DadicInt> scan_words(const RunConfig& cfg) {
    Rng rng = Rng::substream(cfg.seed, "scan-words");
    return default_scan_words(cfg.degree, cfg.depth_k, rng, cfg.scan_random_words);
}

}  // namespace detail

inline int cmd_beta(const RunConfig& cfg, const std::filesystem::path& out) {
    const auto inst = detail::make_instance(cfg);
    const BetaResult enumd =
        beta_periodic(inst.map, inst.potential, cfg.p_max, cfg.tol_orbit);
    const SubActionGrid sub = lax_oleinik(inst.map, inst.potential, cfg.grid_subaction,
                                          cfg.lo_max_iter, cfg.tol_lo);
    {
        CsvWriter csv(out / "beta.csv", {"method", "beta"});
        csv.row("enumeration", enumd.beta_lower);
        csv.row("lax_oleinik", sub.beta);
        csv.row("disagreement", std::fabs(enumd.beta_lower - sub.beta));
    }
    {
        CsvWriter csv(out / "argmax_orbit.csv", {"index", "x"});
        for (std::size_t j = 0; j < enumd.argmax.orbit.size(); ++j)
            csv.row(static_cast<int>(j), enumd.argmax.orbit[j]);
    }
    std::printf("beta(enumeration) = %.12g, beta(lax-oleinik) = %.12g, period %d\n",
                enumd.beta_lower, sub.beta,
                static_cast<int>(enumd.argmax.word.size()));
    return 0;
}

inline int cmd_subaction(const RunConfig& cfg, const std::filesystem::path& out) {
    const auto inst = detail::make_instance(cfg);
    const SubActionGrid sub = lax_oleinik(inst.map, inst.potential, cfg.grid_subaction,
                                          cfg.lo_max_iter, cfg.tol_lo);
    CsvWriter csv(out / "subaction.csv", {"x", "g", "defect"});
    for (int j = 0; j < sub.n_grid; ++j)
        csv.row(sub.grid_point(j), sub.g_values[static_cast<std::size_t>(j)],
                sub.defect_values[static_cast<std::size_t>(j)]);
    std::printf("beta = %.12g, defect = %.3g, iterations = %d%s\n", sub.beta,
                sub.defect, sub.iteration_count,
                sub.converged ? "" : " (not converged)");
    return sub.converged ? 0 : 3;
}

inline int cmd_levelset(const RunConfig& cfg, const std::filesystem::path& out) {
    const auto inst = detail::make_instance(cfg);
    const SubActionGrid sub = lax_oleinik(inst.map, inst.potential, cfg.grid_subaction,
                                          cfg.lo_max_iter, cfg.tol_lo);
    const LevelSet ls = level_set(sub, detail::auto_epsilon(cfg, sub));
    CsvWriter csv(out / "levelset.csv", {"lo", "hi"});
    for (const auto& [lo, hi] : ls.intervals) csv.row(lo, hi);
    std::printf("epsilon = %.3g, intervals = %d, total length = %.6g\n", ls.epsilon,
                static_cast<int>(ls.intervals.size()), ls.total_length());
    return 0;
}

inline int cmd_entropy(const RunConfig& cfg, const std::filesystem::path& out) {
    const auto inst = detail::make_instance(cfg);
    const SubActionGrid sub = lax_oleinik(inst.map, inst.potential, cfg.grid_subaction,
                                          cfg.lo_max_iter, cfg.tol_lo);
    const LevelSet ls = level_set(sub, detail::auto_epsilon(cfg, sub));
    CsvWriter csv(out / "entropy.csv", {"n", "cylinders", "bound"});
    for (int n = 2; n <= cfg.entropy_depth; n += 2) {
        const EntropyEstimate est = entropy_upper_bound(inst.map, ls, n);
        csv.row(est.depth, est.cylinder_count, est.bound);
        if (n == cfg.entropy_depth)
            std::printf("depth %d: %llu cylinders, entropy bound %.6g\n", n,
                        static_cast<unsigned long long>(est.cylinder_count),
                        est.bound);
    }
    return 0;
}

inline int cmd_hfam(const RunConfig& cfg, const std::filesystem::path& out) {
    const auto inst = detail::make_instance(cfg);
    const auto words = detail::scan_words(cfg);
    const auto grid = uniform_grid(cfg.grid_scan);
    CsvWriter csv(out / "hfam.csv", {"word", "x", "re_h", "im_h", "tail_bound"});
    for (const auto& w : words)
        for (double x : grid) {
            const HValue h = eval_h(inst.map, inst.potential, cfg.lambda, w, x, cfg.tol_h);
            csv.row(w.to_string(), x, h.value.real(), h.value.imag(), h.tail_bound);
        }
    return 0;
}

inline int cmd_transversality(const RunConfig& cfg, const std::filesystem::path& out) {
    const auto inst = detail::make_instance(cfg);
    const auto words = detail::scan_words(cfg);
    const auto grid = uniform_grid(cfg.grid_scan);
    const DichotomyVerdict verdict =
        transversality_scan(inst.map, inst.potential, cfg.lambda, words, grid,
                            cfg.tol_agree, cfg.tol_sep, cfg.tol_h);
    {
        CsvWriter csv(out / "pairs.csv", {"word_i", "word_j", "max_dev", "argmax_x"});
        for (const auto& pd : verdict.witness_pairs)
            csv.row(pd.word_i.to_string(), pd.word_j.to_string(), pd.max_dev,
                    pd.argmax_x);
    }
    {
        std::ofstream vf(out / "verdict.txt");
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", verdict.margin);
        vf << to_string(verdict.outcome) << "\n" << "margin = " << buf << "\n";
    }
    std::printf("verdict: %s (margin %.3g)\n", to_string(verdict.outcome),
                verdict.margin);
    return 0;
}

inline int cmd_cohomology(const RunConfig& cfg, const std::filesystem::path& out) {
    const auto inst = detail::make_instance(cfg);
    const auto grid = uniform_grid(cfg.grid_scan);
    const CohomologyResult res =
        cohomology_solve(inst.map, inst.potential, cfg.lambda, grid, cfg.tol_agree,
                         cfg.tol_h, cfg.depth_k);
    {
        CsvWriter csv(out / "cohomology.csv", {"x", "re_phi", "im_phi"});
        for (std::size_t g = 0; g < res.phi.size(); ++g)
            csv.row(res.grid[g], res.phi[g].real(), res.phi[g].imag());
    }
    {
        std::ofstream vf(out / "verdict.txt");
        vf << (res.cohomologous ? "cohomologous" : "not-cohomologous") << "\n";
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", res.residual);
        vf << "residual = " << buf << "\n";
        std::snprintf(buf, sizeof buf, "%.17g", res.periodicity_deviation);
        vf << "periodicity_deviation = " << buf << "\n";
    }
    std::printf("%s (residual %.3g, periodicity deviation %.3g)\n",
                res.cohomologous ? "cohomologous" : "not-cohomologous", res.residual,
                res.periodicity_deviation);
    return 0;
}

inline int cmd_linearize(const RunConfig& cfg, const std::filesystem::path& out) {
    const auto inst = detail::make_instance(cfg);
    const Conjugacy conj(inst.map, cfg.tol_conj);
    {
        CsvWriter csv(out / "theta.csv", {"x", "theta"});
        for (int j = 0; j <= 512; ++j) {
            const double x = static_cast<double>(j) / 512;
            csv.row(x, conj.eval(x));
        }
    }
    CsvWriter checks(out / "linearize_checks.csv",
                     {"check", "value", "threshold", "pass"});
    int failures = 0;
    auto record = [&](const std::string& name, double value, double threshold) {
        const bool ok = value < threshold;
        checks.row(name, value, threshold, ok ? "pass" : "FAIL");
        if (!ok) ++failures;
    };

    record("conjugacy_residual", conj.conjugacy_residual(uniform_grid(1 << 10)),
           cfg.tol_conj);
    {
        Rng rng = Rng::substream(cfg.seed, "theta-roundtrip");
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double x = rng.uniform01();
            worst = std::max(worst, std::fabs(conj.inverse(conj.eval(x)) - x));
        }
        record("theta_roundtrip", worst, 1e-8);
    }
    {
        const int n = cfg.n_samples;
        MuSampler sampler(cfg.degree, cfg.depth_k, cfg.seed);
        std::vector<MuSample> samples;
        samples.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) samples.push_back(sampler.draw());
        for (int m : {1, 2, 4, 8}) {
            if (m > cfg.depth_k) continue;
            std::vector<double> vals;
            vals.reserve(samples.size());
            for (const auto& smp : samples) vals.push_back(xi(smp.digits, m, smp.x));
            record("ks_uniform_xi_m" + std::to_string(m), ks_uniform_statistic(vals),
                   1.63 / std::sqrt(static_cast<double>(n)));
        }
        // invariance under the extension shift: compare xi_m before/after
        const int m = std::min(4, cfg.depth_k - 1);
        std::vector<double> before, after;
        before.reserve(samples.size());
        after.reserve(samples.size());
        for (const auto& smp : samples) {
            before.push_back(xi(smp.digits, m, smp.x));
            const auto [w2, x2] = md_apply(smp.digits, smp.x);
            after.push_back(xi(w2, m, x2));
        }
        record("ks_two_sample_md", ks_two_sample_statistic(before, after),
               ks_two_sample_threshold_001(samples.size()));
    }
    return failures == 0 ? 0 : 4;
}

inline int cmd_fourier(const RunConfig& cfg, const std::filesystem::path& out) {
    const auto inst = detail::make_instance(cfg);
    const Conjugacy conj(inst.map, cfg.tol_conj);
    const double mc_tol = 1e-6;  // Monte-Carlo noise dominates well above this
    CsvWriter coef(out / "fourier.csv", {"s", "m", "q", "re_c", "im_c", "std_error"});
    CsvWriter rec(out / "recursion.csv",
                  {"s", "m", "q", "discrepancy", "threshold", "pass"});
    int failures = 0;
    const int s = 1;
    for (int m : {0, 1, 2}) {
        for (int q : {1, 2}) {
            const FourierCoeff c = fourier_c(conj, inst.potential, cfg.lambda, s, m, q,
                                             cfg.n_samples, cfg.seed, mc_tol,
                                             cfg.depth_k);
            coef.row(c.s, c.m, c.q, c.estimate.real(), c.estimate.imag(), c.std_error);
            const CmRecCheck chk = check_cmrec(conj, inst.potential, cfg.lambda, s, m, q,
                                               cfg.n_samples, cfg.seed, mc_tol,
                                               cfg.depth_k);
            rec.row(s, m, q, chk.discrepancy, chk.threshold,
                    chk.passes() ? "pass" : "FAIL");
            if (!chk.passes()) ++failures;
        }
    }
    return failures == 0 ? 0 : 5;
}

inline int cmd_lyapunov(const RunConfig& cfg, const std::filesystem::path& out) {
    const auto inst = detail::make_instance(cfg);
    const Potential f_plus = lyapunov_potential(inst.map, +1);
    const BetaResult beta_plus = beta_periodic(inst.map, f_plus, cfg.p_max, cfg.tol_orbit);
    const double alpha_plus = alpha_value(inst.map, f_plus, cfg.p_max, cfg.tol_orbit);
    CsvWriter csv(out / "lyapunov.csv", {"quantity", "value"});
    csv.row("beta_log_derivative", beta_plus.beta_lower);
    csv.row("alpha_log_derivative", alpha_plus);
    csv.row("exp_alpha", std::exp(alpha_plus));
    csv.row("lambda0", inst.map.lambda0());
    csv.row("ratio_exp_alpha_to_lambda0", std::exp(alpha_plus) / inst.map.lambda0());
    std::printf("beta(log T') = %.9g, alpha(log T') = %.9g, exp(alpha)/lambda0 = %.6g\n",
                beta_plus.beta_lower, alpha_plus,
                std::exp(alpha_plus) / inst.map.lambda0());
    return 0;
}

inline int cmd_iterate_check(const RunConfig& cfg, const std::filesystem::path& out) {
    const auto inst = detail::make_instance(cfg);
    CsvWriter csv(out / "iterate.csv", {"k", "beta_base", "beta_iterated", "residual"});
    for (int k : {2, 3}) {
        const int p_cap = std::max(1, std::min(cfg.p_max, 12 / k));
        const IterateCheck chk =
            iterate_equivalence(inst.map, inst.potential, k, p_cap, cfg.tol_orbit);
        csv.row(k, chk.beta_base, chk.beta_iterated, chk.residual);
        std::printf("k=%d: |beta(T^k, S_k f) - k beta(T, f)| = %.3g\n", k, chk.residual);
    }
    return 0;
}

/// Curated invariant battery; nonzero exit and a FAIL row name any check
/// that misses its threshold. All randomness under cfg.seed.
inline int cmd_selftest(const RunConfig& cfg, const std::filesystem::path& out) {
    const auto inst = detail::make_instance(cfg);
    const ExpandingMap& map = inst.map;
    CsvWriter csv(out / "selftest.csv", {"check", "metric", "threshold", "pass"});
    int failures = 0;
    auto record = [&](const std::string& name, double metric, double threshold) {
        const bool ok = metric < threshold;
        csv.row(name, metric, threshold, ok ? "pass" : "FAIL");
        if (!ok) {
            ++failures;
            std::fprintf(stderr, "selftest FAIL: %s (metric %.3g, threshold %.3g)\n",
                         name.c_str(), metric, threshold);
        }
    };

    {
        double worst = 0.0;
        for (int j = 0; j < 10000; ++j) {
            const double x = static_cast<double>(j) / 10000;
            worst = std::max(worst,
                             std::fabs(map.lift(x + 1.0) - map.lift(x) - map.degree()));
        }
        record("lift_periodicity", worst, 1e-12);
    }
    {
        double worst = 0.0;
        for (int j = 0; j < 256; ++j) {
            const double x = static_cast<double>(j) / 256;
            for (int i = 0; i < map.degree(); ++i)
                worst = std::max(worst, std::fabs(map.lift(map.inverse_branch(i, x)) -
                                                  (x + i)));
        }
        record("branch_inverse_residual", worst, map.branch_tol());
    }
    {
        // exhaustive pair homomorphism at K=6 plus random triples
        const int d = std::min(map.degree(), 3);
        const int K = 6;
        std::uint64_t total = 1;
        for (int j = 0; j < K; ++j) total *= static_cast<std::uint64_t>(d);
        int violations = 0;
        std::vector<DadicInt> table;
        table.reserve(total);
        for (std::uint64_t v = 0; v < total; ++v)
            table.push_back(DadicInt::iota(v, d, K));
        for (std::uint64_t a = 0; a < total && violations == 0; ++a)
            for (std::uint64_t b = a; b < total; ++b)
                if (table[a].add(table[b]) != table[(a + b) % total]) {
                    ++violations;
                    break;
                }
        Rng rng = Rng::substream(cfg.seed, "selftest-dadic");
        for (int t = 0; t < 10000; ++t) {
            const auto& a = table[rng.next_u64() % total];
            const auto& b = table[rng.next_u64() % total];
            const auto& c = table[rng.next_u64() % total];
            if (a.add(b).add(c) != a.add(b.add(c))) ++violations;
            if (a.add(b) != b.add(a)) ++violations;
            if (a.add(a.neg()) != table[0]) ++violations;
        }
        record("dadic_group_axioms", static_cast<double>(violations), 0.5);
    }
    {
        Rng rng = Rng::substream(cfg.seed, "selftest-hzero");
        double worst = 0.0;
        for (int t = 0; t < 5; ++t) {
            std::vector<int> digits(static_cast<std::size_t>(cfg.depth_k));
            for (auto& v : digits) v = rng.uniform_int(map.degree());
            const DadicInt w(map.degree(), std::move(digits));
            worst = std::max(
                worst,
                std::abs(eval_h(map, inst.potential, cfg.lambda, w, 0.0, cfg.tol_h).value));
        }
        record("h_vanishes_at_zero", worst, 1e-300);
    }
    {
        Rng rng = Rng::substream(cfg.seed, "selftest-shift");
        const auto grid = uniform_grid(16);
        double worst = 0.0;
        for (int t = 0; t < 20; ++t) {
            std::vector<int> digits(static_cast<std::size_t>(cfg.depth_k));
            for (auto& v : digits) v = rng.uniform_int(map.degree());
            const DadicInt w(map.degree(), std::move(digits));
            const int m = rng.uniform_int(4);
            worst = std::max(worst, shift_identity_check(map, inst.potential, cfg.lambda,
                                                         w, m, grid, cfg.tol_h));
        }
        record("shift_identity", worst, 2.0 * cfg.tol_h);
    }
    record("functional_equation",
           functional_equation_check(map, inst.potential, cfg.lambda, uniform_grid(64),
                                     cfg.tol_h, cfg.depth_k),
           (1.0 + std::abs(cfg.lambda)) * 2.0 * cfg.tol_h);
    {
        const Conjugacy conj(map, cfg.tol_conj);
        record("conjugacy_residual", conj.conjugacy_residual(uniform_grid(256)),
               cfg.tol_conj);
        Rng rng = Rng::substream(cfg.seed, "selftest-theta");
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double x = rng.uniform01();
            worst = std::max(worst, std::fabs(conj.inverse(conj.eval(x)) - x));
        }
        record("theta_roundtrip", worst, 1e-8);
        record("extension_shift_identity",
               check_calHd(conj, inst.potential, cfg.lambda, 1, 20, cfg.seed, cfg.tol_h,
                           cfg.depth_k),
               1e-8);
        MuSampler sampler(map.degree(), cfg.depth_k, cfg.seed);
        std::vector<double> vals;
        const int n = 20000;
        vals.reserve(n);
        for (int i = 0; i < n; ++i) {
            const MuSample smp = sampler.draw();
            vals.push_back(xi(smp.digits, std::min(4, cfg.depth_k), smp.x));
        }
        record("ks_uniform_xi", ks_uniform_statistic(vals),
               1.63 / std::sqrt(static_cast<double>(n)));
    }
    {
        const SubActionGrid sub =
            lax_oleinik(map, Potential::constant(0.25), 1 << 9, cfg.lo_max_iter,
                        cfg.tol_lo);
        record("lax_oleinik_constant_beta", std::fabs(sub.beta - 0.25), 1e-9);
        record("lax_oleinik_constant_defect", std::fabs(sub.defect), 1e-9);
    }
    {
        const DadicInt w = DadicInt::iota(1, map.degree(), cfg.depth_k);
        record("zm_nonvanish_iota1",
               std::fabs(static_cast<double>(zm_nonvanish(w, 1)) - 1.0), 0.5);
    }
    return failures == 0 ? 0 : 2;
}

/// Entry point shared by the binary and the tests: run one subcommand,
/// writing artifact files plus a manifest into out_dir.
inline int dispatch(const std::string& command, const RunConfig& cfg,
                    const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    int status = 0;
    if (command == "beta") status = cmd_beta(cfg, out_dir);
    else if (command == "subaction") status = cmd_subaction(cfg, out_dir);
    else if (command == "levelset") status = cmd_levelset(cfg, out_dir);
    else if (command == "entropy") status = cmd_entropy(cfg, out_dir);
    else if (command == "hfam") status = cmd_hfam(cfg, out_dir);
    else if (command == "transversality") status = cmd_transversality(cfg, out_dir);
    else if (command == "cohomology") status = cmd_cohomology(cfg, out_dir);
    else if (command == "linearize") status = cmd_linearize(cfg, out_dir);
    else if (command == "fourier") status = cmd_fourier(cfg, out_dir);
    else if (command == "lyapunov") status = cmd_lyapunov(cfg, out_dir);
    else if (command == "iterate-check") status = cmd_iterate_check(cfg, out_dir);
    else if (command == "selftest") status = cmd_selftest(cfg, out_dir);
    else
        throw std::runtime_error("unknown command '" + command + "'");
    write_manifest(out_dir, command, cfg);
    return status;
}

}  // namespace ergopt::cli

#endif
