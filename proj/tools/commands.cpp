#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <set>

#include "bundle.hpp"
#include "heis/carleman.hpp"
#include "heis/heisenberg.hpp"
#include "heis/ingham.hpp"
#include "heis/laguerre.hpp"
#include "heis/special_hermite.hpp"

namespace heis::cli {

namespace {

using nlohmann::json;


std::ofstream open_csv(const ReportBundle& bundle, const std::string& name, const std::string& header) {
    std::ofstream out(bundle.path(name));
    if (!out) throw std::runtime_error("cannot write " + bundle.path(name).string());
    out << std::setprecision(17) << header << '\n';
    return out;
}

std::vector<double> positive_lambdas(const std::vector<double>& nodes) {
    std::set<double> seen;
    for (double l : nodes) seen.insert(std::abs(l));
    return {seen.begin(), seen.end()};
}

double relative_change(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

const char* status_of(bool pass) { return pass ? "pass" : "fail"; }

// Five cached tables reassemble a GNTable bit-for-bit.
GNTable cached_gn(TableCache& cache, const json& key, const std::function<GNTable()>& build) {
    std::optional<GNTable> fresh;
    auto built = [&]() -> const GNTable& {
        if (!fresh) fresh = build();
        return *fresh;
    };
    auto part = [&](const std::string& kind, const std::function<SpectralTable(const GNTable&)>& pick) {
        json k = key;
        k["part"] = kind;
        return cache.get(k, [&] { return pick(built()); });
    };
    GNTable out;
    out.table = part("values", [](const GNTable& g) { return g.table; });
    auto like = [](const GNTable& g, auto value) {
        SpectralTable t = g.table;
        for (std::size_t i = 0; i < t.values.size(); ++i) t.values[i] = value(g, i);
        return t;
    };
    const auto logs = part("log_modulus", [&](const GNTable& g) {
        return like(g, [](const GNTable& h, std::size_t i) { return h.log_modulus[i]; });
    });
    const auto ns = part("N", [&](const GNTable& g) {
        return like(g, [](const GNTable& h, std::size_t i) { return static_cast<double>(h.N[i]); });
    });
    const auto flags = part("flags", [&](const GNTable& g) {
        return like(g, [](const GNTable& h, std::size_t i) { return h.clamped[i] + 2.0 * h.underflow[i]; });
    });
    const auto factor = part("max_factor", [&](const GNTable& g) {
        auto t = SpectralTable::zeros(1, {1.0}, 0);
        t.values[0] = g.max_factor;
        return t;
    });
    out.log_modulus = logs.values;
    for (std::size_t i = 0; i < ns.values.size(); ++i) {
        out.N.push_back(static_cast<int>(ns.values[i]));
        const int f = static_cast<int>(flags.values[i]);
        out.clamped.push_back(static_cast<std::uint8_t>(f & 1));
        out.underflow.push_back(static_cast<std::uint8_t>((f >> 1) & 1));
    }
    out.max_factor = factor.values[0];
    return out;
}

json ladder_json(const SobolevLadder& ladder, const CarlemanVerdict& verdict) {
    return {{"lambda", ladder.lambda},
            {"M", ladder.m_values.back()},
            {"usable", ladder.usable_count()},
            {"tail_dominated", ladder.tail_dominated},
            {"growth_exponent", verdict.growth_exponent},
            {"margins", {{"divergent_at_most", verdict.divergent_margin}, {"convergent_at_least", verdict.convergent_margin}}},
            {"classification", to_string(verdict.classification)},
            {"reason", verdict.reason},
            {"log_convexity_defect", log_convexity_defect(ladder)},
            {"roots_nondecreasing", roots_nondecreasing(ladder)}};
}

}  // namespace

int cmd_laguerre_table(const RunConfig& config) {
    ReportBundle bundle(config.out, "laguerre-table", config.to_json());
    bool pass = true;

    const int orth_k = std::min(config.k_max, config.laguerre.orth_k_max);
    json orth_summary = json::array();
    {
        auto table = open_csv(bundle, "laguerre_table.csv", "delta,k,eigenvalue,psi_norm_sq,plancherel_weight,psi_at_origin,gram_diagonal");
        auto orth = open_csv(bundle, "orthonormality.csv", "delta,k_max,max_off_diagonal,max_diagonal_error");
        for (double delta : config.laguerre.deltas) {
            const auto report = laguerre_orthonormality(delta, orth_k);
            const bool ok = report.max_off_diagonal < 1e-8 && report.max_diagonal_error < 1e-8;
            pass = pass && ok;
            orth << delta << ',' << orth_k << ',' << report.max_off_diagonal << ',' << report.max_diagonal_error << '\n';
            orth_summary.push_back({{"delta", delta},
                                    {"max_off_diagonal", report.max_off_diagonal},
                                    {"max_diagonal_error", report.max_diagonal_error},
                                    {"pass", ok}});
            for (int k = 0; k <= config.k_max; ++k) {
                const double norm_sq = psi_norm_sq({k, delta});
                const double at_origin = psi({k, delta}, 0.0);
                if (std::abs(at_origin - 1.0) > 1e-12) pass = false;
                table << delta << ',' << k << ',' << 2.0 * k + delta + 1.0 << ',' << norm_sq << ',' << 1.0 / norm_sq << ','
                      << at_origin << ',';
                if (k <= orth_k) table << report.gram[static_cast<std::size_t>(k) * (orth_k + 1) + k];
                table << '\n';
            }
        }
    }
    bundle.add("laguerre_table.csv");
    bundle.add("orthonormality.csv");

    EnvelopeSweep sweep;
    sweep.n = config.n;
    sweep.k_max = config.laguerre.envelope_k_max;
    sweep.lambdas = positive_lambdas(config.lambda_grid.nodes());
    sweep.r_count = config.laguerre.r_count;
    const auto fit = fit_envelope(sweep);
    EnvelopeSweep doubled = sweep;
    doubled.k_max *= 2;
    doubled.r_count *= 2;
    const auto refit = fit_envelope(doubled);
    const double drift = std::max(relative_change(fit.params.c_env, refit.params.c_env),
                                  relative_change(fit.params.gamma, refit.params.gamma));
    const bool envelope_ok = fit.violations == 0 && refit.violations == 0 && drift < 0.1;
    pass = pass && envelope_ok;

    std::mt19937_64 rng(config.seed);
    const double r_max = default_r_max(sweep.k_max, sweep.n, sweep.lambdas.front());
    std::size_t spot_violations = 0;
    double spot_worst = 0.0;
    {
        auto spots = open_csv(bundle, "envelope_spot_checks.csv", "k,lambda,r,value,envelope,ratio");
        std::uniform_int_distribution<int> pick_k(0, sweep.k_max);
        std::uniform_int_distribution<std::size_t> pick_l(0, sweep.lambdas.size() - 1);
        std::uniform_real_distribution<double> pick_r(0.0, r_max);
        for (int i = 0; i < config.laguerre.spot_checks; ++i) {
            const int k = pick_k(rng);
            const double lambda = sweep.lambdas[pick_l(rng)];
            const double r = std::max(pick_r(rng), 1e-9);
            const double value =
                std::abs(phi_normalized_sequence(sweep.n, lambda, r, k)[k]) * std::exp(0.5 * log_multiplicity(k, sweep.n));
            const double env = laguerre_envelope(k, sweep.n, lambda, r, fit.params);
            const double ratio = value / env;
            spot_worst = std::max(spot_worst, ratio);
            if (ratio > 1.0) ++spot_violations;
            spots << k << ',' << lambda << ',' << r << ',' << value << ',' << env << ',' << ratio << '\n';
        }
    }
    bundle.add("envelope_spot_checks.csv");

    bundle.write_json("summary.json",
                      {{"orthonormality", orth_summary},
                       {"orthonormality_k_max", orth_k},
                       {"table_k_max", config.k_max},
                       {"envelope",
                        {{"c_env", fit.params.c_env},
                         {"gamma", fit.params.gamma},
                         {"samples", fit.samples},
                         {"violations", fit.violations},
                         {"doubled_c_env", refit.params.c_env},
                         {"doubled_gamma", refit.params.gamma},
                         {"doubled_violations", refit.violations},
                         {"drift", drift},
                         {"pass", envelope_ok}}},
                       {"spot_checks", {{"count", config.laguerre.spot_checks}, {"seed", config.seed}, {"violations", spot_violations}, {"worst_ratio", spot_worst}}},
                       {"pass", pass}});
    bundle.finish(status_of(pass));
    return pass ? 0 : 2;
}

int cmd_ingham(const RunConfig& config) {
    if (config.k_max < 1) throw ConfigError("field 'k_max': ingham needs k_max >= 1");
    const auto theta = config.theta.build();
    const auto cls = classify_theta(theta);
    if (cls.reported_class == IntegralClass::divergent)
        throw ConfigError("theta '" + theta.label +
                          "': int Theta(t)/t dt diverges, so no compactly supported function has this Fourier decay; "
                          "construction rejected");
    if (config.ingham.spatial_check > 0 && config.n != 1)
        throw ConfigError("field 'ingham.spatial_check': direct-space check needs n = 1");

    ReportBundle bundle(config.out, "ingham", config.to_json());
    TableCache cache(std::filesystem::path(config.out) / "cache", config.cache);

    double c_n = config.ingham.c_n;
    BlockBoundSweep bound_sweep;
    bound_sweep.n = config.n;
    if (!(c_n > 0.0)) c_n = fit_block_bound(bound_sweep).c_n;
    const auto bound = check_block_bound(bound_sweep, c_n);
    const auto params = choose_sequences(theta, config.ingham.J_max, c_n, config.n);
    const auto lambdas = config.lambda_grid.nodes();

    auto gn_for = [&](int k_max) {
        json key{{"kind", "gn"},        {"n", config.n},        {"lambdas", lambdas},
                 {"k_max", k_max},      {"theta", config.to_json()["theta"]},
                 {"J_max", params.J_max}, {"c_n", c_n}};
        return cached_gn(cache, key, [&] { return build_GN_spectral(params, theta, lambdas, k_max); });
    };
    const auto base_gn = gn_for(config.k_max);
    const auto refined_gn = gn_for(2 * config.k_max);
    const auto base = verify_decay(base_gn, theta);
    const auto refined = verify_decay(refined_gn, theta);
    const auto verdict = decay_verdict(base, refined);

    write_decay_csv(base, bundle.path("decay_report.csv"));
    bundle.add("decay_report.csv");
    write_table_csv(base_gn.table, bundle.path("gn_table.csv"));
    bundle.add("gn_table.csv");

    auto count = [](const std::vector<std::uint8_t>& v) { return std::count(v.begin(), v.end(), 1); };
    bool pass = verdict.pass && bound.violations == 0 && base_gn.max_factor <= 1.0;
    json summary{{"theta", theta.label},
                 {"theta_class", to_string(cls.reported_class)},
                 {"theta_class_confidence", cls.confidence},
                 {"c_n", c_n},
                 {"block_bound_violations", bound.violations},
                 {"sup_ratio", std::exp(base.log_sup_ratio)},
                 {"fitted_C", verdict.C},
                 {"fitted_C_refined", verdict.C_refined},
                 {"relative_change", verdict.relative_change},
                 {"max_N", *std::max_element(refined_gn.N.begin(), refined_gn.N.end())},
                 {"clamped_cells", count(refined_gn.clamped)},
                 {"underflow_cells", count(refined_gn.underflow)},
                 {"max_factor", base_gn.max_factor},
                 {"rho_head", std::vector<double>(params.rho.begin(), params.rho.begin() + std::min(5, params.J_max))},
                 {"rho_tail", params.rho_tail},
                 {"tau_tail", params.tau_tail}};

    if (const int N = config.ingham.spatial_check; N > 0) {
        DirectConvolutionOptions opts;
        opts.max_axis = config.budgets.max_axis;
        const auto spatial = build_spatial_GN(params, N, opts);
        const auto spectral = build_GN_spectral(params, theta, {1.0}, 20, N);
        const auto direct = sampled_coefficients(spatial.sample, 1.0, 20);
        double worst = 0.0, scale = 0.0;
        for (int k = 0; k <= 20; ++k) {
            worst = std::max(worst, std::abs(direct[k] - spectral.table.values[k]));
            scale = std::max(scale, std::abs(spectral.table.values[k]));
        }
        const double err = worst / scale;
        const bool ok = err < 2e-2 && spatial.mass_outside < 1e-6 && std::abs(spatial.l1_norm - 1.0) < 1e-4;
        pass = pass && ok;
        summary["spatial_check"] = {{"N", N},
                                    {"coefficient_error", err},
                                    {"mass_outside", spatial.mass_outside},
                                    {"ball_radius", spatial.ball_radius},
                                    {"l1_norm", spatial.l1_norm},
                                    {"sup", spatial.sup},
                                    {"pass", ok}};
    }
    summary["pass"] = pass;
    bundle.write_json("decay_summary.json", summary);
    bundle.finish(status_of(pass));
    return pass ? 0 : 2;
}

int cmd_carleman(const RunConfig& config) {
    const auto& c = config.carleman;
    ReportBundle bundle(config.out, "carleman", config.to_json());
    json summary{{"source", c.source}};
    bool pass = true;
    std::string status;

    SobolevLadder ladder;
    std::optional<ThetaFunction> theta;
    if (c.source == "profile") {
        const auto profile = synthetic_profile(c.profile);
        ladder = sobolev_norms_log(config.n, c.lambda,
                                   synthetic_log_coefficients(profile, config.n, c.lambda, c.k_max, c.param), config.m_max);
        summary["profile"] = c.profile;
    } else if (c.source == "theta_decay") {
        theta = config.theta.build();
        ladder = sobolev_norms_log(config.n, c.lambda, theta_decay_log_coefficients(*theta, config.n, c.lambda, c.k_max),
                                   config.m_max);
        summary["profile"] = "theta_decay:" + theta->label;
    } else {
        SpectralTable table;
        try {
            table = read_table_csv(c.table_path);
        } catch (const std::exception& e) {
            throw ConfigError("field 'carleman.table_path': " + std::string(e.what()));
        }
        ladder = sobolev_norms(table, c.lambda, config.m_max);
        summary["profile"] = "table";
    }
    const auto verdict = carleman_sum(ladder);
    summary["verdict"] = ladder_json(ladder, verdict);
    write_ladder_csv(ladder, verdict, bundle.path("ladder.csv"));
    bundle.add("ladder.csv");
    if (log_convexity_defect(ladder) < -1e-9) pass = false;

    if (c.source == "profile") {
        std::optional<CarlemanClass> expected;
        if (c.profile == "heat" || c.profile == "single_mode") expected = CarlemanClass::divergent;
        if (c.profile == "poisson") expected = CarlemanClass::convergent;
        if (expected && verdict.classification != CarlemanClass::inconclusive && verdict.classification != *expected)
            pass = false;
        if (c.profile == "heat" || c.profile == "poisson") {
            double lo = INFINITY, hi = -INFINITY;
            for (std::size_t i = 0; i < ladder.size(); ++i) {
                const int m = ladder.m_values[i];
                if (m < 10) continue;
                const double oracle = c.profile == "heat" ? heat_root_oracle(m) : poisson_root_oracle(m);
                lo = std::min(lo, ladder.roots[i] / oracle);
                hi = std::max(hi, ladder.roots[i] / oracle);
            }
            if (lo <= hi) summary["oracle_ratio"] = {{"m_from", 10}, {"min", lo}, {"max", hi}};
        }
    }
    if (theta) {
        const auto growth = theta_growth_bound_check(ladder, config.n, *theta);
        {
            auto out = open_csv(bundle, "growth_bound.csv", "m,log_ratio");
            for (std::size_t i = 0; i < growth.m_values.size(); ++i) out << growth.m_values[i] << ',' << growth.log_ratio[i] << '\n';
        }
        bundle.add("growth_bound.csv");
        summary["growth_bound"] = {{"fitted_C", growth.fitted_C},
                                   {"fitted_C_half", growth.fitted_C_half},
                                   {"finite", growth.finite},
                                   {"stable", growth.stable},
                                   {"tail_dominated", growth.tail_dominated},
                                   {"pass", growth.pass}};
        pass = pass && growth.pass;

        const auto link = integral_test_link(*theta, c.link_M);
        {
            auto out = open_csv(bundle, "integral_test.csv", "M,partial_sum,integral");
            for (std::size_t i = 0; i < link.M_values.size(); ++i)
                out << link.M_values[i] << ',' << link.partial_sums[i] << ',' << link.integrals[i] << '\n';
        }
        bundle.add("integral_test.csv");
        summary["integral_test"] = {{"M_max", c.link_M},
                                    {"partial_sum", link.partial_sums.back()},
                                    {"bracket_ok", link.bracket_ok},
                                    {"increasing", link.increasing},
                                    {"series_class", to_string(link.series_class)},
                                    {"divergent", link.divergent}};
        if (!link.bracket_ok || !link.increasing) pass = false;
    }
    status = verdict.classification == CarlemanClass::inconclusive ? "inconclusive" : status_of(pass);
    if (!pass) status = "fail";
    summary["status"] = status;
    bundle.write_json("verdict.json", summary);
    bundle.finish(status);
    return pass ? 0 : 2;
}

int cmd_oracle(const RunConfig& config) {
    ReportBundle bundle(config.out, "oracle", config.to_json());
    auto rows = open_csv(bundle, "oracle.csv", "check,case,value,tolerance,pass");
    json summary = json::object();
    bool pass = true;
    auto record = [&](const std::string& check, const std::string& name, double value, double tol) {
        const bool ok = value < tol;
        pass = pass && ok;
        rows << check << ',' << name << ',' << value << ',' << tol << ',' << (ok ? 1 : 0) << '\n';
        summary[check][name] = {{"value", value}, {"tolerance", tol}, {"pass", ok}};
    };

    for (const auto& check : config.oracle.checks) {
        if (check == "plancherel") {
            auto grid = make_panel_grid(std::vector<double>{0.0, 4.0, 8.0, 12.0, 16.0, 20.0}, 120);
            auto u = sample_profile(grid, [](double r) { return std::exp(-0.125 * r * r); });
            auto v = sample_central(composite_gauss(std::vector<double>{-8.0, -4.0, 0.0, 4.0, 8.0}, 40),
                                    [](double t) { return std::exp(-4.0 * t * t); });
            HeisenbergRadialFunction f{1, {SeparableTerm{u, v}}};
            const auto report = plancherel_check(f, symmetric_lambda_rule(40.0, 10, 16, 0.05), std::max(config.k_max, 1));
            record(check, "gaussian_h1", report.relative, 1e-3);
        } else if (check == "weyl") {
            auto grid = make_panel_grid(std::vector<double>{0.0, 5.0, 10.0, 15.0, 20.0}, 100);
            auto g = sample_profile(grid, [](double r) { return std::exp(-0.3 * r * r); });
            for (int n : {1, 2})
                for (double lambda : {0.5, 1.0, -2.0})
                    record(check, "n" + std::to_string(n) + "_lambda" + json(lambda).dump(),
                           weyl_plancherel_check(g, lambda, 400, n).relative, 1e-3);
        } else if (check == "hecke-bochner") {
            const double S = 8.0;
            const int N = 64;
            auto grid = make_radial_grid(14.0, 300, GridScheme::gauss);
            auto g = sample_profile(grid, [](double r) { return std::exp(-0.5 * r * r); });
            for (int p = 0; p <= 2; ++p) {
                const BigradedHarmonic P{p, 0};
                auto f = PlaneField::from_function(S, N, [&](double x, double y) {
                    return P(cplx(x, y)) * std::exp(-0.5 * (x * x + y * y));
                });
                const auto direct = twisted_convolve_phi_all(f, 5, 1.0);
                for (int k = 0; k <= 5; ++k) {
                    const std::string name = "p" + std::to_string(p) + "_k" + std::to_string(k);
                    if (k < p) record(check, name + "_zero", std::sqrt(direct[k].norm_sq()), 1e-6);
                    else record(check, name, relative_l2(hecke_bochner_project(g, P, k, 1, S, N), direct[k]), 1e-2);
                }
            }
        } else if (check == "convolution") {
            const BlockSpec b1{1.0, 1.0}, b2{0.6, 0.5};
            DirectConvolutionOptions opts;
            opts.max_axis = config.budgets.max_axis;
            const auto direct = group_convolve_blocks(b1, b2, opts);
            const auto oracle = sampled_coefficients(direct, 1.0, 20);
            const auto c1 = fj_coefficients(b1.rho, 1.0, 20, 1);
            const auto c2 = fj_coefficients(b2.rho, 1.0, 20, 1);
            const double g = gj_fourier(b1.tau, 1.0) * gj_fourier(b2.tau, 1.0);
            double worst = 0.0, scale = 0.0;
            for (int k = 0; k <= 20; ++k) {
                const double spectral = g * c1[k] * c2[k];
                worst = std::max(worst, std::abs(oracle[k] - spectral));
                scale = std::max(scale, std::abs(spectral));
            }
            record(check, "blocks_coefficients", worst / scale, 1e-2);
            record(check, "blocks_mass_outside", mass_outside_ball(direct, b1.support_radius() + b2.support_radius()), 1e-6);
            record(check, "blocks_l1_defect", std::abs(direct.l1_norm() - 1.0), 1e-4);
        }
    }
    rows.close();
    bundle.add("oracle.csv");
    summary["pass"] = pass;
    bundle.write_json("oracle_summary.json", summary);
    bundle.finish(status_of(pass));
    return pass ? 0 : 2;
}

}  // namespace heis::cli
