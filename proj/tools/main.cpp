#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"

namespace {

struct Overrides {
    std::string config_path;
    std::string out;
    int k_max = -1;
    std::string lambda_grid;
    std::string theta;
    int spatial_check = -1;
    long long seed = -1;
};

heis::cli::RunConfig resolve(const Overrides& o) {
    using namespace heis::cli;
    RunConfig c = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
    if (!o.out.empty()) c.out = o.out;
    if (o.k_max >= 0) c.k_max = o.k_max;
    if (!o.lambda_grid.empty()) c.lambda_grid = parse_lambda_grid(o.lambda_grid, c.lambda_grid);
    if (!o.theta.empty()) c.theta = ThetaSpec{o.theta, {}, {}};
    if (o.spatial_check >= 0) c.ingham.spatial_check = o.spatial_check;
    if (o.seed >= 0) c.seed = static_cast<std::uint64_t>(o.seed);
    c.validate();
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral analysis on the Heisenberg group: Laguerre tables, Ingham construction, Carleman ladders"};
    app.require_subcommand(1);
    Overrides o;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--k-max", o.k_max, "largest Laguerre index")->check(CLI::NonNegativeNumber);
        sub->add_option("--lambda-grid", o.lambda_grid, "min:max:count");
        sub->add_option("--theta", o.theta, "decay preset: inv_sqrt, inv_log or zero");
        sub->add_option("--spatial-check", o.spatial_check, "direct-space G_N comparison, N <= 3")->check(CLI::Range(0, 3));
        sub->add_option("--seed", o.seed, "seed for sampled sweep points")->check(CLI::NonNegativeNumber);
    };
    auto* laguerre = app.add_subcommand("laguerre-table", "orthonormality, Plancherel weights and envelope fit");
    auto* ingham = app.add_subcommand("ingham", "G_N construction and decay verification");
    auto* carleman = app.add_subcommand("carleman", "Sobolev ladders and Carleman classification");
    auto* oracle = app.add_subcommand("oracle", "Plancherel, Hecke-Bochner and convolution oracles");
    for (auto* sub : {laguerre, ingham, carleman, oracle}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        const auto config = resolve(o);
        if (laguerre->parsed()) return heis::cli::cmd_laguerre_table(config);
        if (ingham->parsed()) return heis::cli::cmd_ingham(config);
        if (carleman->parsed()) return heis::cli::cmd_carleman(config);
        return heis::cli::cmd_oracle(config);
    } catch (const heis::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
