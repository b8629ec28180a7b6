#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "heis/carleman.hpp"
#include "heis/ingham.hpp"

namespace heis::cli {

/// Raised for malformed or out-of-range configuration; maps to exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LambdaGrid {
    double min = 0.5;
    double max = 2.0;
    int count = 3;
    double exclusion = 0.1;
    bool symmetric = true;

    /// Ascending nodes; mirrored through 0 when symmetric.
    std::vector<double> nodes() const;
};

/// A preset name, or an inline table of (t, Theta(t)) pairs.
struct ThetaSpec {
    std::string preset = "inv_sqrt";
    std::vector<double> t;
    std::vector<double> values;

    bool inline_table() const { return !t.empty(); }
    ThetaFunction build() const;
};

struct Budgets {
    int max_axis = 160;
    int k_max_cap = 2000000;
};

struct LaguerreSection {
    std::vector<double> deltas{-0.5, 0.0, 1.0, 2.5, 5.0};
    int orth_k_max = 50;
    int envelope_k_max = 200;
    int r_count = 2000;
    int spot_checks = 256;
};

struct InghamSection {
    int J_max = 40;
    double c_n = 1.22271752574;  ///< <= 0 requests a fresh fit
    int spatial_check = 0;
};

struct CarlemanSection {
    std::string source = "profile";  ///< profile, theta_decay or table
    std::string profile = "heat";
    double param = 0.0;
    int k_max = 60000;
    double lambda = 1.0;
    std::string table_path;
    long long link_M = 1000000;
};

struct OracleSection {
    std::vector<std::string> checks{"plancherel", "weyl", "hecke-bochner", "convolution"};
};

struct RunConfig {
    int n = 1;
    LambdaGrid lambda_grid;
    int k_max = 200;
    int m_max = 60;
    ThetaSpec theta;
    Budgets budgets;
    std::string out = "heis_out";
    std::string cache = "use";
    std::uint64_t seed = 0;
    LaguerreSection laguerre;
    InghamSection ingham;
    CarlemanSection carleman;
    OracleSection oracle;

    /// Throws ConfigError naming the offending field.
    void validate() const;
    nlohmann::json to_json() const;
};

/// Parses a JSON document over the defaults. Unknown keys are errors.
RunConfig parse_config(const std::string& text, const std::string& origin);
RunConfig load_config(const std::string& path);

/// "min:max:count"
LambdaGrid parse_lambda_grid(const std::string& text, LambdaGrid base);

}  // namespace heis::cli
