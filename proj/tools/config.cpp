#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace heis::cli {

namespace {

using nlohmann::json;

constexpr int kHardKCap = 4000000;
constexpr int kHardAxisCap = 160;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ConfigError("field '" + field + "': " + what);
}

class Reader {
public:
    Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) {
        seen_.insert(key);
        return node_.contains(key);
    }

    const json& raw(const std::string& key) const { return node_.at(key); }

    void get(const std::string& key, double& out) {
        if (!has(key)) return;
        const auto& v = raw(key);
        if (!v.is_number()) fail(field(key), "expected a number");
        out = v.get<double>();
        if (!std::isfinite(out)) fail(field(key), "must be finite");
    }

    void get(const std::string& key, int& out) {
        if (!has(key)) return;
        const auto& v = raw(key);
        if (!v.is_number_integer()) fail(field(key), "expected an integer");
        const auto value = v.get<long long>();
        if (value < -2147483647LL || value > 2147483647LL) fail(field(key), "integer out of range");
        out = static_cast<int>(value);
    }

    void get(const std::string& key, long long& out) {
        if (!has(key)) return;
        const auto& v = raw(key);
        if (!v.is_number_integer()) fail(field(key), "expected an integer");
        out = v.get<long long>();
    }

    void get(const std::string& key, std::uint64_t& out) {
        if (!has(key)) return;
        const auto& v = raw(key);
        if (!v.is_number_unsigned()) fail(field(key), "expected a nonnegative integer");
        out = v.get<std::uint64_t>();
    }

    void get(const std::string& key, bool& out) {
        if (!has(key)) return;
        const auto& v = raw(key);
        if (!v.is_boolean()) fail(field(key), "expected true or false");
        out = v.get<bool>();
    }

    void get(const std::string& key, std::string& out) {
        if (!has(key)) return;
        const auto& v = raw(key);
        if (!v.is_string()) fail(field(key), "expected a string");
        out = v.get<std::string>();
    }

    void get(const std::string& key, std::vector<double>& out) {
        if (!has(key)) return;
        const auto& v = raw(key);
        if (!v.is_array()) fail(field(key), "expected an array of numbers");
        out.clear();
        for (const auto& x : v) {
            if (!x.is_number()) fail(field(key), "expected an array of numbers");
            out.push_back(x.get<double>());
        }
    }

    void get(const std::string& key, std::vector<std::string>& out) {
        if (!has(key)) return;
        const auto& v = raw(key);
        if (!v.is_array()) fail(field(key), "expected an array of strings");
        out.clear();
        for (const auto& x : v) {
            if (!x.is_string()) fail(field(key), "expected an array of strings");
            out.push_back(x.get<std::string>());
        }
    }

    void finish() const {
        for (const auto& [key, value] : node_.items())
            if (!seen_.count(key)) fail(field(key), "unknown key");
    }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

std::string position_of(const std::string& text, std::size_t byte) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

std::vector<double> LambdaGrid::nodes() const {
    std::vector<double> positive;
    for (int i = 0; i < count; ++i) positive.push_back(count == 1 ? min : min + (max - min) * i / (count - 1));
    if (!symmetric) return positive;
    std::vector<double> out;
    for (auto it = positive.rbegin(); it != positive.rend(); ++it) out.push_back(-*it);
    out.insert(out.end(), positive.begin(), positive.end());
    return out;
}

ThetaFunction ThetaSpec::build() const {
    if (!inline_table()) return theta_preset(preset);
    const auto ts = t;
    const auto vs = values;
    auto eval = [ts, vs](double x) {
        if (x <= ts.front()) return vs.front();
        if (x >= ts.back()) {
            // continue the last log-log segment
            const std::size_t m = ts.size() - 1;
            const double slope = std::log(vs[m] / vs[m - 1]) / std::log(ts[m] / ts[m - 1]);
            return vs[m] * std::pow(x / ts[m], slope);
        }
        const auto it = std::upper_bound(ts.begin(), ts.end(), x);
        const std::size_t j = static_cast<std::size_t>(it - ts.begin());
        const double w = (x - ts[j - 1]) / (ts[j] - ts[j - 1]);
        return (1.0 - w) * vs[j - 1] + w * vs[j];
    };
    return ThetaFunction{"table", eval, IntegralClass::unknown};
}

void RunConfig::validate() const {
    if (n < 1 || n > 8) fail("n", "must lie in [1, 8]");
    const auto& g = lambda_grid;
    if (!(g.exclusion > 0.0)) fail("lambda_grid.exclusion", "must be positive");
    if (g.count < 1 || g.count > 4096) fail("lambda_grid.count", "must lie in [1, 4096]");
    if (g.count > 1 && !(g.max > g.min)) fail("lambda_grid.max", "must exceed lambda_grid.min");
    if (g.symmetric && !(g.min > 0.0)) fail("lambda_grid.min", "must be positive for a symmetric grid");
    for (double l : g.nodes())
        if (!(std::abs(l) >= g.exclusion)) fail("lambda_grid", "node " + std::to_string(l) + " inside the exclusion margin");
    if (budgets.k_max_cap < 1 || budgets.k_max_cap > kHardKCap) fail("budgets.k_max_cap", "must lie in [1, 4000000]");
    if (budgets.max_axis < 16 || budgets.max_axis > kHardAxisCap) fail("budgets.max_axis", "must lie in [16, 160]");
    if (k_max < 0 || k_max > budgets.k_max_cap) fail("k_max", "must lie in [0, budgets.k_max_cap]");
    if (m_max < 1 || m_max > kMaxLadder) fail("m_max", "must lie in [1, 80]");
    if (theta.inline_table()) {
        if (theta.t.size() != theta.values.size() || theta.t.size() < 2)
            fail("theta", "t and values must have equal length >= 2");
        for (std::size_t i = 0; i < theta.t.size(); ++i) {
            if (!(theta.values[i] > 0.0)) fail("theta.values", "must be positive");
            if (i > 0 && !(theta.t[i] > theta.t[i - 1])) fail("theta.t", "must be strictly increasing");
            if (i > 0 && theta.values[i] > theta.values[i - 1]) fail("theta.values", "must be nonincreasing");
        }
        if (!(theta.t.front() >= 0.0)) fail("theta.t", "must start at t >= 0");
    } else {
        try {
            theta_preset(theta.preset);
        } catch (const std::invalid_argument&) {
            fail("theta", "unknown preset '" + theta.preset + "' (inv_sqrt, inv_log, zero)");
        }
    }
    if (out.empty()) fail("out", "must not be empty");
    if (cache != "use" && cache != "refresh" && cache != "off") fail("cache", "must be use, refresh or off");
    if (laguerre.deltas.empty()) fail("laguerre.deltas", "must not be empty");
    for (double d : laguerre.deltas)
        if (!(d >= -0.5)) fail("laguerre.deltas", "every delta must be >= -1/2");
    if (laguerre.orth_k_max < 0 || laguerre.orth_k_max > 400) fail("laguerre.orth_k_max", "must lie in [0, 400]");
    if (laguerre.envelope_k_max < 1 || laguerre.envelope_k_max > 1000)
        fail("laguerre.envelope_k_max", "must lie in [1, 1000]");
    if (laguerre.r_count < 8 || laguerre.r_count > 20000) fail("laguerre.r_count", "must lie in [8, 20000]");
    if (laguerre.spot_checks < 0 || laguerre.spot_checks > 100000) fail("laguerre.spot_checks", "must lie in [0, 1e5]");
    if (ingham.J_max < 1 || ingham.J_max > 10000) fail("ingham.J_max", "must lie in [1, 10000]");
    if (ingham.spatial_check < 0 || ingham.spatial_check > 3) fail("ingham.spatial_check", "must lie in [0, 3]");
    const auto& c = carleman;
    if (c.source != "profile" && c.source != "theta_decay" && c.source != "table")
        fail("carleman.source", "must be profile, theta_decay or table");
    try {
        synthetic_profile(c.profile);
    } catch (const std::invalid_argument&) {
        fail("carleman.profile", "unknown profile '" + c.profile + "'");
    }
    if (c.k_max < 1 || c.k_max > budgets.k_max_cap) fail("carleman.k_max", "must lie in [1, budgets.k_max_cap]");
    if (c.lambda == 0.0) fail("carleman.lambda", "must be nonzero");
    if (c.source == "table" && c.table_path.empty()) fail("carleman.table_path", "required for source 'table'");
    if (c.link_M < 1000 || c.link_M > 100000000) fail("carleman.link_M", "must lie in [1e3, 1e8]");
    static const std::set<std::string> known{"plancherel", "weyl", "hecke-bochner", "convolution"};
    for (const auto& check : oracle.checks)
        if (!known.count(check)) fail("oracle.checks", "unknown check '" + check + "'");
}

nlohmann::json RunConfig::to_json() const {
    json j;
    j["n"] = n;
    j["lambda_grid"] = {{"min", lambda_grid.min},
                        {"max", lambda_grid.max},
                        {"count", lambda_grid.count},
                        {"exclusion", lambda_grid.exclusion},
                        {"symmetric", lambda_grid.symmetric}};
    j["k_max"] = k_max;
    j["m_max"] = m_max;
    if (theta.inline_table()) j["theta"] = {{"t", theta.t}, {"values", theta.values}};
    else j["theta"] = theta.preset;
    j["budgets"] = {{"max_axis", budgets.max_axis}, {"k_max_cap", budgets.k_max_cap}};
    j["out"] = out;
    j["cache"] = cache;
    j["seed"] = seed;
    j["laguerre"] = {{"deltas", laguerre.deltas},
                     {"orth_k_max", laguerre.orth_k_max},
                     {"envelope_k_max", laguerre.envelope_k_max},
                     {"r_count", laguerre.r_count},
                     {"spot_checks", laguerre.spot_checks}};
    j["ingham"] = {{"J_max", ingham.J_max}, {"spatial_check", ingham.spatial_check}};
    if (ingham.c_n > 0.0) j["ingham"]["c_n"] = ingham.c_n;
    else j["ingham"]["c_n"] = "fit";
    j["carleman"] = {{"source", carleman.source}, {"profile", carleman.profile}, {"param", carleman.param},
                     {"k_max", carleman.k_max},   {"lambda", carleman.lambda},   {"table_path", carleman.table_path},
                     {"link_M", carleman.link_M}};
    j["oracle"] = {{"checks", oracle.checks}};
    return j;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + position_of(text, e.byte == 0 ? 0 : e.byte - 1) + ": malformed JSON");
    }
    RunConfig c;
    try {
        Reader root(doc, "");
        root.get("n", c.n);
        if (root.has("lambda_grid")) {
            Reader r(root.raw("lambda_grid"), "lambda_grid");
            r.get("min", c.lambda_grid.min);
            r.get("max", c.lambda_grid.max);
            r.get("count", c.lambda_grid.count);
            r.get("exclusion", c.lambda_grid.exclusion);
            r.get("symmetric", c.lambda_grid.symmetric);
            r.finish();
        }
        root.get("k_max", c.k_max);
        root.get("m_max", c.m_max);
        if (root.has("theta")) {
            const auto& t = root.raw("theta");
            if (t.is_string()) {
                c.theta.preset = t.get<std::string>();
            } else {
                Reader r(t, "theta");
                r.get("t", c.theta.t);
                r.get("values", c.theta.values);
                r.finish();
                if (c.theta.t.empty()) fail("theta.t", "required for an inline table");
                c.theta.preset.clear();
            }
        }
        if (root.has("budgets")) {
            Reader r(root.raw("budgets"), "budgets");
            r.get("max_axis", c.budgets.max_axis);
            r.get("k_max_cap", c.budgets.k_max_cap);
            r.finish();
        }
        root.get("out", c.out);
        root.get("cache", c.cache);
        root.get("seed", c.seed);
        if (root.has("laguerre")) {
            Reader r(root.raw("laguerre"), "laguerre");
            r.get("deltas", c.laguerre.deltas);
            r.get("orth_k_max", c.laguerre.orth_k_max);
            r.get("envelope_k_max", c.laguerre.envelope_k_max);
            r.get("r_count", c.laguerre.r_count);
            r.get("spot_checks", c.laguerre.spot_checks);
            r.finish();
        }
        if (root.has("ingham")) {
            Reader r(root.raw("ingham"), "ingham");
            r.get("J_max", c.ingham.J_max);
            r.get("spatial_check", c.ingham.spatial_check);
            if (r.has("c_n")) {
                const auto& v = r.raw("c_n");
                if (v.is_string() && v.get<std::string>() == "fit") c.ingham.c_n = 0.0;
                else if (v.is_number() && v.get<double>() > 0.0) c.ingham.c_n = v.get<double>();
                else fail("ingham.c_n", "expected a positive number or \"fit\"");
            }
            r.finish();
        }
        if (root.has("carleman")) {
            Reader r(root.raw("carleman"), "carleman");
            r.get("source", c.carleman.source);
            r.get("profile", c.carleman.profile);
            r.get("param", c.carleman.param);
            r.get("k_max", c.carleman.k_max);
            r.get("lambda", c.carleman.lambda);
            r.get("table_path", c.carleman.table_path);
            r.get("link_M", c.carleman.link_M);
            r.finish();
        }
        if (root.has("oracle")) {
            Reader r(root.raw("oracle"), "oracle");
            r.get("checks", c.oracle.checks);
            r.finish();
        }
        root.finish();
    } catch (const ConfigError& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path);
}

LambdaGrid parse_lambda_grid(const std::string& text, LambdaGrid base) {
    std::stringstream ss(text);
    std::string a, b, c;
    if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c) || a.empty() || b.empty() ||
        c.empty())
        throw ConfigError("--lambda-grid: expected min:max:count");
    try {
        std::size_t used = 0;
        base.min = std::stod(a, &used);
        if (used != a.size()) throw std::invalid_argument(a);
        base.max = std::stod(b, &used);
        if (used != b.size()) throw std::invalid_argument(b);
        base.count = std::stoi(c, &used);
        if (used != c.size()) throw std::invalid_argument(c);
    } catch (const std::exception&) {
        throw ConfigError("--lambda-grid: expected min:max:count");
    }
    return base;
}

}  // namespace heis::cli
