#ifndef GALLAB_EXPERIMENTS_HPP
#define GALLAB_EXPERIMENTS_HPP

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gallab/csv.hpp"
#include "gallab/energy.hpp"
#include "gallab/gcd_sum.hpp"
#include "gallab/integer_set.hpp"
#include "gallab/pair_correlation.hpp"
#include "gallab/rand_mult.hpp"
#include "gallab/rng.hpp"

// Experiment orchestration behind the gal-lab CLI: flat key=value configs,
// CSV rows plus a JSON metadata sidecar, all library calls seeded through
// the counter-based splitting scheme so reruns are reproducible.

namespace gallab {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A numeric check failed at run time (overflow is reported separately).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Least-squares slope of ln y against ln x (intercept fitted).
inline double fit_slope(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw std::invalid_argument("fit_slope: need at least 3 points");
    double sx = 0.0, sy = 0.0;
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0)) throw std::invalid_argument("fit_slope: points must be positive");
        sx += std::log(x);
        sy += std::log(y);
    }
    const double mx = sx / static_cast<double>(points.size());
    const double my = sy / static_cast<double>(points.size());
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : points) {
        const double dx = std::log(x) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(y) - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_slope: x values are all equal");
    return sxy / sxx;
}

struct ExperimentConfig {
    std::string experiment;
    std::map<std::string, std::string> values;

    bool has(const std::string& key) const { return values.count(key) != 0; }

    std::string get(const std::string& key, const std::string& fallback) const {
        auto it = values.find(key);
        return it == values.end() ? fallback : it->second;
    }
};

namespace detail {

inline u64 parse_u64_value(const std::string& key, const std::string& text) {
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
        throw ConfigError("config key '" + key + "': expected a nonnegative integer, got '" + text + "'");
    }
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
    if (errno != 0 || end != text.c_str() + text.size()) {
        throw ConfigError("config key '" + key + "': integer out of range: '" + text + "'");
    }
    return v;
}

inline double parse_double_value(const std::string& key, const std::string& text) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + text + "'");
    }
    if (pos != text.size() || !std::isfinite(v)) {
        throw ConfigError("config key '" + key + "': expected a finite number, got '" + text + "'");
    }
    return v;
}

template <typename Parse>
auto parse_list(const std::string& key, const std::string& text, Parse&& parse)
    -> std::vector<decltype(parse(key, text))> {
    std::vector<decltype(parse(key, text))> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(parse(key, item));
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

inline u64 config_u64(const ExperimentConfig& c, const std::string& key, u64 fallback) {
    return c.has(key) ? parse_u64_value(key, c.values.at(key)) : fallback;
}

inline double config_double(const ExperimentConfig& c, const std::string& key, double fallback) {
    return c.has(key) ? parse_double_value(key, c.values.at(key)) : fallback;
}

inline std::vector<u64> config_u64_list(const ExperimentConfig& c, const std::string& key,
                                        const std::string& fallback) {
    return parse_list(key, c.get(key, fallback), parse_u64_value);
}

inline std::vector<double> config_double_list(const ExperimentConfig& c, const std::string& key,
                                              const std::string& fallback) {
    return parse_list(key, c.get(key, fallback), parse_double_value);
}

inline u64 elapsed_ms(std::chrono::steady_clock::time_point start) {
    return static_cast<u64>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                std::chrono::steady_clock::now() - start)
                                .count());
}

}  // namespace detail

struct SetSpecResult {
    IntegerSet set;
    nlohmann::json diagnostics;
};

// set specs: interval:N | squares:N | random:UNIVERSE:N | file:PATH
inline SetSpecResult parse_set_spec(const std::string& spec, u64 seed) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
        throw ConfigError("set spec '" + spec + "': expected kind:params");
    }
    const std::string kind = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);
    nlohmann::json diag;
    diag["spec"] = spec;
    try {
        if (kind == "interval") {
            return {gen_interval(detail::parse_u64_value("set", rest)), std::move(diag)};
        }
        if (kind == "squares") {
            return {gen_squares(detail::parse_u64_value("set", rest)), std::move(diag)};
        }
        if (kind == "random") {
            const auto second = rest.find(':');
            if (second == std::string::npos) {
                throw ConfigError("set spec '" + spec + "': expected random:UNIVERSE:N");
            }
            const u64 universe = detail::parse_u64_value("set", rest.substr(0, second));
            const u64 n = detail::parse_u64_value("set", rest.substr(second + 1));
            diag["seed"] = seed;
            diag["rng"] = kRngAlgorithm;
            return {gen_random_subset(universe, n, seed), std::move(diag)};
        }
        if (kind == "file") {
            LoadStats stats;
            IntegerSet set = load_set(rest, &stats);
            diag["duplicates_collapsed"] = stats.duplicates_collapsed;
            diag["blank_lines"] = stats.blank_lines;
            return {std::move(set), std::move(diag)};
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError("set spec '" + spec + "': " + e.what());
    }
    throw ConfigError("set spec '" + spec + "': unknown kind '" + kind + "'");
}

struct ExperimentTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    nlohmann::json metadata;
};

namespace detail {

inline const std::map<std::string, std::set<std::string>>& experiment_keys() {
    static const std::map<std::string, std::set<std::string>> table = {
        {"gcdsum-scaling", {"out", "seed", "ns", "family", "universe_factor", "alpha"}},
        {"mult-energy-scaling", {"out", "seed", "ns", "family"}},
        {"ratio-lemma", {"out", "seed", "ns", "zsizes", "reps", "universe_factor"}},
        {"identity-check", {"out", "seed", "set", "weight", "alpha", "T", "samples"}},
        {"moments", {"out", "seed", "alphas", "ls", "T", "samples"}},
        {"paircorr", {"out", "seed", "set", "alpha", "s", "eta", "jmax"}},
        {"variance-panel", {"out", "seed", "set", "s", "samples"}},
    };
    return table;
}

inline IntegerSet scaling_family_set(const std::string& family, u64 n, u64 universe_factor, u64 seed) {
    if (family == "interval") return gen_interval(n);
    if (family == "squares") return gen_squares(n);
    if (family == "random") return gen_random_subset(universe_factor * n, n, seed);
    throw ConfigError("unknown family '" + family + "' (expected interval|squares|random)");
}

inline ExperimentTable run_gcdsum_scaling(const ExperimentConfig& c) {
    const std::vector<u64> ns = config_u64_list(c, "ns", "16,32,64,128,256");
    const std::string family = c.get("family", "interval");
    const u64 universe_factor = config_u64(c, "universe_factor", 8);
    const double alpha = config_double(c, "alpha", 0.5);
    const u64 seed = config_u64(c, "seed", 1);

    ExperimentTable t;
    t.header = {"experiment", "n",        "set_size",       "additive_energy", "gcd_sum",
                "alpha",      "value_over_energy", "wall_ms", "seed",            "version"};
    std::vector<std::pair<double, double>> gcd_points, energy_points;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        const IntegerSet set = scaling_family_set(family, ns[i], universe_factor, child_seed(seed, i));
        const u64 energy = additive_energy(set);
        const GcdSumReport report = gcd_sum_of_differences(set, alpha);
        const double ratio = (alpha == 0.5 && set.size() >= 3)
                                 ? gcd_sum_energy_ratio(set)
                                 : report.value.real() / static_cast<double>(energy);
        gcd_points.emplace_back(static_cast<double>(ns[i]), report.value.real());
        energy_points.emplace_back(static_cast<double>(ns[i]), static_cast<double>(energy));
        t.rows.push_back({c.experiment, std::to_string(ns[i]), std::to_string(set.size()),
                          std::to_string(energy), format_double(report.value.real()),
                          format_double(alpha), format_double(ratio),
                          std::to_string(elapsed_ms(start)), std::to_string(seed), kVersion});
    }
    if (ns.size() >= 3) {
        t.metadata["slope_log_gcd_sum_vs_log_n"] = fit_slope(gcd_points);
        t.metadata["slope_log_energy_vs_log_n"] = fit_slope(energy_points);
    }
    t.metadata["family"] = family;
    return t;
}

inline ExperimentTable run_mult_energy_scaling(const ExperimentConfig& c) {
    const std::vector<u64> ns = config_u64_list(c, "ns", "16,32,64,128,256");
    const std::string family = c.get("family", "interval");
    if (family != "interval") {
        throw ConfigError("mult-energy-scaling supports family=interval only");
    }
    const u64 seed = config_u64(c, "seed", 1);
    ExperimentTable t;
    t.header = {"experiment", "n", "mult_energy", "wall_ms", "seed", "version"};
    std::vector<std::pair<double, double>> points;
    for (u64 n : ns) {
        const auto start = std::chrono::steady_clock::now();
        const u128 me = mult_energy_of_r(gen_interval(n));
        points.emplace_back(static_cast<double>(n), to_double(me));
        t.rows.push_back({c.experiment, std::to_string(n), to_string_u128(me),
                          std::to_string(elapsed_ms(start)), std::to_string(seed), kVersion});
    }
    if (ns.size() >= 3) t.metadata["slope_log_mult_energy_vs_log_n"] = fit_slope(points);
    return t;
}

// One sweep configuration is addressed by (n index, zsize index, repetition),
// so enlarging the repetition count replays the original draws unchanged.
inline u64 sweep_seed(u64 seed, std::size_t n_index, std::size_t z_index, u64 rep) {
    return child_seed(seed, (static_cast<u64>(n_index) << 40) ^ (static_cast<u64>(z_index) << 20) ^ rep);
}

inline ExperimentTable run_ratio_lemma(const ExperimentConfig& c) {
    const std::vector<u64> ns = config_u64_list(c, "ns", "16,32,64,128");
    const std::vector<u64> zsizes = config_u64_list(c, "zsizes", "1,4,16,64");
    const u64 reps = config_u64(c, "reps", 3);
    const u64 universe_factor = config_u64(c, "universe_factor", 8);
    const u64 seed = config_u64(c, "seed", 1);
    if (reps < 1) throw ConfigError("ratio-lemma: reps must be >= 1");

    ExperimentTable t;
    t.header = {"experiment", "n",      "zsize",  "rep",  "energy",
                "normalized", "wall_ms", "seed",   "version"};
    double max_normalized = 0.0;
    for (std::size_t ni = 0; ni < ns.size(); ++ni) {
        for (std::size_t zi = 0; zi < zsizes.size(); ++zi) {
            for (u64 rep = 0; rep < reps; ++rep) {
                const auto start = std::chrono::steady_clock::now();
                const u64 config_seed = sweep_seed(seed, ni, zi, rep);
                const IntegerSet set =
                    gen_random_subset(universe_factor * ns[ni], ns[ni], child_seed(config_seed, 0));
                const RepFunction rf = rep_function(set);
                // sample realized ratios (plus 1/1) so the restriction has mass
                Xoshiro256pp rng(child_seed(config_seed, 1));
                std::set<RatioKey> ratios{RatioKey{1, 1}};
                const auto& counts = rf.counts();
                const u64 target = zsizes[zi];
                for (u64 attempt = 0; attempt < 64 * target && ratios.size() < target; ++attempt) {
                    const u64 a = counts[uniform_below(rng, counts.size())].first;
                    const u64 b = counts[uniform_below(rng, counts.size())].first;
                    ratios.insert(RatioKey::reduce(a, b));
                }
                const std::vector<RatioKey> zs(ratios.begin(), ratios.end());
                const u64 energy = ratio_restricted_energy(rf, zs);
                const double n3 = std::pow(static_cast<double>(ns[ni]), 3.0);
                const double normalized =
                    static_cast<double>(energy) / (n3 * std::sqrt(static_cast<double>(zs.size())));
                max_normalized = std::max(max_normalized, normalized);
                t.rows.push_back({c.experiment, std::to_string(ns[ni]), std::to_string(zs.size()),
                                  std::to_string(rep), std::to_string(energy), format_double(normalized),
                                  std::to_string(elapsed_ms(start)), std::to_string(seed), kVersion});
            }
        }
    }
    t.metadata["max_normalized"] = max_normalized;
    t.metadata["reps"] = reps;
    return t;
}

inline WeightFunction weight_from_config(const ExperimentConfig& c, const IntegerSet& set) {
    const std::string weight = c.get("weight", "ones");
    if (weight == "ones") return WeightFunction::ones(set);
    if (weight == "rep") return WeightFunction::from_rep(rep_function(set));
    throw ConfigError("unknown weight '" + weight + "' (expected ones|rep)");
}

inline ExperimentTable run_identity_check(const ExperimentConfig& c) {
    const u64 seed = config_u64(c, "seed", 1);
    const auto spec = parse_set_spec(c.get("set", "interval:20"), child_seed(seed, 0));
    const WeightFunction f = weight_from_config(c, spec.set);
    const double alpha = config_double(c, "alpha", 1.0);
    const u64 truncation = config_u64(c, "T", 1000);
    const u64 samples = config_u64(c, "samples", 100000);

    const auto start = std::chrono::steady_clock::now();
    const IdentityCheckResult result = identity_check(f, alpha, truncation, samples, seed);
    const double sigmas = result.sigmas_off();

    ExperimentTable t;
    t.header = {"experiment", "alpha",    "T",          "samples",   "mc_mean", "std_error",
                "exact_reference", "sigmas_off", "wall_ms", "seed",    "version"};
    t.rows.push_back({c.experiment, format_double(alpha), std::to_string(truncation),
                      std::to_string(samples), format_double(result.estimate.mean.real()),
                      format_double(result.estimate.std_error), format_double(result.exact_reference),
                      format_double(sigmas), std::to_string(elapsed_ms(start)), std::to_string(seed),
                      kVersion});
    t.metadata["set"] = spec.diagnostics;
    t.metadata["weight"] = c.get("weight", "ones");
    t.metadata["sigmas_off"] = sigmas;
    if (sigmas > 4.0) {
        throw NumericalError("identity-check failed: estimate " + format_double(sigmas) +
                             " standard errors from the exact reference (row alpha=" +
                             format_double(alpha) + ", T=" + std::to_string(truncation) + ")");
    }
    return t;
}

inline ExperimentTable run_moments(const ExperimentConfig& c) {
    const std::vector<double> alphas = config_double_list(c, "alphas", "0.6,0.75,1");
    const std::vector<double> ls = config_double_list(c, "ls", "1,2,3");
    const u64 truncation = config_u64(c, "T", 1000);
    const u64 samples = config_u64(c, "samples", 10000);
    const u64 seed = config_u64(c, "seed", 1);

    ExperimentTable t;
    t.header = {"experiment", "alpha", "l",    "T",      "samples", "estimate",
                "std_error",  "wall_ms", "seed", "version"};
    u64 index = 0;
    for (double alpha : alphas) {
        for (double l : ls) {
            const auto start = std::chrono::steady_clock::now();
            const MomentEstimate est = moment_estimate(alpha, l, truncation, samples, child_seed(seed, index));
            ++index;
            t.rows.push_back({c.experiment, format_double(alpha), format_double(l),
                              std::to_string(truncation), std::to_string(samples),
                              format_double(est.mean.real()), format_double(est.std_error),
                              std::to_string(elapsed_ms(start)), std::to_string(seed), kVersion});
        }
    }
    return t;
}

inline ExperimentTable run_paircorr(const ExperimentConfig& c) {
    if (!c.has("set")) throw ConfigError("paircorr: missing required key 'set'");
    if (!c.has("alpha")) throw ConfigError("paircorr: missing required key 'alpha'");
    const u64 seed = config_u64(c, "seed", 1);
    const auto spec = parse_set_spec(c.values.at("set"), child_seed(seed, 0));
    const double alpha = config_double(c, "alpha", 0.0);
    const double s = config_double(c, "s", 1.0);

    ExperimentTable t;
    t.header = {"experiment", "n",     "alpha",   "s",      "f_value", "ordered_pairs",
                "borderline_pairs", "wall_ms", "seed", "version"};
    auto add_row = [&](const IntegerSet& set) {
        const auto start = std::chrono::steady_clock::now();
        const PairCorrResult r = pair_correlation(set, alpha, s);
        t.rows.push_back({c.experiment, std::to_string(r.n), format_double(alpha), format_double(s),
                          format_double(r.f_value), std::to_string(r.ordered_pairs),
                          std::to_string(r.borderline_pairs), std::to_string(elapsed_ms(start)),
                          std::to_string(seed), kVersion});
    };

    if (c.has("eta")) {
        const double eta = config_double(c, "eta", 0.0);
        const u64 jmax = config_u64(c, "jmax", 10);
        const std::vector<u64> schedule = subsequence_schedule(eta, jmax);
        t.metadata["schedule"] = schedule;
        for (u64 nj : schedule) {
            if (nj < 2) continue;
            if (nj > spec.set.size()) break;
            add_row(spec.set.prefix(static_cast<std::size_t>(nj)));
        }
        if (t.rows.empty()) {
            throw ConfigError("paircorr: schedule produced no usable truncations for this set");
        }
    } else {
        add_row(spec.set);
    }
    t.metadata["set"] = spec.diagnostics;
    return t;
}

inline ExperimentTable run_variance_panel(const ExperimentConfig& c) {
    if (!c.has("set")) throw ConfigError("variance-panel: missing required key 'set'");
    const u64 seed = config_u64(c, "seed", 1);
    const auto spec = parse_set_spec(c.values.at("set"), child_seed(seed, 0));
    const double s = config_double(c, "s", 1.0);
    const u64 samples = config_u64(c, "samples", 200);

    const auto start = std::chrono::steady_clock::now();
    const double variance = variance_estimate(spec.set, s, samples, seed);
    const double panel = variance_upper_panel(spec.set);
    const MomentEstimate mean_check = alpha_average_check(spec.set, s, samples, seed);
    const double target = alpha_average_target(static_cast<u64>(spec.set.size()), s);

    ExperimentTable t;
    t.header = {"experiment",  "n",       "s",       "samples", "variance_mc", "panel",
                "alpha_mean", "alpha_mean_target", "alpha_mean_std_error", "wall_ms", "seed", "version"};
    t.rows.push_back({c.experiment, std::to_string(spec.set.size()), format_double(s),
                      std::to_string(samples), format_double(variance), format_double(panel),
                      format_double(mean_check.mean.real()), format_double(target),
                      format_double(mean_check.std_error), std::to_string(elapsed_ms(start)),
                      std::to_string(seed), kVersion});
    t.metadata["set"] = spec.diagnostics;
    return t;
}

}  // namespace detail

inline void validate_config(const ExperimentConfig& config) {
    const auto& table = detail::experiment_keys();
    const auto it = table.find(config.experiment);
    if (it == table.end()) {
        std::string known;
        for (const auto& [name, keys] : table) {
            if (!known.empty()) known += ", ";
            known += name;
        }
        throw ConfigError("unknown experiment '" + config.experiment + "' (expected one of: " + known + ")");
    }
    for (const auto& [key, value] : config.values) {
        if (it->second.count(key) == 0) {
            throw ConfigError("unknown config key '" + key + "' for experiment '" + config.experiment + "'");
        }
    }
}

// Pure compute: validates and produces the table. Throws ConfigError,
// NumericalError, or std::overflow_error.
inline ExperimentTable run_experiment(const ExperimentConfig& config) {
    validate_config(config);
    if (config.experiment == "gcdsum-scaling") return detail::run_gcdsum_scaling(config);
    if (config.experiment == "mult-energy-scaling") return detail::run_mult_energy_scaling(config);
    if (config.experiment == "ratio-lemma") return detail::run_ratio_lemma(config);
    if (config.experiment == "identity-check") return detail::run_identity_check(config);
    if (config.experiment == "moments") return detail::run_moments(config);
    if (config.experiment == "paircorr") return detail::run_paircorr(config);
    if (config.experiment == "variance-panel") return detail::run_variance_panel(config);
    throw ConfigError("unknown experiment '" + config.experiment + "'");
}

// Renders the table to CSV text (header row first).
inline std::string table_to_csv(const ExperimentTable& table) {
    CsvWriter writer(table.header);
    for (const auto& row : table.rows) writer.add_row(row);
    return writer.str();
}

// Runs the experiment and writes CSV + JSON sidecar atomically. The CSV is
// byte-stable across reruns except the wall_ms column; the sidecar carries
// the timestamp. Returns the CSV path.
inline std::filesystem::path run_to_files(const ExperimentConfig& config,
                                          nlohmann::json* metadata_out = nullptr) {
    validate_config(config);
    const std::filesystem::path out = config.get("out", config.experiment + ".csv");
    const ExperimentTable table = run_experiment(config);
    if (metadata_out != nullptr) *metadata_out = table.metadata;

    nlohmann::json sidecar;
    sidecar["experiment"] = config.experiment;
    sidecar["config"] = config.values;
    sidecar["library_version"] = kVersion;
    sidecar["rng_algorithm"] = kRngAlgorithm;
    sidecar["timestamp_utc"] = iso8601_utc_now();
    sidecar["rows"] = table.rows.size();
    sidecar["metadata"] = table.metadata;

    write_file_atomic(out, table_to_csv(table));
    write_file_atomic(out.string() + ".meta.json", sidecar.dump(2) + "\n");
    return out;
}

// Flat key=value config file; '#' starts a comment, blank lines ignored.
inline std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::map<std::string, std::string> out;
    std::string line;
    u64 line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        const std::string stripped = strip(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config file " + path.string() + ": line " + std::to_string(line_number) +
                              " is not key=value");
        }
        const std::string key = strip(stripped.substr(0, eq));
        const std::string value = strip(stripped.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("config file " + path.string() + ": line " + std::to_string(line_number) +
                              " has an empty key");
        }
        out[key] = value;  // later occurrences win
    }
    return out;
}

}  // namespace gallab

#endif  // GALLAB_EXPERIMENTS_HPP
