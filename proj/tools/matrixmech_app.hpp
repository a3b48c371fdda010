#ifndef MATRIXMECH_APP_HPP
#define MATRIXMECH_APP_HPP

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <matrixmech/classical_series.hpp>
#include <matrixmech/oracle.hpp>
#include <matrixmech/quantum_ladder.hpp>
#include <matrixmech/verification.hpp>

namespace matrixmech::cli
{

enum ExitCode
{
    exit_ok = 0,
    exit_check_failed = 1,
    exit_usage = 2,
};

class config_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig
{
    OscillatorSpec spec{};
    int n_max = 10;
    int order = 1;
    double tol = 1e-12;
    std::string format = "csv";
    std::size_t oracle_n = 0;
    double a1 = 1.0;
    Mutation mutation = Mutation::None;
};

// ---- config parsing ---------------------------------------------------------

inline const std::vector<std::string> &config_keys()
{
    static const std::vector<std::string> keys = {"m", "omega0", "lambda", "h", "kind", "nmax", "order",
                                                  "tol", "format", "oracle_n", "a1", "mutate", "r_max"};
    return keys;
}

/// Maps spellings such as "n_max", "oracle-n" or "mass" onto the canonical key.
inline std::string canonical_key(std::string key)
{
    for (auto &c : key) {
        if (c == '-') {
            c = '_';
        }
    }
    if (key == "n_max") {
        return "nmax";
    }
    if (key == "mass") {
        return "m";
    }
    return key;
}

inline std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Flat key=value lines; '#' starts a comment.
inline std::map<std::string, std::string> parse_config_text(std::istream &in, const std::string &origin)
{
    std::map<std::string, std::string> values;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw config_error(origin + ":" + std::to_string(lineno) + ": expected key=value");
        }
        const std::string key = canonical_key(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        const auto &keys = config_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            throw config_error(origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
        values[key] = value;
    }
    return values;
}

inline std::map<std::string, std::string> parse_config_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in) {
        throw config_error("cannot open config file '" + path + "'");
    }
    return parse_config_text(in, path);
}

inline double parse_double(const std::string &key, const std::string &text)
{
    double v = 0.0;
    const char *first = text.data();
    const char *last = first + text.size();
    if (!text.empty() && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw config_error("invalid number for " + key + ": '" + text + "'");
    }
    return v;
}

inline long parse_int(const std::string &key, const std::string &text)
{
    long v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw config_error("invalid integer for " + key + ": '" + text + "'");
    }
    return v;
}

inline RunConfig build_config(const std::map<std::string, std::string> &values)
{
    RunConfig c;
    for (const auto &[key, text] : values) {
        if (key == "m") {
            c.spec.mass = parse_double(key, text);
        } else if (key == "omega0") {
            c.spec.omega0 = parse_double(key, text);
        } else if (key == "lambda") {
            c.spec.lambda = parse_double(key, text);
        } else if (key == "h") {
            c.spec.planck_h = parse_double(key, text);
        } else if (key == "kind") {
            const auto k = parse_kind(text);
            if (!k) {
                throw config_error("unknown kind '" + text + "' (expected harmonic, x2 or x3)");
            }
            c.spec.kind = *k;
        } else if (key == "nmax") {
            const long n = parse_int(key, text);
            if (n < 1 || n > 200) {
                throw config_error("nmax must lie in [1, 200]");
            }
            c.n_max = static_cast<int>(n);
        } else if (key == "order") {
            const long k = parse_int(key, text);
            if (k < 0) {
                throw config_error("order must be non-negative");
            }
            c.order = static_cast<int>(k);
        } else if (key == "tol") {
            c.tol = parse_double(key, text);
            if (!(c.tol > 0.0)) {
                throw config_error("tol must be positive");
            }
        } else if (key == "format") {
            if (text != "csv" && text != "json") {
                throw config_error("format must be csv or json");
            }
            c.format = text;
        } else if (key == "oracle_n") {
            const long n = parse_int(key, text);
            if (n != 0 && (n < 8 || n > 1024)) {
                throw config_error("oracle-n must be 0 (default) or lie in [8, 1024]");
            }
            c.oracle_n = static_cast<std::size_t>(n);
        } else if (key == "a1") {
            c.a1 = parse_double(key, text);
        } else if (key == "mutate") {
            const auto m = parse_mutation(text);
            if (!m) {
                throw config_error("unknown mutation '" + text + "' (expected a2, a0 or W)");
            }
            c.mutation = *m;
        } else if (key == "r_max") {
            c.spec.smallness_max = parse_double(key, text);
        }
    }
    try {
        c.spec.validate();
    } catch (const invalid_spec &e) {
        throw config_error(e.what());
    }
    return c;
}

// ---- output -----------------------------------------------------------------

/// 15 significant digits; negative zero prints as 0.
inline std::string format_number(double v)
{
    if (v == 0.0) {
        return "0";
    }
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

/// The value a reader of format_number recovers.
inline double rounded(double v)
{
    const std::string s = format_number(v);
    return std::strtod(s.c_str(), nullptr);
}

using Cell = std::variant<std::monostate, long long, double, std::string>;

struct Table
{
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

inline std::string csv_escape(const std::string &s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + '"';
}

inline std::string cell_text(const Cell &c)
{
    struct
    {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(long long v) const { return std::to_string(v); }
        std::string operator()(double v) const { return format_number(v); }
        std::string operator()(const std::string &v) const { return csv_escape(v); }
    } visitor;
    return std::visit(visitor, c);
}

inline void write_csv(std::ostream &out, const Table &t)
{
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        out << (i ? "," : "") << t.columns[i];
    }
    out << '\n';
    for (const auto &row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << cell_text(row[i]);
        }
        out << '\n';
    }
}

inline nlohmann::ordered_json cell_json(const Cell &c)
{
    struct
    {
        nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
        nlohmann::ordered_json operator()(long long v) const { return v; }
        nlohmann::ordered_json operator()(double v) const { return rounded(v); }
        nlohmann::ordered_json operator()(const std::string &v) const { return v; }
    } visitor;
    return std::visit(visitor, c);
}

inline nlohmann::ordered_json table_json(const Table &t)
{
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto &row : t.rows) {
        nlohmann::ordered_json r = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            r[t.columns[i]] = cell_json(row[i]);
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

/// Re-renders the rows of an emitted JSON document as CSV; used to check the round trip.
inline std::string csv_from_json(const nlohmann::ordered_json &doc)
{
    Table t;
    for (const auto &c : doc.at("columns")) {
        t.columns.push_back(c.get<std::string>());
    }
    for (const auto &r : doc.at("rows")) {
        std::vector<Cell> row;
        for (const auto &name : t.columns) {
            const auto &v = r.at(name);
            if (v.is_null()) {
                row.emplace_back(std::monostate{});
            } else if (v.is_number_integer()) {
                row.emplace_back(v.get<long long>());
            } else if (v.is_number()) {
                row.emplace_back(v.get<double>());
            } else {
                row.emplace_back(v.get<std::string>());
            }
        }
        t.rows.push_back(std::move(row));
    }
    std::ostringstream os;
    write_csv(os, t);
    return os.str();
}

inline nlohmann::ordered_json spec_json(const RunConfig &c)
{
    nlohmann::ordered_json j;
    j["kind"] = std::string(to_string(c.spec.effective_kind()));
    j["m"] = rounded(c.spec.mass);
    j["omega0"] = rounded(c.spec.omega0);
    j["h"] = rounded(c.spec.planck_h);
    j["lambda"] = rounded(c.spec.lambda);
    j["nmax"] = c.n_max;
    j["order"] = c.order;
    return j;
}

inline void emit(std::ostream &out, const RunConfig &c, const std::string &command, const Table &t,
                 nlohmann::ordered_json extra = nlohmann::ordered_json::object())
{
    if (c.format == "json") {
        nlohmann::ordered_json doc;
        doc["command"] = command;
        doc["config"] = spec_json(c);
        for (auto it = extra.begin(); it != extra.end(); ++it) {
            doc[it.key()] = it.value();
        }
        doc["columns"] = t.columns;
        doc["rows"] = table_json(t);
        out << doc.dump(2) << '\n';
    } else {
        write_csv(out, t);
    }
}

// ---- commands ---------------------------------------------------------------

inline TransitionTable solve_for_output(const RunConfig &c)
{
    return solve_with_levels(c.spec, padded_ladder(c.n_max, c.order), c.order);
}

inline int cmd_levels(const RunConfig &c, std::ostream &out)
{
    const TransitionTable t = solve_for_output(c);
    Table tab{{"n", "W0", "W1", "W_total"}, {}};
    for (int n = 0; n <= c.n_max; ++n) {
        const series &w = t.level(n);
        tab.rows.push_back({Cell{static_cast<long long>(n)}, Cell{w[0]}, Cell{w[1]}, Cell{w(c.spec.lambda)}});
    }
    emit(out, c, "levels", tab);
    return exit_ok;
}

inline int cmd_lines(const RunConfig &c, std::ostream &out)
{
    const TransitionTable t = solve_for_output(c);
    std::vector<SpectralLine> lines = line_spectrum(t);
    std::erase_if(lines, [&c](const SpectralLine &l) { return l.upper > c.n_max; });
    double strongest = 0.0;
    for (const auto &l : lines) {
        strongest = std::max(strongest, l.amplitude * l.amplitude);
    }
    Table tab{{"n", "m", "omega", "rel_intensity", "amplitude_order"}, {}};
    for (const auto &l : lines) {
        const double rel = strongest > 0.0 ? l.amplitude * l.amplitude / strongest : 0.0;
        tab.rows.push_back({Cell{static_cast<long long>(l.upper)}, Cell{static_cast<long long>(l.lower)}, Cell{l.omega},
                            Cell{rel}, Cell{static_cast<long long>(l.amplitude_order)}});
    }
    nlohmann::ordered_json extra;
    extra["intensity_model"] = "squared_amplitude";
    emit(out, c, "lines", tab, extra);
    return exit_ok;
}

inline int cmd_classical(const RunConfig &c, std::ostream &out)
{
    const FourierSeries s = solve_classical(c.spec, c.a1, c.order);
    Table tab{{"quantity", "tau", "order", "value"}, {}};
    for (int tau = 0; tau <= s.highest_harmonic(); ++tau) {
        for (int k = 0; k <= s.table_degree(); ++k) {
            const double v = s.coeff(tau, k);
            if (s.solved(tau, k) && v != 0.0) {
                tab.rows.push_back({Cell{std::string("coeff")}, Cell{static_cast<long long>(tau)},
                                    Cell{static_cast<long long>(k)}, Cell{v}});
            }
        }
    }
    for (int k = 0; k <= s.max_order; ++k) {
        tab.rows.push_back({Cell{std::string("omega2")}, Cell{}, Cell{static_cast<long long>(k)},
                            Cell{s.omega_squared[static_cast<std::size_t>(k)]}});
    }
    const ClassicalEnergy e = classical_energy(c.spec, s);
    for (int k = 0; k <= s.max_order; ++k) {
        tab.rows.push_back({Cell{std::string("energy")}, Cell{}, Cell{static_cast<long long>(k)},
                            Cell{e.constant[static_cast<std::size_t>(k)]}});
    }
    nlohmann::ordered_json extra;
    extra["a1"] = rounded(c.a1);
    emit(out, c, "classical", tab, extra);
    return exit_ok;
}

inline int cmd_verify(const RunConfig &c, std::ostream &out, std::ostream &err)
{
    VerifyOptions opt;
    opt.n_max = c.n_max;
    opt.order = c.order;
    opt.tol = c.tol;
    opt.oracle_n = c.oracle_n;
    opt.mutation = c.mutation;
    const VerifyReport rep = run_verification(c.spec, opt);
    if (c.mutation != Mutation::None && !rep.mutation_applied) {
        err << "warning: mutation '" << to_string(c.mutation) << "' has no effect on this table\n";
    }
    Table tab{{"check", "measured", "tolerance", "status", "detail"}, {}};
    for (const auto &ch : rep.checks) {
        tab.rows.push_back({Cell{ch.name}, Cell{ch.measured}, Cell{ch.tolerance},
                            Cell{std::string(to_string(ch.status))}, Cell{ch.detail}});
    }
    nlohmann::ordered_json extra;
    extra["pass"] = rep.pass();
    extra["mutation"] = std::string(to_string(c.mutation));
    emit(out, c, "verify", tab, extra);
    for (const auto &ch : rep.checks) {
        if (ch.status == CheckStatus::Fail) {
            err << "FAIL " << ch.name << ": " << format_number(ch.measured) << " > " << format_number(ch.tolerance) << '\n';
        }
    }
    return rep.pass() ? exit_ok : exit_check_failed;
}

inline int cmd_oracle_compare(const RunConfig &c, std::ostream &out, std::ostream &err)
{
    const TransitionTable t = solve_for_output(c);
    const std::vector<double> lambdas = oracle_lambdas(c.spec, t.trusted_max());
    CompareOptions opt;
    opt.basis = c.oracle_n;
    const CompareReport rep = compare(t, lambdas, opt);
    Table tab{{"lambda", "n", "W_pert", "E_oracle", "level_diff", "level_tol", "amp_pert", "amp_oracle", "amp_rel_diff",
               "status"},
              {}};
    for (const auto &r : rep.rows) {
        tab.rows.push_back({Cell{r.lambda}, Cell{static_cast<long long>(r.n)}, Cell{r.w_pert}, Cell{r.e_oracle},
                            Cell{r.level_diff}, Cell{r.level_tol}, Cell{r.amp_pert}, Cell{r.amp_oracle},
                            Cell{r.amp_rel_diff}, Cell{std::string(r.pass ? "PASS" : "FAIL")}});
    }
    nlohmann::ordered_json extra;
    extra["basis"] = rep.basis;
    extra["convergence_delta"] = rounded(rep.convergence_delta);
    if (rep.exponent_defined) {
        extra["scaling_exponent"] = rounded(rep.scaling_exponent);
        extra["scaling_constant"] = rounded(rep.scaling_constant);
    } else {
        extra["scaling_exponent"] = nullptr;
        extra["scaling_constant"] = nullptr;
    }
    extra["pass"] = rep.pass;
    emit(out, c, "oracle-compare", tab, extra);
    if (c.format == "csv") {
        err << "basis " << rep.basis << ", convergence delta " << format_number(rep.convergence_delta);
        if (rep.exponent_defined) {
            err << ", scaling exponent " << format_number(rep.scaling_exponent);
        }
        err << (rep.pass ? ", PASS\n" : ", FAIL\n");
    }
    return rep.pass ? exit_ok : exit_check_failed;
}

// ---- entry point ------------------------------------------------------------

/// Runs one invocation; args excludes the program name. Returns the exit code.
inline int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err,
               const char *env_config = std::getenv("MATRIXMECH_CONFIG"))
{
    CLI::App app{"Matrix mechanics for anharmonic oscillators", "matrixmech"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1, 1);

    std::map<std::string, std::string> raw;
    std::string config_path;
    std::map<std::string, std::vector<CLI::Option *>> bound;
    struct Flag
    {
        const char *key;
        const char *name;
        const char *help;
    };
    const Flag flags[] = {
        {"m", "--m", "mass (default 1)"},
        {"omega0", "--omega0", "harmonic angular frequency (default 1)"},
        {"lambda", "--lambda", "anharmonic coupling (default 0)"},
        {"h", "--h", "Planck constant (default 2 pi)"},
        {"kind", "--kind", "harmonic, x2 or x3"},
        {"nmax", "--nmax", "highest reported state (default 10)"},
        {"order", "--order", "perturbation order (default 1)"},
        {"tol", "--tol", "identity tolerance for verify (default 1e-12)"},
        {"format", "--format", "csv or json"},
        {"oracle_n", "--oracle-n", "oracle basis size (0 = automatic)"},
        {"a1", "--a1", "classical fundamental amplitude (default 1)"},
        {"mutate", "--mutate", "inject a fault: a2, a0 or W"},
        {"r_max", "--r-max", "bound on the dimensionless coupling (default 0.1)"},
    };
    const std::pair<const char *, const char *> commands[] = {
        {"levels", "energy levels W(n)"},
        {"lines", "spectral lines with frequencies and relative intensities"},
        {"classical", "classical harmonic-balance series and energy"},
        {"verify", "run every identity, residual and oracle check"},
        {"oracle-compare", "compare against exact diagonalization"},
    };
    for (const auto &[name, desc] : commands) {
        CLI::App *sub = app.add_subcommand(name, desc);
        for (const auto &f : flags) {
            bound[f.key].push_back(sub->add_option(f.name, raw[f.key], f.help));
        }
        sub->add_option("--config", config_path, "key=value config file (default $MATRIXMECH_CONFIG)");
    }

    std::vector<const char *> argv{"matrixmech"};
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    RunConfig config;
    try {
        std::map<std::string, std::string> values;
        if (config_path.empty() && env_config != nullptr) {
            config_path = env_config;
        }
        if (!config_path.empty()) {
            values = parse_config_file(config_path);
        }
        for (const auto &[key, opts] : bound) {
            for (const CLI::Option *o : opts) {
                if (o->count() > 0) {
                    values[key] = raw[key];
                }
            }
        }
        config = build_config(values);
    } catch (const config_error &e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }

    try {
        if (command == "levels") {
            return cmd_levels(config, out);
        }
        if (command == "lines") {
            return cmd_lines(config, out);
        }
        if (command == "classical") {
            return cmd_classical(config, out);
        }
        if (command == "verify") {
            return cmd_verify(config, out, err);
        }
        return cmd_oracle_compare(config, out, err);
    } catch (const invalid_spec &e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const smallness_violation &e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const vanishing_divisor &e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return exit_check_failed;
    }
}

} // namespace matrixmech::cli

#endif
