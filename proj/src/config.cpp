#include "peuler/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "peuler/errors.hpp"

namespace peuler {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// keys recognized for environment overrides (forcing terms are matched by prefix)
const char* kKnownKeys[] = {
    "mode", "seed", "workers", "out",
    "problem.gamma", "problem.K", "problem.L", "problem.M", "problem.eps",
    "scheme.Nx", "scheme.alpha", "scheme.beta", "scheme.delta_exp", "scheme.rho_scale",
    "boundary.rho_b", "boundary.m_b",
    "init.kind", "init.rho", "init.m", "init.file",
    "fixed_point.lambda", "fixed_point.max_iters", "fixed_point.residual_tol",
    "fixed_point.delta_dx", "fixed_point.apply_shift", "fixed_point.clamp",
    "riemann.rho_l", "riemann.m_l", "riemann.rho_r", "riemann.m_r", "riemann.t",
    "evolve.snapshots", "study.Nx", "verify.lattice",
};

std::string env_name(const std::string& key) {
    std::string out = "PEULER_";
    for (char c : key) out += (c == '.') ? '_' : char(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

void flatten_json(const nlohmann::json& node, const std::string& prefix,
                  std::map<std::string, std::string>& out) {
    if (node.is_object()) {
        for (auto it = node.begin(); it != node.end(); ++it) {
            const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
            flatten_json(it.value(), key, out);
        }
    } else if (node.is_array()) {
        // arrays of scalars join with spaces; arrays of objects index numerically
        if (!node.empty() && node.front().is_object()) {
            for (std::size_t i = 0; i < node.size(); ++i)
                flatten_json(node[i], prefix + "." + std::to_string(i), out);
        } else {
            std::ostringstream os;
            for (std::size_t i = 0; i < node.size(); ++i) {
                if (i) os << ' ';
                os << (node[i].is_string() ? node[i].get<std::string>() : node[i].dump());
            }
            out[prefix] = os.str();
        }
    } else if (node.is_string()) {
        out[prefix] = node.get<std::string>();
    } else {
        out[prefix] = node.dump();
    }
}

double to_double(const std::map<std::string, std::string>& kv, const std::string& key,
                 double fallback, bool* present = nullptr) {
    auto it = kv.find(key);
    if (present) *present = it != kv.end() && trim(it->second) != "auto";
    if (it == kv.end() || trim(it->second) == "auto") return fallback;
    try {
        return std::stod(it->second);
    } catch (...) {
        throw ConfigError("config: key '" + key + "' is not a number: " + it->second);
    }
}

long to_long(const std::map<std::string, std::string>& kv, const std::string& key,
             long fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
        return std::stol(it->second);
    } catch (...) {
        throw ConfigError("config: key '" + key + "' is not an integer: " + it->second);
    }
}

bool to_bool(const std::map<std::string, std::string>& kv, const std::string& key,
             bool fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    const std::string v = trim(it->second);
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw ConfigError("config: key '" + key + "' is not a boolean: " + v);
}

std::string to_string_key(const std::map<std::string, std::string>& kv,
                          const std::string& key, const std::string& fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : trim(it->second);
}

std::vector<double> to_doubles(const std::string& text) {
    std::vector<double> out;
    std::istringstream is(text);
    std::string tok;
    while (is >> tok) {
        if (tok == ",") continue;
        std::string cleaned;
        for (char c : tok)
            if (c != ',') cleaned += c;
        if (!cleaned.empty()) out.push_back(std::stod(cleaned));
    }
    return out;
}

Forcing parse_forcing(const std::map<std::string, std::string>& kv) {
    Forcing f;
    for (int i = 0;; ++i) {
        const std::string key = "forcing.term." + std::to_string(i);
        auto it = kv.find(key);
        if (it == kv.end()) break;
        std::istringstream is(it->second);
        ForcingTerm term;
        std::string trig = "sin";
        if (!(is >> term.c >> term.a >> term.b >> term.freq >> term.phase))
            throw ConfigError("config: malformed forcing term '" + key +
                              "' (want: c a b freq phase [sin|cos])");
        is >> trig;
        if (trig != "sin" && trig != "cos")
            throw ConfigError("config: forcing trig must be sin or cos in '" + key + "'");
        term.use_sin = trig == "sin";
        f.terms.push_back(term);
    }
    return f;
}

} // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    const std::string probe = trim(text);
    if (!probe.empty() && (probe.front() == '{' || probe.front() == '[')) {
        nlohmann::json j = nlohmann::json::parse(text);
        flatten_json(j, "", kv);
        return kv;
    }
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " has no '='");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config_text(os.str());
}

RunConfig config_from_map(std::map<std::string, std::string> kv) {
    // environment overrides
    for (const char* key : kKnownKeys) {
        if (const char* v = std::getenv(env_name(key).c_str())) kv[key] = v;
    }
    for (int i = 0; i < 32; ++i) {
        const std::string key = "forcing.term." + std::to_string(i);
        if (const char* v = std::getenv(env_name(key).c_str())) kv[key] = v;
    }

    RunConfig cfg;
    cfg.mode = to_string_key(kv, "mode", cfg.mode);
    cfg.seed = unsigned(to_long(kv, "seed", 1));
    cfg.workers = int(to_long(kv, "workers", 1));
    cfg.out_dir = to_string_key(kv, "out", cfg.out_dir);

    cfg.forcing = parse_forcing(kv);
    const double fsup = cfg.forcing.sup_bound();

    const double gamma = to_double(kv, "problem.gamma", 1.4);
    bool k_given = false;
    double K = to_double(kv, "problem.K", fsup, &k_given);
    const double L = to_double(kv, "problem.L", 1.3);
    const double M = to_double(kv, "problem.M", 2.5);
    const double eps = to_double(kv, "problem.eps", 0.0);
    if (k_given) {
        // condition-X: the supplied bound must dominate the forcing
        const double measured = cfg.forcing.measured_sup(400);
        if (measured > K + 1e-12)
            throw ConfigError("config: condition-X violated: measured sup|F| = " +
                              std::to_string(measured) + " exceeds K = " + std::to_string(K));
    } else {
        K = fsup;
    }
    try {
        cfg.problem = ProblemParams(gamma, K, L, M, eps);
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("config: condition-M violated: ") + e.what());
    }

    cfg.scheme.Nx = int(to_long(kv, "scheme.Nx", 50));
    cfg.scheme.alpha = to_double(kv, "scheme.alpha", 0.75);
    cfg.scheme.beta = to_double(kv, "scheme.beta", -1.0);
    cfg.scheme.delta_exp = to_double(kv, "scheme.delta_exp", -1.0);
    cfg.scheme.rho_scale = to_double(kv, "scheme.rho_scale", -1.0);
    cfg.scheme.finalize(cfg.problem);

    cfg.ub = State{to_double(kv, "boundary.rho_b", 0.0), to_double(kv, "boundary.m_b", 0.0)};
    if (!(cfg.ub.rho > 0.0)) throw ConfigError("config: boundary.rho_b must be positive");
    {
        const Invariants ivb = to_invariants(cfg.ub, cfg.problem);
        if (!(ivb.z >= L - 1e-12 && ivb.w <= M + 1e-12))
            throw ConfigError("config: condition-BC violated: need L <= z(u_b) and w(u_b) <= M"
                              " (z_b = " + std::to_string(ivb.z) +
                              ", w_b = " + std::to_string(ivb.w) + ")");
        if (lambda1(cfg.ub, cfg.problem) < 0.0)
            throw ConfigError("config: condition-BC violated: lambda1(u_b) < 0 (inflow not "
                              "supersonic)");
        if (std::abs(cfg.ub.m) > cfg.problem.mach_bound * cfg.ub.rho)
            throw ConfigError("config: boundary momentum exceeds the Mach-like bound C rho");
    }

    const std::string kind = to_string_key(kv, "init.kind", "steady");
    if (kind == "steady") {
        cfg.init_kind = RunConfig::InitKind::Steady;
    } else if (kind == "constant") {
        cfg.init_kind = RunConfig::InitKind::Constant;
        cfg.init_constant =
            State{to_double(kv, "init.rho", cfg.ub.rho), to_double(kv, "init.m", cfg.ub.m)};
    } else if (kind == "table") {
        cfg.init_kind = RunConfig::InitKind::Table;
        const std::string file = to_string_key(kv, "init.file", "");
        std::ifstream in(file);
        if (!in) throw ConfigError("config: init.file not readable: " + file);
        std::string line;
        while (std::getline(in, line)) {
            line = trim(line);
            if (line.empty() || !(std::isdigit(static_cast<unsigned char>(line[0])) ||
                                  line[0] == '-' || line[0] == '.'))
                continue;
            std::array<double, 3> row{};
            char comma;
            std::istringstream ls(line);
            if (ls >> row[0] >> comma >> row[1] >> comma >> row[2])
                cfg.init_table.push_back(row);
        }
        if (cfg.init_table.size() < 2)
            throw ConfigError("config: init.file needs at least two rows (x,rho,m)");
        std::sort(cfg.init_table.begin(), cfg.init_table.end(),
                  [](const auto& a, const auto& b) { return a[0] < b[0]; });
    } else {
        throw ConfigError("config: init.kind must be steady, constant or table");
    }

    // condition-IC on a fine sampling of the initial data
    {
        const auto u0 = cfg.initial_data();
        for (int i = 0; i <= 1000; ++i) {
            const double x = double(i) / 1000.0;
            const State u = u0(x);
            if (u.rho < 0.0)
                throw ConfigError("config: condition-IC violated: rho_0 < 0 at x = " +
                                  std::to_string(x));
            if (u.vacuum()) continue;
            if (std::abs(u.m) > cfg.problem.mach_bound * u.rho)
                throw ConfigError("config: initial momentum exceeds the Mach-like bound at x = " +
                                  std::to_string(x));
            const Invariants iv = to_invariants(u, cfg.problem);
            if (iv.z < L - K * x - 1e-10 || iv.w > M + K * x + 1e-10)
                throw ConfigError("config: condition-IC violated at x = " + std::to_string(x) +
                                  " (z = " + std::to_string(iv.z) +
                                  ", w = " + std::to_string(iv.w) + ")");
        }
    }

    cfg.fixed_point.relaxation = to_double(kv, "fixed_point.lambda", 0.5);
    cfg.fixed_point.max_iters = int(to_long(kv, "fixed_point.max_iters", 5000));
    cfg.fixed_point.residual_tol = to_double(kv, "fixed_point.residual_tol", 1e-6);
    cfg.fixed_point.delta_dx = to_double(kv, "fixed_point.delta_dx", -1.0);
    cfg.fixed_point.apply_shift = to_bool(kv, "fixed_point.apply_shift", true);
    cfg.fixed_point.clamp_to_bounds = to_bool(kv, "fixed_point.clamp", true);
    if (!(cfg.fixed_point.relaxation > 0.0 && cfg.fixed_point.relaxation <= 1.0))
        throw ConfigError("config: fixed_point.lambda must lie in (0, 1]");

    cfg.riemann_left = State{to_double(kv, "riemann.rho_l", 1.0), to_double(kv, "riemann.m_l", 0.0)};
    cfg.riemann_right =
        State{to_double(kv, "riemann.rho_r", 1.0), to_double(kv, "riemann.m_r", 0.0)};
    cfg.riemann_time = to_double(kv, "riemann.t", 0.5);

    if (kv.count("evolve.snapshots")) cfg.snapshots = to_doubles(kv.at("evolve.snapshots"));
    if (kv.count("study.Nx")) {
        cfg.study_Nx.clear();
        for (double v : to_doubles(kv.at("study.Nx"))) cfg.study_Nx.push_back(int(v));
    }
    cfg.verify_lattice = to_string_key(kv, "verify.lattice", "");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    return config_from_map(parse_config_file(path));
}

std::function<State(double)> RunConfig::initial_data() const {
    if (init_kind == InitKind::Constant) {
        const State c = init_constant;
        return [c](double) { return c; };
    }
    if (init_kind == InitKind::Table) {
        const auto table = init_table;
        return [table](double x) {
            auto hi = std::lower_bound(table.begin(), table.end(), x,
                                       [](const auto& row, double xx) { return row[0] < xx; });
            if (hi == table.begin()) return State{(*hi)[1], (*hi)[2]};
            if (hi == table.end()) return State{table.back()[1], table.back()[2]};
            const auto lo = hi - 1;
            const double t = ((*hi)[0] > (*lo)[0]) ? (x - (*lo)[0]) / ((*hi)[0] - (*lo)[0]) : 0.0;
            return State{(1 - t) * (*lo)[1] + t * (*hi)[1], (1 - t) * (*lo)[2] + t * (*hi)[2]};
        };
    }
    const Invariants ivb = to_invariants(ub, problem);
    const ProblemParams pp = problem;
    return [ivb, pp](double x) {
        return from_invariants(Invariants{ivb.z - pp.K * x, ivb.w + pp.K * x}, pp);
    };
}

} // namespace peuler
