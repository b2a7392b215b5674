#include "peuler/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "peuler/errors.hpp"

namespace peuler {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("io: cannot write " + path);
    return out;
}

const char* wave_kind_name(WaveKind k) {
    switch (k) {
        case WaveKind::Shock1: return "shock1";
        case WaveKind::Rarefaction1: return "rarefaction1";
        case WaveKind::Shock2: return "shock2";
        case WaveKind::Rarefaction2: return "rarefaction2";
        case WaveKind::RarefactionShock1: return "rarefaction_shock1";
        case WaveKind::RarefactionShock2: return "rarefaction_shock2";
        default: return "vacuum_fan";
    }
}

} // namespace

void write_field_csv(const std::string& path, const std::vector<FieldRow>& rows,
                     const ProblemParams& pp) {
    std::ofstream out = open_out(path);
    out << "x,t,rho,m,z,w\n";
    for (const FieldRow& row : rows) {
        const Invariants iv = to_invariants(row.u, pp);
        out << format_double(row.x) << ',' << format_double(row.t) << ','
            << format_double(row.u.rho) << ',' << format_double(row.u.m) << ','
            << format_double(iv.z) << ',' << format_double(iv.w) << '\n';
    }
}

void write_lattice_csv(const std::string& path, const std::vector<LatticeState>& levels,
                       const Grid& g, const ProblemParams& pp) {
    std::ofstream out = open_out(path);
    out << "j,n,rho,m,z,w\n";
    for (const LatticeState& lat : levels) {
        for (std::size_t i = 0; i < lat.u.size(); ++i) {
            const int j = g.first_j(lat.n) + 2 * int(i);
            const Invariants iv = to_invariants(lat.u[i], pp);
            out << j << ',' << lat.n << ',' << format_double(lat.u[i].rho) << ','
                << format_double(lat.u[i].m) << ',' << format_double(iv.z) << ','
                << format_double(iv.w) << '\n';
        }
    }
}

std::vector<LatticeState> read_lattice_csv(const std::string& path, const Grid& g) {
    std::ifstream in(path);
    if (!in) throw ConfigError("io: cannot read " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("j,n,", 0) != 0)
        throw ConfigError("io: " + path + " is not a lattice CSV (missing header)");
    std::vector<LatticeState> levels;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        int j, n;
        double rho, m, z, w;
        char c;
        if (!(ls >> j >> c >> n >> c >> rho >> c >> m >> c >> z >> c >> w))
            throw ConfigError("io: malformed lattice row: " + line);
        if (!g.on_lattice(j, n))
            throw ConfigError("io: lattice row (j,n) off the staggered grid: " + line);
        if (int(levels.size()) <= n) {
            levels.resize(n + 1);
            for (int k = 0; k <= n; ++k)
                if (levels[k].u.empty()) {
                    levels[k].n = k;
                    levels[k].u.resize(g.count(k));
                }
        }
        levels[n].u[g.slot(j, n)] = State{rho, m};
    }
    return levels;
}

void write_residual_history_csv(const std::string& path,
                                const std::vector<ResidualRow>& history) {
    std::ofstream out = open_out(path);
    out << "iter,residual,clamp_count\n";
    for (const ResidualRow& row : history)
        out << row.iter << ',' << format_double(row.residual) << ',' << row.clamp_count
            << '\n';
}

ordered_json report_to_json(const VerificationReport& rep) {
    ordered_json checks = ordered_json::array();
    for (const CheckRow& row : rep.checks) {
        ordered_json c;
        c["name"] = row.name;
        c["value"] = format_double(row.value);
        c["threshold"] = format_double(row.threshold);
        c["pass"] = row.pass;
        if (!row.location.empty()) c["worst"] = row.location;
        checks.push_back(c);
    }
    ordered_json j;
    j["all_pass"] = rep.all_pass();
    j["checks"] = checks;
    return j;
}

ordered_json fan_to_json(const WaveFan& fan, const ProblemParams& pp) {
    auto state_json = [&](const State& u) {
        ordered_json s;
        s["rho"] = format_double(u.rho);
        s["m"] = format_double(u.m);
        const Invariants iv = to_invariants(u, pp);
        s["z"] = format_double(iv.z);
        s["w"] = format_double(iv.w);
        return s;
    };
    ordered_json j;
    j["vacuum"] = fan.vacuum;
    j["left"] = state_json(fan.left);
    j["middle"] = state_json(fan.middle);
    j["right"] = state_json(fan.right);
    ordered_json waves = ordered_json::array();
    for (const Wave& w : fan.waves) {
        ordered_json wj;
        wj["kind"] = wave_kind_name(w.kind);
        wj["speed_lo"] = format_double(w.lo);
        wj["speed_hi"] = format_double(w.hi);
        waves.push_back(wj);
    }
    j["waves"] = waves;
    return j;
}

void write_json(const std::string& path, const ordered_json& j) {
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
}

} // namespace peuler
