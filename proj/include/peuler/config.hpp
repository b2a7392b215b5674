#ifndef PEULER_CONFIG_HPP
#define PEULER_CONFIG_HPP

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "peuler/forcing.hpp"
#include "peuler/grid.hpp"
#include "peuler/period_map.hpp"

namespace peuler {

// A validated run description. Flat `section.key = value` text or JSON with
// the same dotted paths; every key can be overridden through the environment
// as PEULER_SECTION_KEY.
struct RunConfig {
    std::string mode = "fixed-point";
    unsigned seed = 1;
    int workers = 1;
    std::string out_dir = "out";

    ProblemParams problem;
    SchemeParams scheme;
    Forcing forcing;
    State ub;

    enum class InitKind { Steady, Constant, Table } init_kind = InitKind::Steady;
    State init_constant;
    std::vector<std::array<double, 3>> init_table; // (x, rho, m), sorted in x

    FixedPointConfig fixed_point;

    State riemann_left, riemann_right;
    double riemann_time = 0.5;

    std::vector<double> snapshots{0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<int> study_Nx{25, 50, 100};
    std::string verify_lattice; // lattice CSV consumed by verify mode

    std::function<State(double)> initial_data() const;
};

// raw key-value layer, exposed for tests
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> parse_config_file(const std::string& path);

// parse + environment overrides + hypothesis validation; violations throw
// ConfigError naming the failed condition (condition-M, condition-X,
// condition-BC, condition-IC)
RunConfig load_config(const std::string& path);
RunConfig config_from_map(std::map<std::string, std::string> kv);

} // namespace peuler

#endif
