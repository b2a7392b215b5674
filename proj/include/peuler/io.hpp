#ifndef PEULER_IO_HPP
#define PEULER_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "peuler/period_map.hpp"
#include "peuler/verify.hpp"

namespace peuler {

using ordered_json = nlohmann::ordered_json;

// shortest round-trippable decimal form
std::string format_double(double v);

struct FieldRow {
    double x, t;
    State u;
};

void write_field_csv(const std::string& path, const std::vector<FieldRow>& rows,
                     const ProblemParams& pp);
void write_lattice_csv(const std::string& path, const std::vector<LatticeState>& levels,
                       const Grid& g, const ProblemParams& pp);
std::vector<LatticeState> read_lattice_csv(const std::string& path, const Grid& g);
void write_residual_history_csv(const std::string& path,
                                const std::vector<ResidualRow>& history);

ordered_json report_to_json(const VerificationReport& rep);
ordered_json fan_to_json(const WaveFan& fan, const ProblemParams& pp);
void write_json(const std::string& path, const ordered_json& j);

} // namespace peuler

#endif
