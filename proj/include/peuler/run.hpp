#ifndef PEULER_RUN_HPP
#define PEULER_RUN_HPP

#include "peuler/config.hpp"

namespace peuler {

// exit codes per failure class
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitVerification = 4;

// mode dispatch; artifacts land under cfg.out_dir
int run(const RunConfig& cfg);

} // namespace peuler

#endif
