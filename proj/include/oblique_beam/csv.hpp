#pragma once

#include <charconv>
#include <ostream>
#include <string>
#include <system_error>

#include "oblique_beam/dinkelbach.hpp"
#include "oblique_beam/sim_harness.hpp"

namespace oblique_beam::csv {

/// Shortest decimal text that parses back to exactly `x`.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  if (res.ec != std::errc()) return "nan";
  return std::string(buf, res.ptr);
}

inline constexpr const char* kTraceHeader =
    "outer_iter,t_k,mu_k,inner_iters,accepted";
inline constexpr const char* kSweepHeader =
    "P_dB,mean_min_sinr_dB,stderr_dB,mean_outer_iters,mean_inner_iters,mean_ms";

inline void write_trace(std::ostream& os, const SolveReport& report) {
  os << kTraceHeader << '\n';
  for (const auto& rec : report.trace) {
    os << rec.iteration << ',' << format_double(rec.t) << ','
       << format_double(rec.mu) << ',' << rec.inner_iters << ','
       << (rec.accepted ? 1 : 0) << '\n';
  }
}

inline void write_sweep(std::ostream& os, const SweepResult& result) {
  os << kSweepHeader << '\n';
  for (const auto& pt : result.points) {
    os << format_double(pt.power_db) << ','
       << format_double(pt.mean_min_sinr_db) << ','
       << format_double(pt.stderr_db) << ','
       << format_double(pt.mean_outer_iters) << ','
       << format_double(pt.mean_inner_iters) << ','
       << format_double(pt.mean_ms) << '\n';
  }
}

}  // namespace oblique_beam::csv
