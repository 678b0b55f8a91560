#ifndef SPECTATOR_CSV_H
#define SPECTATOR_CSV_H

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "spectator/feedback_engine.h"
#include "spectator/rpe_lab.h"

namespace spectator {

/// 17 significant digits, so parsing the text returns the same double.
/// Non-finite values print as nan, inf, -inf.
std::string format_real(double x);

inline constexpr std::string_view kTraceHeader = "step,mean_infidelity,stderr,runs,censored,scenario,seed";
inline constexpr std::string_view kLandscapeHeader = "m,step_size,metric,value,flag";
inline constexpr std::string_view kRpeHeader = "budget,depth,mean_abs_error,shot_noise,crb";

/// Header plus one row per step of each trace, traces in the given order.
std::string trace_csv(std::span<const FidelityTrace> traces);
std::string landscape_csv(const SweepGrid &grid);
std::string rpe_csv(std::span<const RpeResult> rows);

/// Writes to a sibling temporary file and renames it over `path`.
/// Throws SimError(Io) naming the path.
void write_file_atomic(const std::filesystem::path &path, std::string_view content);

}  // namespace spectator

#endif
