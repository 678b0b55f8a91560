#include "spectator/csv.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "spectator/errors.h"

namespace spectator {

std::string format_real(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string trace_csv(std::span<const FidelityTrace> traces) {
    std::ostringstream out;
    out << kTraceHeader << "\n";
    for (const FidelityTrace &t : traces) {
        for (size_t i = 0; i < t.size(); i++) {
            out << (i + 1) << ',' << format_real(t.mean_infidelity[i]) << ',' << format_real(t.stderr_[i]) << ','
                << t.runs << ',' << t.censored << ',' << t.scenario << ',' << t.seed << "\n";
        }
    }
    return out.str();
}

std::string landscape_csv(const SweepGrid &grid) {
    std::ostringstream out;
    out << kLandscapeHeader << "\n";
    for (const SweepCell &c : grid.cells) {
        out << c.M << ',' << format_real(c.step_size) << ',' << metric_name(c.metric) << ',' << format_real(c.value)
            << ',' << c.flag << "\n";
    }
    return out.str();
}

std::string rpe_csv(std::span<const RpeResult> rows) {
    std::ostringstream out;
    out << kRpeHeader << "\n";
    for (const RpeResult &r : rows) {
        out << r.budget << ',' << r.depth << ',' << format_real(r.mean_abs_error) << ',' << format_real(r.shot_noise)
            << ',' << format_real(r.crb) << "\n";
    }
    return out.str();
}

void write_file_atomic(const std::filesystem::path &path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw SimError(ErrorKind::Io, "cannot open '" + tmp.string() + "' for writing");
        }
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.flush();
        if (!f) {
            throw SimError(ErrorKind::Io, "write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw SimError(ErrorKind::Io, "cannot move output into '" + path.string() + "'");
    }
}

}  // namespace spectator
