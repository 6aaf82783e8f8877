#include "ajscc/trace.hpp"

#include "ajscc/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ajscc {

SourceTrace::SourceTrace(double sample_period, std::vector<double> samples, std::string unit_label)
    : sample_period_(sample_period), samples_(std::move(samples)), unit_label_(std::move(unit_label)) {
    if (!(sample_period_ > 0.0) || !std::isfinite(sample_period_)) {
        throw InputError("trace sample period must be positive and finite");
    }
    if (samples_.empty()) {
        throw InputError("trace must contain at least one sample");
    }
    for (double v : samples_) {
        if (!std::isfinite(v)) {
            throw InputError("trace contains a non-finite sample");
        }
    }
}

SourceTrace SourceTrace::with_samples(std::vector<double> samples) const {
    return SourceTrace(sample_period_, std::move(samples), unit_label_);
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_trace_csv(const std::filesystem::path& path, const SourceTrace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    out << "t_seconds,value\n";
    for (std::size_t i = 0; i < trace.size(); ++i) {
        out << format_double(static_cast<double>(i) * trace.sample_period()) << ','
            << format_double(trace[i]) << '\n';
    }
}

SourceTrace read_trace_csv(const std::filesystem::path& path, std::string unit_label) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open trace file " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line.rfind("t_seconds,value", 0) != 0) {
        throw ConfigError(path.string() + ": expected header `t_seconds,value`");
    }
    std::vector<double> times;
    std::vector<double> values;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": missing comma");
        }
        double t = 0.0;
        double v = 0.0;
        auto r1 = std::from_chars(line.data(), line.data() + comma, t);
        auto r2 = std::from_chars(line.data() + comma + 1, line.data() + line.size(), v);
        if (r1.ec != std::errc{} || r2.ec != std::errc{}) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": malformed number");
        }
        times.push_back(t);
        values.push_back(v);
    }
    if (times.size() < 2) {
        throw ConfigError(path.string() + ": need at least two samples to infer the sample period");
    }
    const double period = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (std::abs((times[i] - times[i - 1]) - period) > 1e-6 * period) {
            throw ConfigError(path.string() + ": samples are not uniformly spaced");
        }
    }
    return SourceTrace(period, std::move(values), std::move(unit_label));
}

} // namespace ajscc
