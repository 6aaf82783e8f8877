#pragma once

#include "ajscc/analysis.hpp"
#include "ajscc/config.hpp"
#include "ajscc/modem.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ajscc {

// Raw-unit source signals on the common sample grid.
struct SourcePair {
    SourceTrace cytometry;
    SourceTrace gsr;
};

struct RunReport {
    RunConfig config;
    std::uint64_t run_seed = 0;
    std::size_t blocks = 0;
    MsePair mse;
    std::vector<PulseEvent> source_peaks;
    std::vector<PulseEvent> receiver_peaks;
    std::optional<KsResult> ks; // absent when either side has < 5 peaks
    double wall_time_s = 0.0;
    std::string code_version;

    // Block-rate traces: references (decimated to the receiver grid), raw
    // decoder output, and filtered output. Written as CSV, not part of the JSON.
    std::optional<SourceTrace> x1_reference, x2_reference;
    std::optional<SourceTrace> x1_decoded, x2_decoded;
    std::optional<SourceTrace> x1_filtered, x2_filtered;
};

const char* code_version() noexcept;
extern const char* const kSyntheticSourceNote;

// Seed for one point of an experiment: mixes master seed, level count and channel family.
std::uint64_t run_seed(std::uint64_t master, int levels, ChannelFamily family);

// Synthesised (or loaded) sources. Depends on the master seed only, so every
// point of a sweep sees identical source data.
SourcePair make_sources(const RunConfig& cfg);

// generate -> rescale -> encode -> modulate -> channel -> demodulate -> decode -> filter -> metrics.
// Failures surface as StageError naming the stage.
RunReport run_link(const RunConfig& cfg);
RunReport run_link(const RunConfig& cfg, const SourcePair& sources);
// As above; every received block (after the channel) is also written to `dump`.
RunReport run_link(const RunConfig& cfg, const SourcePair& sources, BlockDumpWriter* dump);

// One run per level count. Points run on up to `workers` threads (0: hardware
// concurrency); results keep the order of `levels`.
std::vector<RunReport> sweep_levels(const RunConfig& cfg, const std::vector<int>& levels, unsigned workers = 0);

// `start:stop:step` (inclusive) or a comma-separated list.
std::vector<int> parse_level_spec(const std::string& spec);

std::string report_to_json(const RunReport& r, bool include_wall_time = true);
void write_run_outputs(const RunReport& r, const std::filesystem::path& dir);
void write_sweep_csv(const std::filesystem::path& path, const std::vector<RunReport>& reports);

struct ReproduceOptions {
    std::uint64_t seed = 7;
    // Run length per point; 0 picks the experiment default.
    double duration = 0.0;
    std::vector<int> levels;                                  // empty: 5..100 step 5
    PeakInterpolation interpolation = PeakInterpolation::none; // raw-bin detector
    unsigned workers = 0;
};

inline const std::vector<std::string> kExperimentIds = {"fig4",  "fig5cdf", "fig6a", "fig6b", "fig6c",
                                                         "fig7a", "fig7b",   "fig7c", "table1"};

struct Table1Row {
    int case_id = 0;
    ChannelFamily family = ChannelFamily::awgn;
    double csnr_db = 0.0;
    double doppler_hz = 0.0;
    int levels = 0;
    std::size_t source_peaks = 0;
    std::size_t receiver_peaks = 0;
    KsResult ks;
};

// Base configuration for the figure/table experiments.
RunConfig experiment_config(const ReproduceOptions& opt, ReceiverProfile profile, ChannelFamily family,
                            double csnr_db, double default_duration);
std::vector<Table1Row> run_table1(const ReproduceOptions& opt);
void write_table1_csv(const std::filesystem::path& path, const std::vector<Table1Row>& rows);

// Writes the artefacts for one experiment id; returns the files written.
std::vector<std::filesystem::path> reproduce(const std::string& experiment_id, const std::filesystem::path& out_dir,
                                             const ReproduceOptions& opt = {});

} // namespace ajscc
