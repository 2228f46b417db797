#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "swarmest/engine.hpp"

namespace swarmest::harness {

struct SweepNone {};
struct SweepSwitchTime {
    std::vector<std::int64_t> values;
};
struct SweepDeltaPrec {
    std::vector<double> values;
    std::vector<std::int64_t> final_times;  // t_f budgets to contrast; empty = base t_f
};
struct SweepArenaSize {
    struct Entry {
        Arena arena;
        Rect patch;
    };
    std::vector<Entry> values;
};

using Sweep = std::variant<SweepNone, SweepSwitchTime, SweepDeltaPrec, SweepArenaSize>;

/// One experiment: a base parameter set, Monte-Carlo repetitions and an
/// optional sweep. Repetition k of any sweep point runs with seed
/// split_seed(base.seed, k), so results are pairwise comparable across points
/// and independent of how many repetitions run.
struct ExperimentSpec {
    SimParams base;
    int repetitions = 40;
    Sweep sweep = SweepNone{};
    std::filesystem::path out_dir = "out";
    std::int64_t record_stride = 10;
};

void validate(const ExperimentSpec& spec);

/// Aggregates over repetitions for one sweep point.
struct SweepPoint {
    double sweep_value = 0.0;      // t_sw, delta_prec, or arena width
    std::int64_t final_time = 0;   // t_f used for this point
    double mean_e_t = 0.0, std_e_t = 0.0;
    double mean_e_p = 0.0, std_e_p = 0.0;
    double mean_e_a = 0.0, std_e_a = 0.0;
    double mean_decision_time = 0.0;  // t_f when no agent ever switched (censored)
    std::size_t never_switched = 0;   // total over repetitions
};

struct SweepSummary {
    std::vector<SweepPoint> points;
};

struct TimeseriesRow {
    std::int64_t t = 0;
    double e_t = 0.0, e_p = 0.0, e_a = 0.0, frac_switched = 0.0;
};

struct TimeseriesTable {
    std::vector<TimeseriesRow> rows;  // per-sample mean over repetitions
    DecisionTime decision;            // pooled over repetitions
};

/// Mean time series over `repetitions` runs of the base params (any switch
/// mode). No file output; the CLI drivers below wrap this with CSV emission.
TimeseriesTable run_timeseries(const ExperimentSpec& spec);

/// Time-series experiment for a fixed switching time. Emits
/// `timeseries.csv` and `manifest.json` into spec.out_dir.
/// Precondition: base.switch_mode == Fixed (std::invalid_argument otherwise).
TimeseriesTable run_fixed_switch_timeseries(const ExperimentSpec& spec);

/// Final-error-versus-switching-time sweep. Emits `sweep_switch.csv`.
SweepSummary sweep_switch_time(const ExperimentSpec& spec);

/// Adaptive-switching sweep over delta_prec (optionally several time
/// budgets). Emits `sweep_adaptive.csv`. Precondition: Adaptive mode.
SweepSummary sweep_adaptive(const ExperimentSpec& spec);

/// Adaptive runs across arena sizes: per-arena time series plus a summary.
/// Emits `arena_<k>_timeseries.csv` per arena and `sweep_arena.csv`.
SweepSummary sweep_arena(const ExperimentSpec& spec);

/// Initial/final agent positions plus the ground-truth mean, for external
/// iso-contour plots. Emits `positions.csv`.
void emit_positions_snapshot(const RunRecord& record, const std::filesystem::path& out_dir);

/// JSON (de)serialization of parameters and experiment specs. Unknown keys
/// are rejected; all fields are optional with the documented defaults.
SimParams params_from_json_file(const std::filesystem::path& path);
ExperimentSpec spec_from_json_file(const std::filesystem::path& path);
std::string params_to_json(const SimParams& p);

}  // namespace swarmest::harness
