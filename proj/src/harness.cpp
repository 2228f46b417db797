#include "swarmest/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#ifndef SWARMEST_GIT_DESCRIBE
#define SWARMEST_GIT_DESCRIBE "unknown"
#endif

namespace swarmest::harness {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void check_keys(const json& j, std::initializer_list<std::string_view> allowed,
                const std::string& ctx) {
    for (const auto& item : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            fail("unknown key '" + item.key() + "' in " + ctx);
    }
}

Vec2 vec2_from(const json& j, const std::string& ctx) {
    if (!j.is_array() || j.size() != 2) fail(ctx + " must be a [x, y] array");
    return {j[0].get<double>(), j[1].get<double>()};
}

FieldSpec field_from_json(const json& j, const Arena& arena, double sigma) {
    check_keys(j, {"kind", "center", "height", "slope", "peaks", "sigma"}, "field");
    const std::string kind = j.value("kind", std::string("cone"));
    FieldSpec f;
    if (kind == "cone") {
        f = FieldSpec::default_cone(arena, sigma);
        if (j.contains("center")) f.center = vec2_from(j.at("center"), "field.center");
        if (j.contains("height")) f.height = j.at("height").get<double>();
        if (j.contains("slope")) f.slope = j.at("slope").get<double>();
    } else if (kind == "multi_peak") {
        f = FieldSpec::default_multi_peak(arena, sigma);
        if (j.contains("peaks")) {
            f.peaks.clear();
            for (const auto& pj : j.at("peaks")) {
                check_keys(pj, {"center", "height", "width"}, "field.peaks[]");
                GaussianPeak p;
                p.center = vec2_from(pj.at("center"), "peak.center");
                p.height = pj.value("height", 1.0);
                p.width = pj.value("width", 0.2);
                f.peaks.push_back(p);
            }
        }
    } else {
        fail("field.kind must be 'cone' or 'multi_peak'");
    }
    if (j.contains("sigma")) f.sigma = j.at("sigma").get<double>();
    return f;
}

json field_to_json(const FieldSpec& f) {
    json j;
    if (f.kind == FieldKind::Cone) {
        j["kind"] = "cone";
        j["center"] = {f.center.x, f.center.y};
        j["height"] = f.height;
        j["slope"] = f.slope;
    } else {
        j["kind"] = "multi_peak";
        json peaks = json::array();
        for (const auto& p : f.peaks)
            peaks.push_back({{"center", {p.center.x, p.center.y}},
                             {"height", p.height},
                             {"width", p.width}});
        j["peaks"] = peaks;
    }
    j["sigma"] = f.sigma;
    return j;
}

SimParams params_from_json(const json& j) {
    check_keys(j,
               {"n_agents", "arena", "patch", "comm_range", "heading_noise_rate",
                "random_walk_weight", "step_size", "noise_sigma", "memory_weight",
                "gradient_decay", "lag_decay", "delta_prec", "delta_mem", "total_steps",
                "switch_mode", "switch_time", "gradient_mode", "seed", "field",
                "init_memory_from_avg", "pre_switch_estimate", "use_spatial_grid"},
               "params");
    SimParams p;
    if (j.contains("arena")) {
        const auto a = j.at("arena");
        if (!a.is_array() || a.size() != 2) fail("params.arena must be [width, height]");
        p.arena = {a[0].get<double>(), a[1].get<double>()};
    }
    if (j.contains("patch")) {
        const auto a = j.at("patch");
        if (!a.is_array() || a.size() != 4) fail("params.patch must be [x, y, width, height]");
        p.patch = {{a[0].get<double>(), a[1].get<double>()}, a[2].get<double>(),
                   a[3].get<double>()};
    }
    p.n_agents = j.value("n_agents", p.n_agents);
    p.comm_range = j.value("comm_range", p.comm_range);
    p.heading_noise_rate = j.value("heading_noise_rate", p.heading_noise_rate);
    p.random_walk_weight = j.value("random_walk_weight", p.random_walk_weight);
    p.step_size = j.value("step_size", p.step_size);
    p.noise_sigma = j.value("noise_sigma", p.noise_sigma);
    p.memory_weight = j.value("memory_weight", p.memory_weight);
    p.gradient_decay = j.value("gradient_decay", p.gradient_decay);
    p.lag_decay = j.value("lag_decay", p.lag_decay);
    p.delta_prec = j.value("delta_prec", p.delta_prec);
    p.delta_mem = j.value("delta_mem", p.delta_mem);
    p.total_steps = j.value("total_steps", p.total_steps);
    if (j.contains("switch_mode")) {
        const std::string m = j.at("switch_mode").get<std::string>();
        if (m == "fixed")
            p.switch_mode = SwitchMode::Fixed;
        else if (m == "adaptive")
            p.switch_mode = SwitchMode::Adaptive;
        else
            fail("params.switch_mode must be 'fixed' or 'adaptive'");
    }
    p.switch_time = j.value("switch_time", p.switch_time);
    if (j.contains("gradient_mode")) {
        const std::string m = j.at("gradient_mode").get<std::string>();
        if (m == "basic")
            p.gradient_mode = GradientMode::Basic;
        else if (m == "extended")
            p.gradient_mode = GradientMode::Extended;
        else
            fail("params.gradient_mode must be 'basic' or 'extended'");
    }
    p.seed = j.value("seed", p.seed);
    p.init_memory_from_avg = j.value("init_memory_from_avg", p.init_memory_from_avg);
    if (j.contains("pre_switch_estimate")) {
        const std::string m = j.at("pre_switch_estimate").get<std::string>();
        if (m == "tracker_avg")
            p.pre_switch_estimate = PreSwitchEstimate::TrackerAvg;
        else if (m == "last_sense")
            p.pre_switch_estimate = PreSwitchEstimate::LastSense;
        else
            fail("params.pre_switch_estimate must be 'tracker_avg' or 'last_sense'");
    }
    p.use_spatial_grid = j.value("use_spatial_grid", p.use_spatial_grid);
    if (j.contains("field"))
        p.field = field_from_json(j.at("field"), p.arena, p.noise_sigma);
    else
        p.field = FieldSpec::default_cone(p.arena, p.noise_sigma);
    return p;
}

json params_to_json_obj(const SimParams& p) {
    json j;
    j["n_agents"] = p.n_agents;
    j["arena"] = {p.arena.width, p.arena.height};
    j["patch"] = {p.patch.origin.x, p.patch.origin.y, p.patch.width, p.patch.height};
    j["comm_range"] = p.comm_range;
    j["heading_noise_rate"] = p.heading_noise_rate;
    j["random_walk_weight"] = p.random_walk_weight;
    j["step_size"] = p.step_size;
    j["noise_sigma"] = p.noise_sigma;
    j["memory_weight"] = p.memory_weight;
    j["gradient_decay"] = p.gradient_decay;
    j["lag_decay"] = p.lag_decay;
    j["delta_prec"] = p.delta_prec;
    j["delta_mem"] = p.delta_mem;
    j["total_steps"] = p.total_steps;
    j["switch_mode"] = p.switch_mode == SwitchMode::Fixed ? "fixed" : "adaptive";
    j["switch_time"] = p.switch_time;
    j["gradient_mode"] = p.gradient_mode == GradientMode::Basic ? "basic" : "extended";
    j["seed"] = p.seed;
    j["field"] = field_to_json(p.field);
    j["init_memory_from_avg"] = p.init_memory_from_avg;
    j["pre_switch_estimate"] =
        p.pre_switch_estimate == PreSwitchEstimate::TrackerAvg ? "tracker_avg" : "last_sense";
    j["use_spatial_grid"] = p.use_spatial_grid;
    return j;
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// CSV file with a declared column set; rows are counted for the manifest.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns)
        : path_(path), columns_(std::move(columns)) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        out_.open(path);
        if (!out_) throw std::runtime_error("cannot open for writing: " + path.string());
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            if (i) out_ << ',';
            out_ << columns_[i];
        }
        out_ << '\n';
    }

    void row(std::span<const double> values) {
        if (values.size() != columns_.size())
            throw std::runtime_error("column count mismatch writing " + path_.string());
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            out_ << fmt17(values[i]);
        }
        out_ << '\n';
        ++rows_;
    }

    void close() {
        out_.flush();
        if (!out_) throw std::runtime_error("write failed: " + path_.string());
        out_.close();
    }

    json manifest_entry() const {
        return {{"name", path_.filename().string()}, {"columns", columns_}, {"rows", rows_}};
    }

private:
    std::filesystem::path path_;
    std::vector<std::string> columns_;
    std::ofstream out_;
    std::size_t rows_ = 0;
};

void write_manifest(const ExperimentSpec& spec, const std::string& command,
                    const std::vector<json>& files) {
    json m;
    m["schema_version"] = 1;
    m["command"] = command;
    m["seed"] = spec.base.seed;
    m["repetitions"] = spec.repetitions;
    m["record_stride"] = spec.record_stride;
    m["git_describe"] = SWARMEST_GIT_DESCRIBE;
    m["params"] = params_to_json_obj(spec.base);
    m["files"] = files;
    const auto path = spec.out_dir / "manifest.json";
    std::error_code ec;
    std::filesystem::create_directories(spec.out_dir, ec);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << m.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

struct RepStats {
    std::vector<double> final_e_t, final_e_p, final_e_a;
    std::vector<std::optional<std::int64_t>> pooled_switch_times;

    void add(const RunRecord& rec) {
        const auto& last = rec.samples.back();
        final_e_t.push_back(last.e_t);
        final_e_p.push_back(last.e_p);
        final_e_a.push_back(last.e_a);
        pooled_switch_times.insert(pooled_switch_times.end(), rec.switch_times.begin(),
                                   rec.switch_times.end());
    }
};

double mean_of(const std::vector<double>& v) {
    return kernels::sum(v) / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    return std::sqrt(kernels::sum_sq_dev(v, m) / static_cast<double>(v.size() - 1));
}

SweepPoint summarize(double sweep_value, std::int64_t final_time, const RepStats& stats) {
    SweepPoint pt;
    pt.sweep_value = sweep_value;
    pt.final_time = final_time;
    pt.mean_e_t = mean_of(stats.final_e_t);
    pt.std_e_t = sample_std(stats.final_e_t);
    pt.mean_e_p = mean_of(stats.final_e_p);
    pt.std_e_p = sample_std(stats.final_e_p);
    pt.mean_e_a = mean_of(stats.final_e_a);
    pt.std_e_a = sample_std(stats.final_e_a);
    const auto dt = decision_time(
        std::span<const std::optional<std::int64_t>>(stats.pooled_switch_times));
    // A point where no agent ever switched is censored at the time budget.
    pt.mean_decision_time = dt.switched > 0 ? dt.mean : static_cast<double>(final_time);
    pt.never_switched = dt.never_switched;
    return pt;
}

SimParams rep_params(const SimParams& base, std::uint64_t master_seed, int rep) {
    SimParams p = base;
    p.seed = split_seed(master_seed, static_cast<std::uint64_t>(rep));
    return p;
}

/// Re-derive the benchmark field of the same kind for a different arena.
FieldSpec field_for_arena(const FieldSpec& base, const Arena& arena) {
    return base.kind == FieldKind::Cone ? FieldSpec::default_cone(arena, base.sigma)
                                        : FieldSpec::default_multi_peak(arena, base.sigma);
}

}  // namespace

void validate(const ExperimentSpec& spec) {
    swarmest::validate(spec.base);
    if (spec.repetitions < 1) fail("repetitions must be >= 1");
    if (spec.record_stride < 1) fail("record_stride must be >= 1");
    if (const auto* s = std::get_if<SweepSwitchTime>(&spec.sweep)) {
        if (s->values.empty()) fail("switch-time sweep list is empty");
        for (auto v : s->values) {
            SimParams p = spec.base;
            p.switch_time = v;
            swarmest::validate(p);
        }
    } else if (const auto* d = std::get_if<SweepDeltaPrec>(&spec.sweep)) {
        if (d->values.empty()) fail("delta_prec sweep list is empty");
        for (auto v : d->values)
            if (v < 0.0) fail("delta_prec sweep values must be non-negative");
    } else if (const auto* a = std::get_if<SweepArenaSize>(&spec.sweep)) {
        if (a->values.empty()) fail("arena sweep list is empty");
        for (const auto& e : a->values) {
            SimParams p = spec.base;
            p.arena = e.arena;
            p.patch = e.patch;
            p.field = field_for_arena(p.field, e.arena);
            swarmest::validate(p);
        }
    }
}

TimeseriesTable run_timeseries(const ExperimentSpec& spec) {
    swarmest::validate(spec.base);
    if (spec.repetitions < 1) fail("repetitions must be >= 1");
    TimeseriesTable table;
    std::vector<std::optional<std::int64_t>> pooled;
    for (int rep = 0; rep < spec.repetitions; ++rep) {
        const RunRecord rec = run(rep_params(spec.base, spec.base.seed, rep), spec.record_stride);
        if (rep == 0) {
            table.rows.resize(rec.samples.size());
            for (std::size_t k = 0; k < rec.samples.size(); ++k)
                table.rows[k].t = rec.samples[k].t;
        }
        if (rec.samples.size() != table.rows.size())
            throw std::logic_error("repetition sample counts diverged");
        for (std::size_t k = 0; k < rec.samples.size(); ++k) {
            table.rows[k].e_t += rec.samples[k].e_t;
            table.rows[k].e_p += rec.samples[k].e_p;
            table.rows[k].e_a += rec.samples[k].e_a;
            table.rows[k].frac_switched += rec.samples[k].frac_switched;
        }
        pooled.insert(pooled.end(), rec.switch_times.begin(), rec.switch_times.end());
    }
    const double inv = 1.0 / spec.repetitions;
    for (auto& r : table.rows) {
        r.e_t *= inv;
        r.e_p *= inv;
        r.e_a *= inv;
        r.frac_switched *= inv;
    }
    table.decision = decision_time(std::span<const std::optional<std::int64_t>>(pooled));
    return table;
}

TimeseriesTable run_fixed_switch_timeseries(const ExperimentSpec& spec) {
    if (spec.base.switch_mode != SwitchMode::Fixed)
        fail("run_fixed_switch_timeseries requires switch_mode = fixed");
    TimeseriesTable table = run_timeseries(spec);
    CsvWriter csv(spec.out_dir / "timeseries.csv",
                  {"t", "e_t", "e_p", "e_a", "frac_switched"});
    for (const auto& r : table.rows)
        csv.row(std::array<double, 5>{static_cast<double>(r.t), r.e_t, r.e_p, r.e_a,
                                      r.frac_switched});
    csv.close();
    write_manifest(spec, "run", {csv.manifest_entry()});
    return table;
}

SweepSummary sweep_switch_time(const ExperimentSpec& spec) {
    const auto* sw = std::get_if<SweepSwitchTime>(&spec.sweep);
    if (sw == nullptr) fail("sweep_switch_time requires a switch-time sweep");
    validate(spec);
    SweepSummary summary;
    for (const auto t_sw : sw->values) {
        SimParams p = spec.base;
        p.switch_mode = SwitchMode::Fixed;
        p.switch_time = t_sw;
        RepStats stats;
        for (int rep = 0; rep < spec.repetitions; ++rep)
            stats.add(run(rep_params(p, spec.base.seed, rep), spec.record_stride));
        summary.points.push_back(
            summarize(static_cast<double>(t_sw), p.total_steps, stats));
    }
    CsvWriter csv(spec.out_dir / "sweep_switch.csv",
                  {"t_sw", "mean_e_t", "std_e_t", "mean_e_p", "std_e_p", "mean_e_a", "std_e_a",
                   "mean_decision_time", "never_switched"});
    for (const auto& pt : summary.points)
        csv.row(std::array<double, 9>{pt.sweep_value, pt.mean_e_t, pt.std_e_t, pt.mean_e_p,
                                      pt.std_e_p, pt.mean_e_a, pt.std_e_a, pt.mean_decision_time,
                                      static_cast<double>(pt.never_switched)});
    csv.close();
    write_manifest(spec, "sweep-switch", {csv.manifest_entry()});
    return summary;
}

SweepSummary sweep_adaptive(const ExperimentSpec& spec) {
    if (spec.base.switch_mode != SwitchMode::Adaptive)
        fail("sweep_adaptive requires switch_mode = adaptive");
    const auto* dp = std::get_if<SweepDeltaPrec>(&spec.sweep);
    if (dp == nullptr) fail("sweep_adaptive requires a delta_prec sweep");
    validate(spec);
    std::vector<std::int64_t> budgets = dp->final_times;
    if (budgets.empty()) budgets.push_back(spec.base.total_steps);
    SweepSummary summary;
    for (const auto t_f : budgets) {
        for (const auto delta : dp->values) {
            SimParams p = spec.base;
            p.total_steps = t_f;
            p.delta_prec = delta;
            RepStats stats;
            for (int rep = 0; rep < spec.repetitions; ++rep)
                stats.add(run(rep_params(p, spec.base.seed, rep), spec.record_stride));
            summary.points.push_back(summarize(delta, t_f, stats));
        }
    }
    CsvWriter csv(spec.out_dir / "sweep_adaptive.csv",
                  {"t_f", "delta_prec", "mean_e_t", "std_e_t", "mean_e_p", "std_e_p", "mean_e_a",
                   "std_e_a", "mean_decision_time", "never_switched"});
    for (const auto& pt : summary.points)
        csv.row(std::array<double, 10>{static_cast<double>(pt.final_time), pt.sweep_value,
                                       pt.mean_e_t, pt.std_e_t, pt.mean_e_p, pt.std_e_p,
                                       pt.mean_e_a, pt.std_e_a, pt.mean_decision_time,
                                       static_cast<double>(pt.never_switched)});
    csv.close();
    write_manifest(spec, "sweep-adaptive", {csv.manifest_entry()});
    return summary;
}

SweepSummary sweep_arena(const ExperimentSpec& spec) {
    if (spec.base.switch_mode != SwitchMode::Adaptive)
        fail("sweep_arena requires switch_mode = adaptive");
    const auto* ar = std::get_if<SweepArenaSize>(&spec.sweep);
    if (ar == nullptr) fail("sweep_arena requires an arena sweep");
    validate(spec);
    SweepSummary summary;
    std::vector<json> files;
    for (std::size_t k = 0; k < ar->values.size(); ++k) {
        ExperimentSpec sub = spec;
        sub.base.arena = ar->values[k].arena;
        sub.base.patch = ar->values[k].patch;
        sub.base.field = field_for_arena(spec.base.field, sub.base.arena);
        const TimeseriesTable table = run_timeseries(sub);

        char name[64];
        std::snprintf(name, sizeof name, "arena_%zu_timeseries.csv", k);
        CsvWriter csv(spec.out_dir / name, {"t", "e_t", "e_p", "e_a", "frac_switched"});
        for (const auto& r : table.rows)
            csv.row(std::array<double, 5>{static_cast<double>(r.t), r.e_t, r.e_p, r.e_a,
                                          r.frac_switched});
        csv.close();
        files.push_back(csv.manifest_entry());

        SweepPoint pt;
        pt.sweep_value = sub.base.arena.width;
        pt.final_time = sub.base.total_steps;
        const auto& last = table.rows.back();
        pt.mean_e_t = last.e_t;
        pt.mean_e_p = last.e_p;
        pt.mean_e_a = last.e_a;
        pt.mean_decision_time = table.decision.switched > 0
                                    ? table.decision.mean
                                    : static_cast<double>(sub.base.total_steps);
        pt.never_switched = table.decision.never_switched;
        summary.points.push_back(pt);
    }
    CsvWriter csv(spec.out_dir / "sweep_arena.csv",
                  {"arena_width", "mean_e_t", "mean_e_p", "mean_e_a", "mean_decision_time",
                   "never_switched"});
    for (const auto& pt : summary.points)
        csv.row(std::array<double, 6>{pt.sweep_value, pt.mean_e_t, pt.mean_e_p, pt.mean_e_a,
                                      pt.mean_decision_time,
                                      static_cast<double>(pt.never_switched)});
    csv.close();
    files.push_back(csv.manifest_entry());
    write_manifest(spec, "sweep-arena", files);
    return summary;
}

void emit_positions_snapshot(const RunRecord& record, const std::filesystem::path& out_dir) {
    const double z_gt = record.z_gt;
    CsvWriter csv(out_dir / "positions.csv", {"agent", "x0", "y0", "xf", "yf", "z_gt"});
    for (std::size_t i = 0; i < record.initial_positions.size(); ++i)
        csv.row(std::array<double, 6>{static_cast<double>(i), record.initial_positions[i].x,
                                      record.initial_positions[i].y, record.final_positions[i].x,
                                      record.final_positions[i].y, z_gt});
    csv.close();
}

SimParams params_from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("bad JSON in " + path.string() + ": " + e.what());
    }
    if (j.contains("params")) return params_from_json(j.at("params"));
    return params_from_json(j);
}

ExperimentSpec spec_from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("bad JSON in " + path.string() + ": " + e.what());
    }
    check_keys(j, {"schema_version", "params", "repetitions", "record_stride", "out_dir", "sweep"},
               "experiment spec");
    if (j.contains("schema_version") && j.at("schema_version").get<int>() != 1)
        fail("unsupported schema_version (expected 1)");
    ExperimentSpec spec;
    if (j.contains("params")) spec.base = params_from_json(j.at("params"));
    spec.repetitions = j.value("repetitions", spec.repetitions);
    spec.record_stride = j.value("record_stride", spec.record_stride);
    if (j.contains("out_dir")) spec.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        check_keys(s, {"kind", "values", "final_times"}, "sweep");
        const std::string kind = s.value("kind", std::string());
        if (kind == "switch_time") {
            SweepSwitchTime sw;
            for (const auto& v : s.at("values")) sw.values.push_back(v.get<std::int64_t>());
            spec.sweep = sw;
        } else if (kind == "delta_prec") {
            SweepDeltaPrec sw;
            for (const auto& v : s.at("values")) sw.values.push_back(v.get<double>());
            if (s.contains("final_times"))
                for (const auto& v : s.at("final_times"))
                    sw.final_times.push_back(v.get<std::int64_t>());
            spec.sweep = sw;
        } else if (kind == "arena") {
            SweepArenaSize sw;
            for (const auto& v : s.at("values")) {
                check_keys(v, {"arena", "patch"}, "sweep.values[]");
                SweepArenaSize::Entry e;
                const auto a = v.at("arena");
                e.arena = {a[0].get<double>(), a[1].get<double>()};
                if (v.contains("patch")) {
                    const auto pj = v.at("patch");
                    e.patch = {{pj[0].get<double>(), pj[1].get<double>()}, pj[2].get<double>(),
                               pj[3].get<double>()};
                } else {
                    e.patch = spec.base.patch;
                }
                sw.values.push_back(e);
            }
            spec.sweep = sw;
        } else {
            fail("sweep.kind must be 'switch_time', 'delta_prec' or 'arena'");
        }
    }
    return spec;
}

std::string params_to_json(const SimParams& p) { return params_to_json_obj(p).dump(2); }

}  // namespace swarmest::harness
