#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hrsim/errors.hpp"
#include "hrsim/simulation.hpp"

namespace fs = std::filesystem;
using namespace hrsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

ScenarioSpec load_scenario(const std::string& name_or_path) {
    if (fs::exists(name_or_path))
        return ScenarioSpec::from_file(name_or_path);
    const auto& names = ScenarioSpec::preset_names();
    if (std::find(names.begin(), names.end(), name_or_path) != names.end())
        return ScenarioSpec::preset(name_or_path);
    std::string joined;
    for (const auto& n : names)
        joined += (joined.empty() ? "" : ", ") + n;
    throw ConfigError("no scenario file or preset named '" + name_or_path +
                      "' (presets: " + joined + ")");
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write " + path.string());
    out << text;
}

std::string csv_double(double v) {
    std::ostringstream os;
    os.precision(9);
    os << v;
    return os.str();
}

void append_flow_csv_row(std::ostringstream& os, const std::string& id,
                         const std::string& name, const std::string& rc,
                         const FlowSummary& f) {
    os << id << ',' << name << ',' << rc << ',' << f.offered << ','
       << f.delivered << ',' << f.lost << ',' << csv_double(f.loss_rate)
       << ',' << f.deadline_missed << ',' << csv_double(f.latency.mean_us)
       << ',' << csv_double(f.latency.p50_us) << ','
       << csv_double(f.latency.p95_us) << ',' << csv_double(f.latency.p99_us)
       << ',' << csv_double(f.latency.min_us) << ','
       << csv_double(f.latency.max_us) << '\n';
}

std::string flows_csv(const ScenarioSpec& spec, const MetricsSummary& m) {
    std::ostringstream os;
    os << "flow,name,rc,offered,delivered,lost,loss_rate,deadline_missed,"
          "mean_us,p50_us,p95_us,p99_us,min_us,max_us\n";
    for (const auto& fsum : m.flows) {
        std::string name = "?";
        std::string rc = "?";
        for (const auto& f : spec.flows)
            if (f.id == fsum.flow) {
                name = f.name;
                rc = f.rc.str();
            }
        append_flow_csv_row(os, std::to_string(fsum.flow), name, rc, fsum);
    }
    append_flow_csv_row(os, "total", "total", "-", m.total);
    return os.str();
}

void print_run_summary(const ScenarioSpec& spec, const RunResult& r) {
    const auto& t = r.metrics.total;
    std::cout << "scenario " << spec.name << " seed " << spec.seed << ": "
              << r.events << " events to " << r.end_time.str() << "\n"
              << "  offered " << t.offered << "  delivered " << t.delivered
              << "  lost " << t.lost << "  loss_rate " << t.loss_rate
              << "  double_deliveries " << r.metrics.double_deliveries
              << "\n";
    for (const auto& f : r.metrics.flows)
        std::cout << "  flow " << f.flow << ": offered " << f.offered
                  << " lost " << f.lost << " loss_rate " << f.loss_rate
                  << " p95_us " << f.latency.p95_us << "\n";
}

void print_trace_tail(Simulation& sim, std::size_t lines) {
    const auto& records = sim.core().trace().records();
    std::size_t start = records.size() > lines ? records.size() - lines : 0;
    std::cerr << "trace tail (" << records.size() - start << " of "
              << records.size() << " records):\n";
    for (std::size_t i = start; i < records.size(); ++i)
        std::cerr << "  " << records[i].tsv() << "\n";
}

int cmd_run(const std::string& config, std::optional<std::uint64_t> seed,
            bool trace, const std::string& out_dir, bool quiet) {
    ScenarioSpec spec = load_scenario(config);
    if (seed)
        spec.seed = *seed;

    RunOptions opts;
    opts.trace = trace;
    opts.keep_frames = false;

    Simulation sim(std::move(spec), opts);
    fs::create_directories(out_dir);
    try {
        RunResult r = sim.run();
        write_text(fs::path(out_dir) / "report.json",
                   r.report.dump(2) + "\n");
        write_text(fs::path(out_dir) / "report.csv",
                   flows_csv(sim.spec(), r.metrics));
        if (trace)
            write_text(fs::path(out_dir) / "trace.tsv", r.trace_tsv);
        if (!quiet)
            print_run_summary(sim.spec(), r);
        return kExitOk;
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        if (trace)
            print_trace_tail(sim, 20);
        return kExitInvariant;
    }
}

struct SweepAxis {
    std::string field;
    std::vector<std::string> values;
};

SweepAxis parse_axis(const std::string& arg) {
    auto eq = arg.find('=');
    if (eq == std::string::npos)
        throw ConfigError("sweep axis must look like field=v1,v2,... got '" +
                          arg + "'");
    SweepAxis axis;
    axis.field = arg.substr(0, eq);
    std::string rest = arg.substr(eq + 1);
    std::string item;
    std::istringstream is(rest);
    while (std::getline(is, item, ','))
        if (!item.empty())
            axis.values.push_back(item);
    return axis;
}

void apply_axis(ScenarioSpec& spec, const std::string& field,
                const std::string& value) {
    try {
        if (field == "per_attempt_loss" || field == "loss") {
            spec.radio.loss_prob = std::stod(value);
        } else if (field == "retry_limit" || field == "R") {
            spec.radio.retry_limit = std::stoi(value);
        } else if (field == "dedup_window" || field == "H") {
            spec.dedup_window = std::stoi(value);
        } else if (field == "attempt_airtime_us") {
            spec.radio.attempt_airtime = micros(std::stoll(value));
        } else {
            throw ConfigError(
                "unknown sweep field '" + field +
                "' (known: per_attempt_loss, retry_limit, dedup_window, "
                "attempt_airtime_us)");
        }
    } catch (const std::invalid_argument&) {
        throw ConfigError("bad value '" + value + "' for sweep field '" +
                          field + "'");
    } catch (const std::out_of_range&) {
        throw ConfigError("bad value '" + value + "' for sweep field '" +
                          field + "'");
    }
}

int cmd_sweep(const std::string& config,
              const std::vector<std::string>& axis_args, int seeds,
              std::optional<std::uint64_t> base_seed,
              const std::string& out_dir, bool quiet) {
    ScenarioSpec base = load_scenario(config);
    if (base_seed)
        base.seed = *base_seed;

    std::vector<SweepAxis> axes;
    for (const auto& a : axis_args)
        axes.push_back(parse_axis(a));
    for (const auto& ax : axes) {
        ScenarioSpec probe = base;
        for (const auto& v : ax.values)
            apply_axis(probe, ax.field, v); // validates the field name
    }

    // cartesian product, last axis fastest
    std::vector<std::vector<std::string>> points;
    bool empty_axis = axes.empty();
    for (const auto& ax : axes)
        if (ax.values.empty())
            empty_axis = true;
    if (!empty_axis) {
        points.push_back({});
        for (const auto& ax : axes) {
            std::vector<std::vector<std::string>> next;
            for (const auto& p : points)
                for (const auto& v : ax.values) {
                    auto q = p;
                    q.push_back(v);
                    next.push_back(std::move(q));
                }
            points = std::move(next);
        }
    }

    std::ostringstream csv;
    for (const auto& ax : axes)
        csv << ax.field << ',';
    csv << "seed,offered,delivered,lost,loss_rate,deadline_missed,"
           "mean_us,p95_us,events\n";

    fs::create_directories(out_dir);
    for (const auto& point : points) {
        for (int s = 0; s < seeds; ++s) {
            ScenarioSpec spec = base;
            std::string tag;
            for (std::size_t i = 0; i < axes.size(); ++i) {
                apply_axis(spec, axes[i].field, point[i]);
                tag += axes[i].field + "=" + point[i] + "_";
            }
            spec.seed = base.seed + static_cast<std::uint64_t>(s);

            RunOptions opts;
            opts.trace = false;
            opts.keep_frames = false;
            Simulation sim(spec, opts);
            RunResult r = sim.run();

            std::string fname =
                "report_" + tag + "s" + std::to_string(spec.seed) + ".json";
            write_text(fs::path(out_dir) / fname, r.report.dump(2) + "\n");

            const auto& t = r.metrics.total;
            for (const auto& v : point)
                csv << v << ',';
            csv << spec.seed << ',' << t.offered << ',' << t.delivered << ','
                << t.lost << ',' << csv_double(t.loss_rate) << ','
                << t.deadline_missed << ',' << csv_double(t.latency.mean_us)
                << ',' << csv_double(t.latency.p95_us) << ',' << r.events
                << '\n';
            if (!quiet)
                std::cout << tag << "s" << spec.seed << ": loss_rate "
                          << t.loss_rate << "\n";
        }
    }
    write_text(fs::path(out_dir) / "sweep.csv", csv.str());
    return kExitOk;
}

int cmd_verify(const std::string& trace_path, const std::string& golden_path) {
    for (const auto& p : {trace_path, golden_path})
        if (!fs::exists(p)) {
            std::cerr << "missing file: " << p << "\n";
            return kExitConfig;
        }
    std::ifstream a(trace_path, std::ios::binary);
    std::ifstream b(golden_path, std::ios::binary);
    std::string la, lb;
    std::size_t line = 0;
    while (true) {
        bool ga = static_cast<bool>(std::getline(a, la));
        bool gb = static_cast<bool>(std::getline(b, lb));
        ++line;
        if (!ga && !gb) {
            std::cout << "identical (" << line - 1 << " lines)\n";
            return kExitOk;
        }
        if (ga != gb || la != lb) {
            std::cerr << "divergence at line " << line << ":\n  "
                      << trace_path << ": " << (ga ? la : "<eof>") << "\n  "
                      << golden_path << ": " << (gb ? lb : "<eof>") << "\n";
            return 1;
        }
    }
}

int cmd_presets(const std::string& dir) {
    fs::create_directories(dir);
    for (const auto& name : ScenarioSpec::preset_names()) {
        ScenarioSpec spec = ScenarioSpec::preset(name);
        spec.write_file((fs::path(dir) / (name + ".json")).string());
        std::cout << "wrote " << (fs::path(dir) / (name + ".json")).string()
                  << "\n";
    }
    return kExitOk;
}

int cmd_validate(const std::string& config) {
    ScenarioSpec spec = load_scenario(config);
    spec.validate();
    std::cout << "ok: " << spec.name << " (" << spec.aps.size() << " aps, "
              << spec.stas.size() << " stas, " << spec.flows.size()
              << " flows, " << spec.moves.size() << " moves)\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"seamless-redundancy Wi-Fi simulator"};
    app.require_subcommand(1);

    std::string config;
    std::optional<std::uint64_t> seed;
    bool trace = false;
    bool quiet = false;
    std::string out_dir = ".";
    std::vector<std::string> sweep_axes;
    int seeds = 1;
    std::string trace_path, golden_path, presets_dir = "scenarios";

    auto* run = app.add_subcommand("run", "run one scenario");
    run->add_option("--config", config, "scenario file or preset name")
        ->required();
    run->add_option("--seed", seed, "override the scenario seed");
    run->add_flag("--trace", trace, "record and write the event trace");
    run->add_option("--out", out_dir, "output directory");
    run->add_flag("--quiet", quiet, "suppress the summary");

    auto* sweep = app.add_subcommand("sweep", "run a parameter grid");
    sweep->add_option("--config", config, "scenario file or preset name")
        ->required();
    sweep->add_option("--sweep", sweep_axes,
                      "axis as field=v1,v2,... (repeatable)");
    sweep->add_option("--seeds", seeds, "seeds per grid point")
        ->check(CLI::PositiveNumber);
    sweep->add_option("--seed", seed, "base seed (default: scenario seed)");
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_flag("--quiet", quiet, "suppress per-run lines");

    auto* verify = app.add_subcommand("verify", "compare a trace to a golden");
    verify->add_option("--trace", trace_path, "trace file")->required();
    verify->add_option("--golden", golden_path, "golden file")->required();

    auto* presets = app.add_subcommand("presets", "write built-in scenarios");
    presets->add_option("--dir", presets_dir, "target directory");

    auto* validate = app.add_subcommand("validate", "validate a scenario");
    validate->add_option("--config", config, "scenario file or preset name")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(config, seed, trace, out_dir, quiet);
        if (sweep->parsed())
            return cmd_sweep(config, sweep_axes, seeds, seed, out_dir, quiet);
        if (verify->parsed())
            return cmd_verify(trace_path, golden_path);
        if (presets->parsed())
            return cmd_presets(presets_dir);
        if (validate->parsed())
            return cmd_validate(config);
    } catch (const ValidationError& e) {
        std::cerr << "invalid scenario:\n";
        for (const auto& v : e.violations)
            std::cerr << "  - " << v << "\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const SimError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvariant;
    }
    return kExitOk;
}
