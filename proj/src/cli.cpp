#include "rqrc/cli.hpp"

#include "rqrc/config.hpp"
#include "rqrc/error.hpp"
#include "rqrc/experiment.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <fmt/format.h>
#include <fstream>
#include <optional>
#include <ostream>

namespace rqrc::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Options {
    std::string command;
    std::string config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> kinematics;
    std::optional<std::string> engine;
    std::string data;
    std::string ranges_from;
    int inputs = 20;
};

struct Context {
    ExperimentConfig cfg;
    fs::path out;
    std::string hash;

    std::string stamp() const { return fmt::format("{} config={}", kArtifactVersion, hash); }

    json meta() const { return {{"artifact_version", kArtifactVersion}, {"config_hash", hash}}; }

    std::optional<FeatureCache> cache() const
    {
        if (!cfg.cache) {
            return std::nullopt;
        }
        return FeatureCache(out / "cache");
    }
};

int env_int(const char* name)
{
    const char* v = std::getenv(name);
    try {
        std::size_t pos = 0;
        const int n = std::stoi(v, &pos);
        if (pos != std::string(v).size()) {
            throw std::invalid_argument(v);
        }
        return n;
    } catch (const std::exception&) {
        throw ConfigError(fmt::format("{}='{}' is not an integer", name, v));
    }
}

// Precedence: command-line flag, then environment, then config file.
Context resolve(const Options& opt)
{
    Context ctx;
    ctx.cfg = opt.config.empty() ? ExperimentConfig{} : ExperimentConfig::load(opt.config);
    auto& c = ctx.cfg;
    if (const char* v = std::getenv("RQRC_OUT"); v && *v) {
        c.output_dir = v;
    }
    if (const char* v = std::getenv("RQRC_WORKERS"); v && *v) {
        c.workers = env_int("RQRC_WORKERS");
    }
    if (opt.out) {
        c.output_dir = *opt.out;
    }
    if (opt.workers) {
        c.workers = *opt.workers;
    }
    if (opt.seed) {
        c.seeds.dataset = *opt.seed;
        c.seeds.split = *opt.seed + 1;
    }
    if (opt.kinematics) {
        c.kinematics = parse_kinematics(*opt.kinematics);
    }
    if (opt.engine) {
        c.engine = parse_engine(*opt.engine);
    }
    c.validate();
    ctx.hash = config_hash(c);
    ctx.out = c.output_dir;
    fs::create_directories(ctx.out);
    return ctx;
}

void write_json(const fs::path& path, const json& j)
{
    std::ofstream os(path);
    if (!os) {
        throw DataError(fmt::format("cannot open {} for writing", path.string()));
    }
    os << j.dump(2) << '\n';
    if (!os) {
        throw DataError(fmt::format("write to {} failed", path.string()));
    }
}

std::ofstream open_csv(const fs::path& path, const Context& ctx)
{
    std::ofstream os(path);
    if (!os) {
        throw DataError(fmt::format("cannot open {} for writing", path.string()));
    }
    os << "# " << ctx.stamp() << '\n';
    return os;
}

void write_resolved_config(const Context& ctx)
{
    auto j = ctx.cfg.to_json();
    j["meta"] = ctx.meta();
    write_json(ctx.out / "resolved_config.json", j);
}

json ranges_json(const std::vector<InputRange>& ranges)
{
    json j = json::array();
    for (const auto& r : ranges) {
        j.push_back({r.min, r.max});
    }
    return j;
}

json diagnostics_json(const RunResult& r)
{
    return {{"max_leakage", r.worst.max_leakage},
            {"max_norm_drift", r.worst.max_norm_drift},
            {"max_symplectic_error", r.worst.max_symplectic_error},
            {"min_position", r.worst.min_position},
            {"max_position", r.worst.max_position},
            {"outside_cavity_count", r.outside_cavity}};
}

int cmd_dataset(const Context& ctx, std::ostream& out)
{
    const auto data = make_split(ctx.cfg);
    save_csv(data.train, ctx.out / "train.csv", ctx.stamp());
    save_csv(data.test, ctx.out / "test.csv", ctx.stamp());
    out << fmt::format("dataset: {} train / {} test points written to {}\n", data.train.size(),
                       data.test.size(), ctx.out.string());
    return kOk;
}

int cmd_features(const Context& ctx, const Options& opt, std::ostream& out)
{
    const auto data = make_split(ctx.cfg);
    const auto range_source = opt.ranges_from.empty() ? data.train : load_csv(opt.ranges_from);
    const auto ranges = encoding_ranges(range_source, ctx.cfg.encoding.input_margin);
    const auto reservoir = reservoir_config(ctx.cfg, ranges);
    const auto names = feature_names(reservoir);
    const auto cache = ctx.cache();
    const auto* cache_ptr = cache ? &*cache : nullptr;

    auto emit = [&](const LabeledDataset& ds, const fs::path& path) {
        const auto fm = dataset_features(ds, reservoir, ctx.cfg.workers, cache_ptr);
        save_feature_csv(fm.phi, names, path, ctx.stamp());
        out << fmt::format("features: {} x {} written to {}\n", fm.phi.cols(), fm.phi.rows(),
                           path.string());
    };
    if (!opt.data.empty()) {
        emit(load_csv(opt.data), ctx.out / "features.csv");
    } else {
        emit(data.train, ctx.out / "features_train.csv");
        emit(data.test, ctx.out / "features_test.csv");
    }
    return kOk;
}

int cmd_train(const Context& ctx, std::ostream& out)
{
    const auto data = make_split(ctx.cfg);
    const auto ranges = encoding_ranges(data.train, ctx.cfg.encoding.input_margin);
    const auto reservoir = reservoir_config(ctx.cfg, ranges);
    const auto cache = ctx.cache();
    const auto r =
      run_experiment(data, reservoir, ctx.cfg.learning, ctx.cfg.workers, cache ? &*cache : nullptr);

    json model = ctx.meta();
    model["reservoir"] = to_json(reservoir);
    model["feature_names"] = feature_names(reservoir);
    model["weights"] = std::vector<double>(r.model.weights.data(),
                                           r.model.weights.data() + r.model.weights.size());
    model["regularization"] = r.model.regularization;
    if (r.standardizer) {
        const auto& s = *r.standardizer;
        model["standardizer"] = {
          {"mean", std::vector<double>(s.mean.data(), s.mean.data() + s.mean.size())},
          {"scale", std::vector<double>(s.scale.data(), s.scale.data() + s.scale.size())}};
    }
    write_json(ctx.out / "model.json", model);

    json metrics = ctx.meta();
    metrics["kinematics"] = to_string(reservoir.kinematics);
    metrics["engine"] = to_string(reservoir.engine);
    metrics["n_train"] = data.train.size();
    metrics["n_test"] = data.test.size();
    metrics["A_train"] = r.train_accuracy;
    metrics["A_test"] = r.test_accuracy;
    metrics["effective_rank"] = r.spectrum.normalized_rank(ctx.cfg.learning.l);
    metrics["nonzero_eigenvalues"] = r.spectrum.nonzero_count();
    metrics["input_ranges"] = ranges_json(ranges);
    metrics["diagnostics"] = diagnostics_json(r);
    write_json(ctx.out / "metrics.json", metrics);

    {
        auto os = open_csv(ctx.out / "scores.csv", ctx);
        os << "split,index,label,f_hat\n";
        for (std::size_t i = 0; i < data.train.size(); ++i) {
            os << fmt::format("train,{},{},{:.17g}\n", i, data.train.labels[i],
                              r.train_scores[static_cast<Eigen::Index>(i)]);
        }
        for (std::size_t i = 0; i < data.test.size(); ++i) {
            os << fmt::format("test,{},{},{:.17g}\n", i, data.test.labels[i],
                              r.test_scores[static_cast<Eigen::Index>(i)]);
        }
    }
    json timing = ctx.meta();
    timing["feature_seconds"] = r.seconds;
    write_json(ctx.out / "timing.json", timing);

    if (r.outside_cavity > 0) {
        out << fmt::format("warning: {} inputs drive the detector outside [0, L]\n",
                           r.outside_cavity);
    }
    out << fmt::format("train: {} A_train={:.4f} A_test={:.4f} effective_rank={}\n",
                       to_string(reservoir.kinematics), r.train_accuracy, r.test_accuracy,
                       r.spectrum.normalized_rank(ctx.cfg.learning.l));
    return kOk;
}

int cmd_sweep(const Context& ctx, std::ostream& out)
{
    const auto& c = ctx.cfg;
    const auto data = make_split(c);
    const auto ranges = encoding_ranges(data.train, c.encoding.input_margin);
    const auto cache = ctx.cache();

    auto rows = open_csv(ctx.out / "sweep.csv", ctx);
    auto timing = open_csv(ctx.out / "sweep_timing.csv", ctx);
    rows << "kinematics,a0,T,m,A_train,A_test,effective_rank\n";
    timing << "kinematics,a0,T,m,wall_seconds\n";
    for (double a0 : c.sweep.a0) {
        for (double T : c.sweep.T) {
            for (int m : c.sweep.m) {
                for (auto kin : c.sweep.kinematics) {
                    const auto reservoir = reservoir_config(c, a0, T, m, kin, ranges);
                    const auto r = run_experiment(data, reservoir, c.learning, c.workers,
                                                  cache ? &*cache : nullptr);
                    const auto rank = r.spectrum.normalized_rank(c.learning.l);
                    rows << fmt::format("{},{},{},{},{:.17g},{:.17g},{}\n", to_string(kin), a0, T,
                                        m, r.train_accuracy, r.test_accuracy, rank);
                    timing << fmt::format("{},{},{},{},{:.3f}\n", to_string(kin), a0, T, m,
                                          r.seconds);
                    rows.flush();
                    timing.flush();
                    out << fmt::format("sweep: {} a0={} T={} m={} A_train={:.4f} A_test={:.4f} rank={}\n",
                                       to_string(kin), a0, T, m, r.train_accuracy, r.test_accuracy,
                                       rank);
                }
            }
        }
    }
    return kOk;
}

int cmd_kernel(const Context& ctx, std::ostream& out)
{
    const auto& c = ctx.cfg;
    const auto data = make_split(c);
    const auto ranges = encoding_ranges(data.train, c.encoding.input_margin);
    const auto reservoir = reservoir_config(c, ranges);
    const auto cache = ctx.cache();
    auto fm = dataset_features(data.train, reservoir, c.workers, cache ? &*cache : nullptr);
    if (c.learning.standardize) {
        fm.phi = Standardizer::fit(fm.phi).apply(fm.phi);
    }
    const auto spec = kernel_spectrum(fm.phi, c.learning.l);
    const double top = spec.eigenvalues.empty() ? 0.0 : spec.eigenvalues.front();

    auto os = open_csv(ctx.out / "spectrum.csv", ctx);
    os << "index,eigenvalue,normalized,highlighted\n";
    std::size_t nonzero_seen = 0;
    for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i) {
        const double v = spec.eigenvalues[i];
        const bool highlight =
          v > 0.0 && nonzero_seen++ < static_cast<std::size_t>(c.learning.spectrum_highlight);
        os << fmt::format("{},{:.17g},{:.17g},{}\n", i + 1, v, top > 0.0 ? v / top : 0.0,
                          highlight ? 1 : 0);
    }
    json summary = ctx.meta();
    summary["kinematics"] = to_string(reservoir.kinematics);
    summary["engine"] = to_string(reservoir.engine);
    summary["samples"] = data.train.size();
    summary["threshold"] = c.learning.l;
    summary["effective_rank"] = spec.effective_rank;
    summary["normalized_effective_rank"] = spec.normalized_rank(c.learning.l);
    summary["nonzero_eigenvalues"] = spec.nonzero_count();
    write_json(ctx.out / "kernel.json", summary);
    out << fmt::format("kernel: {} normalized effective rank {} of {} ({} nonzero)\n",
                       to_string(reservoir.kinematics), spec.normalized_rank(c.learning.l),
                       spec.eigenvalues.size(), spec.nonzero_count());
    return kOk;
}

int cmd_drive(const Context& ctx, std::ostream& out)
{
    const auto& d = ctx.cfg.drive;
    const auto warnings = d.params.check();
    const auto tones = drive_frequencies(d.params);
    const auto enc = EncodingConfig::with_ratio(d.a0, d.delta_a_ratio, d.T, d.m, {{0.0, 1.0}});
    const std::vector<double> x{d.input};
    const Worldline wl(encode(x, enc), Kinematics::relativistic);
    const auto grid = drive_grid(d.params, wl, d.samples_per_period);
    const auto signal = drive_waveform(d.params, wl, grid);
    save_drive_csv(signal, d.params, ctx.out / "drive.csv", ctx.stamp());

    const auto coupling = effective_coupling_check(d.params, ctx.cfg.mode_set());
    json report = ctx.meta();
    report["frequency_unit"] = d.params.frequency_unit;
    report["time_unit"] = d.params.time_unit;
    report["omega_plus"] = tones.plus;
    report["omega_minus"] = tones.minus;
    report["samples"] = signal.size();
    report["max_phase_rate"] = signal.max_rate;
    report["max_phase_rate_over_Omega"] = signal.max_rate / d.params.detector_frequency;
    report["modulation_ratio"] = signal.modulation_ratio;
    report["max_slow_residual"] = signal.max_slow_residual;
    report["warnings"] = warnings;
    report["coupling"] = {{"simulated", coupling.simulated},
                          {"drive", coupling.drive},
                          {"ratio", coupling.ratio},
                          {"zero_coupling", coupling.zero_coupling},
                          {"match", coupling.match},
                          {"message", coupling.message}};
    write_json(ctx.out / "drive_report.json", report);

    for (const auto& w : warnings) {
        out << "warning: " << w << '\n';
    }
    out << fmt::format("drive: omega+={} omega-={} {}; max theta_dot = {:.4g} Omega; coupling {}\n",
                       tones.plus, tones.minus, d.params.frequency_unit,
                       signal.max_rate / d.params.detector_frequency, coupling.message);
    return kOk;
}

int cmd_modes(const Context& ctx, const Options& opt, std::ostream& out)
{
    const auto& c = ctx.cfg;
    if (opt.inputs < 1) {
        throw ConfigError("--inputs must be >= 1");
    }
    const auto data = make_split(c);
    const auto ranges = encoding_ranges(data.train, c.encoding.input_margin);
    const auto count = std::min<std::size_t>(static_cast<std::size_t>(opt.inputs), data.train.size());
    const auto points = data.train.inputs();
    const std::vector<std::vector<double>> sample(points.begin(),
                                                  points.begin() + static_cast<long>(count));

    const std::vector<int> cutoffs{1, 3, 5, 10, 15};
    std::vector<Eigen::MatrixXd> phis;
    for (int n : cutoffs) {
        auto copy = c;
        copy.modes.n_modes = n;
        copy.modes.single_mode = n == 1;
        copy.engine = Engine::gaussian;
        const auto reservoir = reservoir_config(copy, ranges);
        phis.push_back(feature_matrix(sample, reservoir, c.workers).phi);
        out << fmt::format("modes: N={} done\n", n);
    }
    auto rel = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& ref) {
        double worst = 0.0;
        for (Eigen::Index j = 0; j < ref.cols(); ++j) {
            const double scale = ref.col(j).lpNorm<Eigen::Infinity>();
            worst = std::max(worst, (a.col(j) - ref.col(j)).lpNorm<Eigen::Infinity>() / scale);
        }
        return worst;
    };
    auto os = open_csv(ctx.out / "mode_convergence.csv", ctx);
    os << "n_modes,rel_inf_diff_vs_15,rel_inf_diff_vs_10\n";
    for (std::size_t i = 0; i < cutoffs.size(); ++i) {
        os << fmt::format("{},{:.6e},{:.6e}\n", cutoffs[i], rel(phis[i], phis.back()),
                          rel(phis[i], phis[3]));
    }
    out << fmt::format("modes: report over {} inputs written to {}\n", count,
                       (ctx.out / "mode_convergence.csv").string());
    return kOk;
}

std::string quote(const std::string& s)
{
    std::string q;
    for (char ch : s) {
        if (ch == '"' || ch == '\\') {
            q += '\\';
        }
        q += ch == '\n' ? ' ' : ch;
    }
    return q;
}

int fail(std::ostream& err, const char* code, int exit_code, const std::string& message)
{
    err << fmt::format("error={} exit={} message=\"{}\"\n", code, exit_code, quote(message));
    return exit_code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options opt;
    CLI::App app{"Relativistic quantum reservoir computing experiments", "rqrc"};
    app.require_subcommand(1);
    app.add_option("--config", opt.config, "JSON experiment config")->check(CLI::ExistingFile);
    app.add_option("--out", opt.out, "output directory (env RQRC_OUT)");
    app.add_option("--seed", opt.seed, "dataset seed; the split uses seed + 1");
    app.add_option("--workers", opt.workers, "worker threads (env RQRC_WORKERS)");
    app.add_option("--kinematics", opt.kinematics, "rel or newt")
      ->check(CLI::IsMember({"rel", "newt"}));
    app.add_option("--engine", opt.engine, "gaussian or qubit")
      ->check(CLI::IsMember({"gaussian", "qubit"}));
    app.fallthrough();

    app.add_subcommand("dataset", "write train/test spiral CSVs");
    auto* features = app.add_subcommand("features", "write feature-matrix CSVs");
    features->add_option("--data", opt.data, "dataset CSV (default: the configured split)")
      ->check(CLI::ExistingFile);
    features->add_option("--ranges-from", opt.ranges_from,
                         "CSV whose bounding box sets the input ranges")
      ->check(CLI::ExistingFile);
    app.add_subcommand("train", "train the ridge readout and write model and metrics");
    app.add_subcommand("sweep", "accuracy over the configured T x a0 x m x kinematics grid");
    app.add_subcommand("kernel", "eigenvalue spectrum of the training Gram matrix");
    app.add_subcommand("drive", "circuit-QED drive waveform export");
    auto* modes = app.add_subcommand("modes", "feature convergence in the field-mode cutoff");
    modes->add_option("--inputs", opt.inputs, "number of training inputs compared");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        return fail(err, "usage_error", kConfigError, e.what());
    }
    opt.command = app.get_subcommands().front()->get_name();

    try {
        const auto ctx = resolve(opt);
        write_resolved_config(ctx);
        if (opt.command == "dataset") {
            return cmd_dataset(ctx, out);
        }
        if (opt.command == "features") {
            return cmd_features(ctx, opt, out);
        }
        if (opt.command == "train") {
            return cmd_train(ctx, out);
        }
        if (opt.command == "sweep") {
            return cmd_sweep(ctx, out);
        }
        if (opt.command == "kernel") {
            return cmd_kernel(ctx, out);
        }
        if (opt.command == "drive") {
            return cmd_drive(ctx, out);
        }
        return cmd_modes(ctx, opt, out);
    } catch (const ConfigError& e) {
        return fail(err, "config_error", kConfigError, e.what());
    } catch (const EncodingError& e) {
        return fail(err, "encoding_error", kConfigError, e.what());
    } catch (const NumericalError& e) {
        return fail(err, "numerical_error", kNumericalError, e.what());
    } catch (const DataError& e) {
        return fail(err, "data_error", kFailure, e.what());
    } catch (const std::exception& e) {
        return fail(err, "failure", kFailure, e.what());
    }
}

}  // namespace rqrc::cli
