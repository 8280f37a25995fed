#include "rqrc/config.hpp"

#include "rqrc/error.hpp"

#include <fmt/format.h>
#include <fstream>
#include <set>

namespace rqrc {

using nlohmann::json;

static_assert(std::is_same_v<std::uint64_t, std::size_t>);

namespace {

// Reads one JSON object, rejecting keys nobody asked for.
class Section {
  public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) {
            throw ConfigError(fmt::format("{}: expected an object", where()));
        }
    }

    ~Section() = default;

    template <class T>
    void get(const char* key, T& out)
    {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end()) {
            return;
        }
        read(*it, out, child(key));
    }

    Section sub(const char* key)
    {
        seen_.insert(key);
        static const json empty = json::object();
        auto it = j_.find(key);
        return Section(it == j_.end() ? empty : *it, child(key));
    }

    void ignore(const char* key) { seen_.insert(key); }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) {
                throw ConfigError(fmt::format("{}: unknown key '{}'", where(), it.key()));
            }
        }
    }

  private:
    std::string where() const { return path_.empty() ? "config" : path_; }
    std::string child(const char* key) const
    {
        return path_.empty() ? std::string(key) : fmt::format("{}.{}", path_, key);
    }

    static void read(const json& v, double& out, const std::string& p)
    {
        if (!v.is_number()) {
            throw ConfigError(fmt::format("{}: expected a number", p));
        }
        out = v.get<double>();
    }
    static void read(const json& v, bool& out, const std::string& p)
    {
        if (!v.is_boolean()) {
            throw ConfigError(fmt::format("{}: expected true or false", p));
        }
        out = v.get<bool>();
    }
    static void read(const json& v, int& out, const std::string& p)
    {
        if (!v.is_number_integer()) {
            throw ConfigError(fmt::format("{}: expected an integer", p));
        }
        out = v.get<int>();
    }
    static void read(const json& v, std::size_t& out, const std::string& p)
    {
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            throw ConfigError(fmt::format("{}: expected a non-negative integer", p));
        }
        out = v.get<std::size_t>();
    }
    static void read(const json& v, std::string& out, const std::string& p)
    {
        if (!v.is_string()) {
            throw ConfigError(fmt::format("{}: expected a string", p));
        }
        out = v.get<std::string>();
    }
    static void read(const json& v, Kinematics& out, const std::string& p)
    {
        std::string s;
        read(v, s, p);
        out = parse_kinematics(s);
    }
    static void read(const json& v, Engine& out, const std::string& p)
    {
        std::string s;
        read(v, s, p);
        out = parse_engine(s);
    }
    template <class T>
    static void read(const json& v, std::vector<T>& out, const std::string& p)
    {
        if (!v.is_array() || v.empty()) {
            throw ConfigError(fmt::format("{}: expected a non-empty list", p));
        }
        out.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            T x{};
            read(v[i], x, fmt::format("{}[{}]", p, i));
            out.push_back(x);
        }
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

}  // namespace

std::string to_string(Kinematics k)
{
    return k == Kinematics::relativistic ? "rel" : "newt";
}

Kinematics parse_kinematics(const std::string& s)
{
    if (s == "rel" || s == "relativistic") {
        return Kinematics::relativistic;
    }
    if (s == "newt" || s == "newtonian") {
        return Kinematics::newtonian;
    }
    throw ConfigError(fmt::format("unknown kinematics '{}' (rel, newt)", s));
}

std::string to_string(Engine e)
{
    return e == Engine::gaussian ? "gaussian" : "qubit";
}

Engine parse_engine(const std::string& s)
{
    if (s == "gaussian") {
        return Engine::gaussian;
    }
    if (s == "qubit") {
        return Engine::dense_qubit;
    }
    throw ConfigError(fmt::format("unknown engine '{}' (gaussian, qubit)", s));
}

ExperimentConfig ExperimentConfig::from_json(const json& j)
{
    ExperimentConfig c;
    Section root(j, "");
    {
        auto s = root.sub("dataset");
        s.get("n_train", c.dataset.n_train);
        s.get("n_test", c.dataset.n_test);
        s.get("turns", c.dataset.turns);
        s.get("radius", c.dataset.radius);
        s.get("noise_sd", c.dataset.noise_sd);
        s.finish();
    }
    {
        auto s = root.sub("encoding");
        s.get("a0", c.encoding.a0);
        s.get("delta_a_ratio", c.encoding.delta_a_ratio);
        s.get("T", c.encoding.T);
        s.get("m", c.encoding.m);
        s.get("input_margin", c.encoding.input_margin);
        s.finish();
    }
    {
        auto s = root.sub("modes");
        s.get("n_modes", c.modes.n_modes);
        s.get("single_mode", c.modes.single_mode);
        s.get("Omega", c.modes.Omega);
        s.get("lambda", c.modes.lambda);
        s.get("coherent_mode", c.modes.coherent_mode);
        s.get("alpha_re", c.modes.alpha_re);
        s.get("alpha_im", c.modes.alpha_im);
        s.finish();
    }
    root.get("kinematics", c.kinematics);
    root.get("engine", c.engine);
    {
        auto s = root.sub("reservoir");
        s.get("delta_T", c.reservoir.delta_T);
        s.get("steps_per_period", c.reservoir.steps_per_period);
        s.get("fock_cutoff", c.reservoir.fock_cutoff);
        s.finish();
    }
    {
        auto s = root.sub("learning");
        s.get("l", c.learning.l);
        s.get("standardize", c.learning.standardize);
        s.get("spectrum_highlight", c.learning.spectrum_highlight);
        s.finish();
    }
    {
        auto s = root.sub("sweep");
        s.get("T", c.sweep.T);
        s.get("a0", c.sweep.a0);
        s.get("m", c.sweep.m);
        s.get("kinematics", c.sweep.kinematics);
        s.finish();
    }
    {
        auto s = root.sub("seeds");
        s.get("dataset", c.seeds.dataset);
        s.get("split", c.seeds.split);
        s.finish();
    }
    {
        auto s = root.sub("drive");
        auto& p = c.drive.params;
        s.get("omega0", p.omega0);
        s.get("epsilon", p.epsilon);
        s.get("detector_frequency", p.detector_frequency);
        s.get("g", p.g);
        s.get("eta", p.eta);
        s.get("mode_frequency", p.mode_frequency);
        s.get("mode_wavenumber", p.mode_wavenumber);
        s.get("frequency_unit", p.frequency_unit);
        s.get("time_unit", p.time_unit);
        s.get("a0", c.drive.a0);
        s.get("delta_a_ratio", c.drive.delta_a_ratio);
        s.get("T", c.drive.T);
        s.get("m", c.drive.m);
        s.get("input", c.drive.input);
        s.get("samples_per_period", c.drive.samples_per_period);
        s.finish();
    }
    root.get("workers", c.workers);
    root.get("output_dir", c.output_dir);
    root.get("cache", c.cache);
    // Written by every run next to its outputs; informational only.
    root.ignore("meta");
    root.finish();
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is) {
        throw ConfigError(fmt::format("cannot open config {}", path.string()));
    }
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    }
    return from_json(j);
}

json ExperimentConfig::to_json() const
{
    json j;
    j["dataset"] = {{"n_train", dataset.n_train},
                    {"n_test", dataset.n_test},
                    {"turns", dataset.turns},
                    {"radius", dataset.radius},
                    {"noise_sd", dataset.noise_sd}};
    j["encoding"] = {{"a0", encoding.a0},
                     {"delta_a_ratio", encoding.delta_a_ratio},
                     {"T", encoding.T},
                     {"m", encoding.m},
                     {"input_margin", encoding.input_margin}};
    j["modes"] = {{"n_modes", modes.n_modes},     {"single_mode", modes.single_mode},
                  {"Omega", modes.Omega},         {"lambda", modes.lambda},
                  {"coherent_mode", modes.coherent_mode}, {"alpha_re", modes.alpha_re},
                  {"alpha_im", modes.alpha_im}};
    j["kinematics"] = to_string(kinematics);
    j["engine"] = to_string(engine);
    j["reservoir"] = {{"delta_T", reservoir.delta_T},
                      {"steps_per_period", reservoir.steps_per_period},
                      {"fock_cutoff", reservoir.fock_cutoff}};
    j["learning"] = {{"l", learning.l},
                     {"standardize", learning.standardize},
                     {"spectrum_highlight", learning.spectrum_highlight}};
    json kin = json::array();
    for (auto k : sweep.kinematics) {
        kin.push_back(to_string(k));
    }
    j["sweep"] = {{"T", sweep.T}, {"a0", sweep.a0}, {"m", sweep.m}, {"kinematics", kin}};
    j["seeds"] = {{"dataset", seeds.dataset}, {"split", seeds.split}};
    const auto& p = drive.params;
    j["drive"] = {{"omega0", p.omega0},
                  {"epsilon", p.epsilon},
                  {"detector_frequency", p.detector_frequency},
                  {"g", p.g},
                  {"eta", p.eta},
                  {"mode_frequency", p.mode_frequency},
                  {"mode_wavenumber", p.mode_wavenumber},
                  {"frequency_unit", p.frequency_unit},
                  {"time_unit", p.time_unit},
                  {"a0", drive.a0},
                  {"delta_a_ratio", drive.delta_a_ratio},
                  {"T", drive.T},
                  {"m", drive.m},
                  {"input", drive.input},
                  {"samples_per_period", drive.samples_per_period}};
    j["workers"] = workers;
    j["output_dir"] = output_dir;
    j["cache"] = cache;
    return j;
}

void ExperimentConfig::validate() const
{
    if (dataset.n_train < 1 || dataset.n_test < 1) {
        throw ConfigError("dataset: n_train and n_test must be >= 1");
    }
    if ((dataset.n_train + dataset.n_test) % 2 != 0) {
        throw ConfigError("dataset: n_train + n_test must be even (points come in spiral pairs)");
    }
    if (!(encoding.input_margin >= 0.0)) {
        throw ConfigError("encoding.input_margin must be >= 0");
    }
    if (workers < 1) {
        throw ConfigError(fmt::format("workers must be >= 1, got {}", workers));
    }
    if (modes.n_modes < 1) {
        throw ConfigError("modes.n_modes must be >= 1");
    }
    if (!(learning.l > 0.0)) {
        throw ConfigError("learning.l must be > 0");
    }
    if (learning.spectrum_highlight < 0) {
        throw ConfigError("learning.spectrum_highlight must be >= 0");
    }
    if (!(drive.input >= 0.0 && drive.input <= 1.0)) {
        throw ConfigError("drive.input must lie in [0, 1]");
    }
    if (drive.samples_per_period < 20) {
        throw ConfigError("drive.samples_per_period must be >= 20");
    }
    mode_set().validate();
    rqrc::validate(StepConfig{reservoir.steps_per_period});
    if (reservoir.fock_cutoff < 3) {
        throw ConfigError("reservoir.fock_cutoff must be >= 3");
    }
    for (double T : sweep.T) {
        if (!(T > 0.0)) {
            throw ConfigError("sweep.T entries must be > 0");
        }
    }
    for (double a : sweep.a0) {
        if (!(a > 0.0)) {
            throw ConfigError("sweep.a0 entries must be > 0");
        }
    }
    for (int m : sweep.m) {
        if (m < 1) {
            throw ConfigError("sweep.m entries must be >= 1");
        }
    }
    EncodingConfig::with_ratio(encoding.a0, encoding.delta_a_ratio, encoding.T, encoding.m,
                               {{-1.0, 1.0}, {-1.0, 1.0}})
      .validate();
}

ModeSet ExperimentConfig::mode_set() const
{
    const std::complex<double> alpha(modes.alpha_re, modes.alpha_im);
    if (modes.single_mode) {
        return ModeSet::single_mode(modes.Omega, modes.lambda, modes.coherent_mode, alpha);
    }
    return ModeSet::cavity(modes.n_modes, modes.Omega, modes.lambda, modes.coherent_mode, alpha);
}

SpiralParams ExperimentConfig::spiral_params() const
{
    SpiralParams p;
    p.count = dataset.n_train + dataset.n_test;
    p.turns = dataset.turns;
    p.radius = dataset.radius;
    p.noise_sd = dataset.noise_sd;
    p.seed = seeds.dataset;
    return p;
}

std::string stable_hash(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

std::string config_hash(const ExperimentConfig& cfg)
{
    // Where and how fast a run executes does not change its results.
    auto j = cfg.to_json();
    j.erase("output_dir");
    j.erase("workers");
    j.erase("cache");
    return stable_hash(j.dump());
}

json to_json(const ReservoirConfig& cfg)
{
    const auto& e = cfg.encoding;
    json ranges = json::array();
    for (const auto& r : e.input_ranges) {
        ranges.push_back({r.min, r.max});
    }
    json modes = json::array();
    for (int n : cfg.modes.mode_numbers) {
        modes.push_back(n);
    }
    return {{"encoding",
             {{"a0", e.a0},
              {"delta_a", e.delta_a},
              {"period", e.period},
              {"repetitions", e.repetitions},
              {"input_ranges", ranges}}},
            {"modes",
             {{"cavity_length", cfg.modes.cavity_length},
              {"detector_frequency", cfg.modes.detector_frequency},
              {"coupling", cfg.modes.coupling},
              {"mode_numbers", modes},
              {"coherent_mode", cfg.modes.coherent_mode},
              {"alpha", {cfg.modes.alpha.real(), cfg.modes.alpha.imag()}}}},
            {"kinematics", to_string(cfg.kinematics)},
            {"engine", to_string(cfg.engine)},
            {"measurement_interval", cfg.resolved_interval()},
            {"steps_per_period", cfg.step.steps_per_period},
            {"fock_cutoff", cfg.fock_cutoff}};
}

}  // namespace rqrc
