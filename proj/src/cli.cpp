#include "pfdr/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "pfdr/error.hpp"
#include "pfdr/f_test.hpp"
#include "pfdr/ldp_engine.hpp"
#include "pfdr/mc_verify.hpp"
#include "pfdr/normal_t.hpp"
#include "pfdr/report.hpp"

namespace pfdr::cli {

namespace {

using report::Document;

enum class Kind { Real, Integer, Text };
enum class Presence { Required, Defaulted, Optional };

struct KeySpec {
    std::string name;
    Kind kind = Kind::Real;
    Presence presence = Presence::Required;
    std::string fallback;
    std::function<void(const std::string& key, const std::string& value)> check;
};

[[noreturn]] void usage_error(const std::string& message) { throw UsageError(message); }

std::string trim(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = text.find_last_not_of(" \t\r");
    return text.substr(first, last - first + 1);
}

std::optional<double> to_real(const std::string& text) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return value;
}

std::optional<long> to_integer(const std::string& text) {
    long value = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec == std::errc() && ptr == end) return value;
    // Accept integral reals such as 1e7.
    const auto real = to_real(text);
    if (real && std::isfinite(*real) && std::floor(*real) == *real && std::abs(*real) < 9e18) {
        return static_cast<long>(*real);
    }
    return std::nullopt;
}

double real_of(const std::string& key, const std::string& value) {
    const auto parsed = to_real(value);
    if (!parsed || !std::isfinite(*parsed)) usage_error("key '" + key + "': '" + value + "' is not a finite number");
    return *parsed;
}

long integer_of(const std::string& key, const std::string& value) {
    const auto parsed = to_integer(value);
    if (!parsed) usage_error("key '" + key + "': '" + value + "' is not an integer");
    return *parsed;
}

// Validators -------------------------------------------------------------

auto open_unit() {
    return [](const std::string& k, const std::string& v) {
        const double x = real_of(k, v);
        if (!(x > 0.0 && x < 1.0)) usage_error("key '" + k + "' must lie in (0, 1), got " + v);
    };
}

auto closed_unit() {
    return [](const std::string& k, const std::string& v) {
        const double x = real_of(k, v);
        if (!(x >= 0.0 && x <= 1.0)) usage_error("key '" + k + "' must lie in [0, 1], got " + v);
    };
}

auto positive() {
    return [](const std::string& k, const std::string& v) {
        if (!(real_of(k, v) > 0.0)) usage_error("key '" + k + "' must be positive, got " + v);
    };
}

auto non_negative() {
    return [](const std::string& k, const std::string& v) {
        if (!(real_of(k, v) >= 0.0)) usage_error("key '" + k + "' must be >= 0, got " + v);
    };
}

auto at_least(long lo) {
    return [lo](const std::string& k, const std::string& v) {
        if (integer_of(k, v) < lo) usage_error("key '" + k + "' must be an integer >= " + std::to_string(lo) + ", got " + v);
    };
}

auto one_of(std::vector<std::string> choices) {
    return [choices](const std::string& k, const std::string& v) {
        if (std::find(choices.begin(), choices.end(), v) != choices.end()) return;
        std::string list;
        for (const auto& c : choices) list += (list.empty() ? "" : "|") + c;
        usage_error("key '" + k + "' must be one of " + list + ", got '" + v + "'");
    };
}

auto any_text() {
    return [](const std::string& k, const std::string& v) {
        if (v.empty()) usage_error("key '" + k + "' must not be empty");
    };
}

const std::vector<std::string> kGeneralFamilies = {"normal", "uniform", "gamma"};
const std::vector<std::string> kScoreFamilies = {"normal-score", "cauchy-score", "gamma-score"};

std::vector<std::string> all_families() {
    std::vector<std::string> all = kGeneralFamilies;
    all.insert(all.end(), kScoreFamilies.begin(), kScoreFamilies.end());
    return all;
}

KeySpec required(std::string name, Kind kind, decltype(KeySpec::check) check) {
    return {std::move(name), kind, Presence::Required, {}, std::move(check)};
}
KeySpec defaulted(std::string name, Kind kind, std::string fallback, decltype(KeySpec::check) check) {
    return {std::move(name), kind, Presence::Defaulted, std::move(fallback), std::move(check)};
}
KeySpec optional_key(std::string name, Kind kind, decltype(KeySpec::check) check) {
    return {std::move(name), kind, Presence::Optional, {}, std::move(check)};
}

void add_family_keys(std::vector<KeySpec>& keys, const std::vector<std::string>& families,
                     const std::string& default_family, bool allow_sample) {
    keys.push_back(defaulted("family", Kind::Text, default_family, one_of(families)));
    keys.push_back(defaulted("sigma", Kind::Real, "1", positive()));
    keys.push_back(defaulted("width", Kind::Real, "1", positive()));
    keys.push_back(defaulted("shape", Kind::Real, "1", positive()));
    keys.push_back(defaulted("scale", Kind::Real, "1", positive()));
    if (allow_sample) {
        keys.push_back(optional_key("sample", Kind::Text, any_text()));
        keys.push_back(defaulted("lambda", Kind::Real, "0", [](const std::string& k, const std::string& v) {
            if (!(real_of(k, v) > -1.0)) usage_error("key '" + k + "' must exceed -1, got " + v);
        }));
        keys.push_back(defaulted("t-max", Kind::Real, "20", positive()));
    }
}

void add_target_keys(std::vector<KeySpec>& keys) {
    keys.push_back(required("alpha", Kind::Real, open_unit()));
    keys.push_back(required("pi", Kind::Real, open_unit()));
}

const std::map<std::string, std::vector<KeySpec>>& schemas() {
    static const auto table = [] {
        std::map<std::string, std::vector<KeySpec>> t;
        {
            auto& k = t["plan-t"];
            add_target_keys(k);
            k.push_back(required("snr", Kind::Real, positive()));
            k.push_back(defaulted("n-max", Kind::Integer, "10000000", at_least(1)));
        }
        {
            auto& k = t["plan-t-mixture"];
            add_target_keys(k);
            k.push_back(optional_key("atoms", Kind::Text, any_text()));
            k.push_back(optional_key("gamma-shape", Kind::Real, positive()));
            k.push_back(optional_key("gamma-scale", Kind::Real, positive()));
            k.push_back(defaulted("scale", Kind::Real, "1", positive()));
            k.push_back(defaulted("n-max", Kind::Integer, "10000000", at_least(1)));
        }
        {
            auto& k = t["plan-f"];
            add_target_keys(k);
            k.push_back(optional_key("delta", Kind::Real, positive()));
            k.push_back(optional_key("p", Kind::Integer, at_least(1)));
            k.push_back(optional_key("design", Kind::Text, any_text()));
            k.push_back(optional_key("beta", Kind::Text, any_text()));
            k.push_back(defaulted("sigma", Kind::Real, "1", positive()));
            k.push_back(defaulted("n-max", Kind::Integer, "10000000", at_least(1)));
        }
        {
            auto& k = t["plan-general"];
            add_target_keys(k);
            add_family_keys(k, kGeneralFamilies, "normal", true);
            k.push_back(required("rho", Kind::Real, open_unit()));
            k.push_back(required("d", Kind::Real, positive()));
        }
        {
            auto& k = t["plan-score"];
            add_target_keys(k);
            add_family_keys(k, kScoreFamilies, "normal-score", false);
            k.push_back(required("rho", Kind::Real, open_unit()));
            k.push_back(required("theta", Kind::Real, positive()));
        }
        {
            auto& k = t["optimize-split"];
            add_family_keys(k, all_families(), "normal", true);
        }
        {
            auto& k = t["simulate"];
            add_family_keys(k, all_families(), "normal", false);
            k.push_back(defaulted("mode", Kind::Text, "pfdr", one_of({"pfdr", "ratio"})));
            k.push_back(defaulted("effect", Kind::Real, "0", non_negative()));
            k.push_back(optional_key("t-target", Kind::Real, non_negative()));
            k.push_back(defaulted("pi", Kind::Real, "0.1", closed_unit()));
            k.push_back(required("n", Kind::Integer, at_least(1)));
            k.push_back(required("m", Kind::Integer, at_least(1)));
            k.push_back(optional_key("z0", Kind::Real, positive()));
            k.push_back(optional_key("calibrate-probability", Kind::Real, open_unit()));
            k.push_back(defaulted("pilot-trials", Kind::Integer, "1000000", at_least(1)));
            k.push_back(defaulted("schedule", Kind::Text, "fixed", one_of({"fixed", "loglog"})));
            k.push_back(required("trials", Kind::Integer, at_least(1)));
            k.push_back(defaulted("batch-size", Kind::Integer, "10000", at_least(1)));
        }
        {
            auto& k = t["ldp-info"];
            add_family_keys(k, all_families(), "normal", true);
            k.push_back(defaulted("rho", Kind::Real, "0.5", open_unit()));
            k.push_back(optional_key("u", Kind::Real, positive()));
            k.push_back(optional_key("n", Kind::Integer, at_least(1)));
        }
        return t;
    }();
    return table;
}

const std::vector<KeySpec>& schema_for(const std::string& command) {
    const auto it = schemas().find(command);
    if (it == schemas().end()) {
        if (command.empty()) usage_error("no command given");
        usage_error("unknown command '" + command + "'");
    }
    return it->second;
}

const KeySpec* find_key(const std::vector<KeySpec>& schema, const std::string& key) {
    for (const auto& spec : schema) {
        if (spec.name == key) return &spec;
    }
    return nullptr;
}

std::string normalise_key(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

// Raw key/value pairs gathered from a file and from flags before the command
// schema is applied.
struct Raw {
    std::optional<std::string> command;
    std::map<std::string, std::string> values;
    std::optional<std::string> format;
    std::optional<std::string> output;
    std::optional<std::string> seed;
};

void assign(Raw& raw, const std::string& key, const std::string& value) {
    if (key == "command") raw.command = value;
    else if (key == "format") raw.format = value;
    else if (key == "output") raw.output = value;
    else if (key == "seed") raw.seed = value;
    else raw.values[key] = value;
}

void read_config_text(const std::string& text, Raw& raw) {
    std::istringstream lines(text);
    std::string line;
    int number = 0;
    while (std::getline(lines, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            usage_error("config line " + std::to_string(number) + ": expected 'key = value'");
        }
        const std::string key = normalise_key(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) usage_error("config line " + std::to_string(number) + ": empty key");
        assign(raw, key, value);
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) usage_error("cannot read file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

RunConfig resolve(const Raw& raw) {
    RunConfig config;
    config.command = raw.command.value_or("");
    const auto& schema = schema_for(config.command);
    for (const auto& [key, value] : raw.values) {
        const KeySpec* spec = find_key(schema, key);
        if (!spec) usage_error("unknown key '" + key + "' for command " + config.command);
        spec->check(key, value);
        config.parameters[key] = value;
    }
    for (const auto& spec : schema) {
        if (config.parameters.count(spec.name)) continue;
        if (spec.presence == Presence::Required) {
            usage_error("missing required key '" + spec.name + "' for command " + config.command);
        }
        if (spec.presence == Presence::Defaulted) config.parameters[spec.name] = spec.fallback;
    }

    const auto has = [&](const char* key) { return config.parameters.count(key) > 0; };
    if (config.command == "plan-t-mixture") {
        const bool gamma = has("gamma-shape") || has("gamma-scale");
        if (has("atoms") == gamma) usage_error("plan-t-mixture needs either 'atoms' or 'gamma-shape' with 'gamma-scale'");
        if (gamma && !(has("gamma-shape") && has("gamma-scale"))) {
            usage_error("plan-t-mixture needs both 'gamma-shape' and 'gamma-scale'");
        }
    } else if (config.command == "plan-f") {
        if (has("design") != has("beta")) usage_error("plan-f needs 'design' and 'beta' together");
        if (has("delta") == has("design")) usage_error("plan-f needs either 'delta' or 'design' with 'beta'");
        if (has("delta") && !has("p")) usage_error("missing required key 'p' for command plan-f");
    } else if (config.command == "simulate") {
        if (has("z0") == has("calibrate-probability")) {
            usage_error("simulate needs exactly one of 'z0' or 'calibrate-probability'");
        }
        if (config.parameters.at("mode") == "ratio" && !has("t-target")) {
            usage_error("missing required key 't-target' for simulate mode=ratio");
        }
    }

    const std::string format = raw.format.value_or("json");
    if (format == "json") config.format = OutputFormat::Json;
    else if (format == "csv") config.format = OutputFormat::Csv;
    else usage_error("key 'format' must be json or csv, got '" + format + "'");
    config.output_path = raw.output;
    if (raw.seed) {
        std::uint64_t seed = 0;
        const std::string& text = *raw.seed;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
        if (ec != std::errc() || ptr != text.data() + text.size()) {
            usage_error("key 'seed' must be a non-negative 64-bit integer, got '" + text + "'");
        }
        config.seed = seed;
    }
    return config;
}

// Runners -----------------------------------------------------------------

struct Outcome {
    Document outputs = Document::object();
    Document diagnostics = Document::object();
    std::string status = "ok";
    int exit_code = 0;
};

class Params {
public:
    explicit Params(const RunConfig& config) : map_(config.parameters) {}
    bool has(const std::string& key) const { return map_.count(key) > 0; }
    const std::string& text(const std::string& key) const { return map_.at(key); }
    double real(const std::string& key) const { return real_of(key, text(key)); }
    long integer(const std::string& key) const { return integer_of(key, text(key)); }

private:
    const std::map<std::string, std::string>& map_;
};

PfdrTarget target_of(const Params& p) { return PfdrTarget(p.real("alpha"), p.real("pi")); }

ldp::FamilySpec family_of(const Params& p) {
    ldp::FamilySpec spec;
    spec.family = ldp::parse_family(p.text("family"));
    spec.sigma = p.real("sigma");
    spec.width = p.real("width");
    spec.alpha = p.real("shape");
    spec.beta = p.real("scale");
    return spec;
}

std::vector<double> read_sample(const std::string& path) {
    std::istringstream lines(read_file(path));
    std::vector<double> sample;
    std::string line;
    int number = 0;
    while (std::getline(lines, line)) {
        ++number;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto value = to_real(line);
        if (!value || !std::isfinite(*value)) {
            usage_error("sample file '" + path + "' line " + std::to_string(number) + ": not a number");
        }
        sample.push_back(*value);
    }
    return sample;
}

struct CgfChoice {
    ldp::CgfModel cgf;
    ldp::TailIndex tail;
    std::string family;
};

CgfChoice cgf_of(const Params& p) {
    if (p.has("sample")) {
        const auto sample = read_sample(p.text("sample"));
        const double t_max = p.real("t-max");
        std::vector<double> grid;
        constexpr int kSteps = 400;
        for (int i = -kSteps; i <= kSteps; ++i) grid.push_back(t_max * i / kSteps);
        return {ldp::empirical_cgf(sample, grid), {p.real("lambda"), ldp::ZetaKind::Constant, std::nullopt},
                "empirical"};
    }
    const auto spec = family_of(p);
    if (ldp::is_score_family(spec.family)) {
        auto model = ldp::make_score_model(spec);
        return {model.cgf, model.tail, p.text("family")};
    }
    return {ldp::make_cgf(spec), ldp::tail_index(spec), p.text("family")};
}

void put_plan(const PlanReport& plan, Outcome& out) {
    out.outputs["n_exact"] = plan.n_exact ? Document(*plan.n_exact) : Document(nullptr);
    out.outputs["n_asymptotic"] = plan.n_asymptotic;
    out.outputs["regime"] = to_string(plan.regime);
    out.outputs["q_value"] = plan.q_value;
    for (const auto& [k, v] : plan.diagnostics) out.diagnostics[k] = v;
    for (const auto& [k, v] : plan.notes) out.diagnostics[k] = v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> values;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) values.push_back(real_of(key, trim(item)));
    if (values.empty()) usage_error("key '" + key + "' is empty");
    return values;
}

std::vector<SnrAtom> parse_atoms(const std::string& text) {
    std::vector<SnrAtom> atoms;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) usage_error("key 'atoms': expected r:weight pairs, got '" + item + "'");
        atoms.push_back({real_of("atoms", trim(item.substr(0, colon))), real_of("atoms", trim(item.substr(colon + 1)))});
    }
    return atoms;
}

std::vector<std::vector<double>> read_design(const std::string& path) {
    std::istringstream lines(read_file(path));
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(lines, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream cells(line);
        std::vector<double> row;
        std::string cell;
        while (cells >> cell) row.push_back(real_of("design", cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

Outcome run_plan_t(const Params& p) {
    Outcome out;
    put_plan(plan_t(target_of(p), SnrEffect(p.real("snr")), p.integer("n-max")), out);
    return out;
}

Outcome run_plan_t_mixture(const Params& p) {
    const double scale = p.real("scale");
    const SnrMixture mixture = p.has("atoms")
                                   ? SnrMixture::discrete(parse_atoms(p.text("atoms")), scale)
                                   : SnrMixture::gamma(p.real("gamma-shape"), p.real("gamma-scale"), scale);
    Outcome out;
    put_plan(plan_t_mixture(target_of(p), mixture, p.integer("n-max")), out);
    return out;
}

Outcome run_plan_f(const Params& p) {
    double delta = 0.0;
    long dims = 0;
    Outcome out;
    if (p.has("design")) {
        const auto beta = parse_list("beta", p.text("beta"));
        dims = static_cast<long>(beta.size());
        if (p.has("p") && p.integer("p") != dims) {
            usage_error("key 'p' (" + p.text("p") + ") differs from the length of 'beta'");
        }
        delta = effect_bound_from_design(read_design(p.text("design")), beta, p.real("sigma"));
        out.diagnostics["delta_from_design"] = delta;
    } else {
        delta = p.real("delta");
        dims = p.integer("p");
    }
    put_plan(plan_f(target_of(p), FEffect(delta, dims), p.integer("n-max")), out);
    return out;
}

Outcome run_plan_general(const Params& p) {
    const CgfChoice choice = cgf_of(p);
    Outcome out;
    put_plan(ldp::n_star_general(target_of(p), choice.cgf, choice.tail, ldp::SplitSpec(p.real("rho")), p.real("d")),
             out);
    out.diagnostics["family_tag"] = choice.cgf.family_tag;
    return out;
}

Outcome run_plan_score(const Params& p) {
    const auto model = ldp::make_score_model(family_of(p));
    Outcome out;
    put_plan(ldp::n_star_score(target_of(p), model, ldp::SplitSpec(p.real("rho")), p.real("theta")), out);
    out.diagnostics["family_tag"] = model.cgf.family_tag;
    return out;
}

std::string boundary_name(ldp::SplitOutcome::Boundary b) {
    switch (b) {
        case ldp::SplitOutcome::Boundary::Interior: return "interior";
        case ldp::SplitOutcome::Boundary::Lower: return "lower";
        case ldp::SplitOutcome::Boundary::Upper: return "upper";
    }
    return "interior";
}

Outcome run_optimize_split(const Params& p) {
    const CgfChoice choice = cgf_of(p);
    const auto split = ldp::optimal_split(choice.cgf, choice.tail);
    Outcome out;
    out.outputs["rho_star"] = split.rho_star ? Document(*split.rho_star) : Document(nullptr);
    out.outputs["boundary"] = boundary_name(split.boundary);
    out.outputs["rho_searched"] = split.rho_searched;
    out.outputs["objective"] = split.objective;
    out.diagnostics["family_tag"] = choice.cgf.family_tag;
    out.diagnostics["lambda"] = choice.tail.lambda;
    return out;
}

// Limit of the tail ratio for the simulated scenario, when one is available.
std::optional<double> ratio_limit(const ldp::FamilySpec& spec, double T, double rho) {
    const ldp::SplitSpec split(rho);
    if (ldp::is_score_family(spec.family)) {
        const auto model = ldp::make_score_model(spec);
        const double t0 = ldp::solve_t0(model.cgf, model.tail, split);
        return std::exp((1.0 - rho) * T * model.cgf.lambda_d1(t0) + 2.0 * rho * T * model.k_f);
    }
    const double t0 = ldp::solve_t0(ldp::make_cgf(spec), ldp::tail_index(spec), split);
    return std::exp((1.0 - rho) * T * t0);
}

Outcome run_simulate(const Params& p, const RunConfig& config) {
    mc::SimScenario scn;
    scn.family = family_of(p);
    scn.pi = p.real("pi");
    scn.n = p.integer("n");
    scn.m = p.integer("m");
    scn.trials = p.integer("trials");
    scn.batch_size = p.integer("batch-size");
    scn.seed = config.seed.value_or(0);
    scn.schedule.kind = p.text("schedule") == "loglog" ? mc::ThresholdSchedule::Kind::LogLog
                                                         : mc::ThresholdSchedule::Kind::Fixed;
    const double total = static_cast<double>(scn.n_total());
    const double rho = static_cast<double>(scn.m) / total;
    const bool ratio_mode = p.text("mode") == "ratio";
    const double T = p.has("t-target") ? p.real("t-target") : p.real("effect") * total;
    scn.effect = T / total;

    Outcome out;
    if (p.has("calibrate-probability")) {
        scn.schedule.kind = mc::ThresholdSchedule::Kind::Fixed;
        scn.schedule.z0 = mc::calibrate_threshold(scn, p.real("calibrate-probability"), p.integer("pilot-trials"));
        out.diagnostics["calibrated_z0"] = scn.schedule.z0;
    } else {
        scn.schedule.z0 = p.real("z0");
    }
    out.diagnostics["rho"] = rho;
    out.diagnostics["T"] = T;
    out.diagnostics["threads"] = static_cast<long>(mc::default_threads());

    const std::optional<double> limit = ratio_limit(scn.family, T, rho);

    if (ratio_mode) {
        try {
            const auto est = mc::tail_ratio_mc(scn, T);
            out.outputs["ratio_hat"] = est.ratio_hat;
            out.outputs["std_error"] = est.std_error;
            out.outputs["numerator_hits"] = est.numerator_hits;
            out.outputs["denominator_hits"] = est.denominator_hits;
            out.outputs["trials"] = est.trials;
            out.outputs["denominator_probability"] = est.denominator_probability;
            out.outputs["threshold"] = est.threshold;
            out.diagnostics["effect"] = est.effect;
        } catch (const InsufficientHitsError& e) {
            out.status = "insufficient_hits";
            out.exit_code = 1;
            out.outputs["message"] = e.what();
            out.outputs["numerator_hits"] = e.numerator_hits();
            out.outputs["denominator_hits"] = e.denominator_hits();
        }
        if (limit) out.diagnostics["ratio_limit"] = *limit;
        return out;
    }

    try {
        const auto est = mc::simulate_pfdr(scn);
        out.outputs["pfdr_hat"] = est.pfdr_hat;
        out.outputs["std_error"] = est.std_error;
        out.outputs["rejections"] = est.rejections;
        out.outputs["batches"] = est.batches;
        out.outputs["batches_with_rejections"] = est.batches_with_rejections;
        out.outputs["rejection_probability"] = est.rejection_probability;
        out.outputs["threshold"] = est.threshold;
    } catch (const DegenerateScenarioError& e) {
        out.status = "degenerate_scenario";
        out.exit_code = 1;
        out.outputs["message"] = e.what();
        out.outputs["rejection_probability"] = e.rejection_probability();
    }
    if (!ldp::is_score_family(scn.family.family) && scn.pi > 0.0 && scn.pi < 1.0) {
        const double t0 = ldp::solve_t0(ldp::make_cgf(scn.family), ldp::tail_index(scn.family), ldp::SplitSpec(rho));
        out.diagnostics["pfdr_floor_limit"] = ldp::pfdr_floor_limit(scn.pi, T, ldp::SplitSpec(rho), t0);
    }
    return out;
}

Outcome run_ldp_info(const Params& p) {
    const CgfChoice choice = cgf_of(p);
    const double rho = p.real("rho");
    const double t0 = ldp::solve_t0(choice.cgf, choice.tail, ldp::SplitSpec(rho));
    Outcome out;
    out.outputs["family_tag"] = choice.cgf.family_tag;
    out.outputs["t0"] = t0;
    out.outputs["lambda_d1_t0"] = choice.cgf.lambda_d1(t0);
    out.outputs["split_objective"] = (1.0 - rho) * t0;
    out.outputs["lambda"] = choice.tail.lambda;
    out.outputs["zeta"] = choice.tail.zeta == ldp::ZetaKind::Constant ? "constant" : "logarithmic";
    out.outputs["lambda_d2_at_0"] = choice.cgf.lambda_d2(0.0);
    if (choice.family != "empirical" && ldp::is_score_family(ldp::parse_family(choice.family))) {
        out.outputs["k_f"] = ldp::make_score_model(family_of(p)).k_f;
    }
    if (p.has("u")) {
        const auto point = ldp::legendre(choice.cgf, p.real("u"));
        out.outputs["lambda_star"] = point.lambda_star;
        out.outputs["eta"] = point.eta;
        if (p.has("n")) out.outputs["bahadur_rao_tail"] = mc::bahadur_rao_tail(choice.cgf, p.real("u"), p.integer("n"));
    }
    out.diagnostics["domain_inf"] = choice.cgf.domain_inf;
    out.diagnostics["domain_sup"] = choice.cgf.domain_sup;
    out.diagnostics["d1_inf"] = choice.cgf.d1_inf;
    out.diagnostics["d1_sup"] = choice.cgf.d1_sup;
    return out;
}

Outcome dispatch(const RunConfig& config) {
    const Params p(config);
    const std::string& c = config.command;
    if (c == "plan-t") return run_plan_t(p);
    if (c == "plan-t-mixture") return run_plan_t_mixture(p);
    if (c == "plan-f") return run_plan_f(p);
    if (c == "plan-general") return run_plan_general(p);
    if (c == "plan-score") return run_plan_score(p);
    if (c == "optimize-split") return run_optimize_split(p);
    if (c == "simulate") return run_simulate(p, config);
    if (c == "ldp-info") return run_ldp_info(p);
    usage_error("unknown command '" + c + "'");
}

Document inputs_of(const RunConfig& config) {
    Document inputs = Document::object();
    const auto& schema = schema_for(config.command);
    for (const auto& [key, value] : config.parameters) {
        const KeySpec* spec = find_key(schema, key);
        if (spec && spec->kind == Kind::Real) inputs[key] = real_of(key, value);
        else if (spec && spec->kind == Kind::Integer) inputs[key] = integer_of(key, value);
        else inputs[key] = value;
    }
    return inputs;
}

}  // namespace

const std::vector<std::string>& commands() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, keys] : schemas()) out.push_back(name);
        return out;
    }();
    return names;
}

Invocation parse_args(const std::vector<std::string>& args) {
    Raw flags;
    Invocation inv;
    std::optional<std::string> config_path;

    CLI::App app{"pfdr_sizer"};
    app.set_help_flag();
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(0, 1);
    app.add_flag("-h,--help", inv.help);
    app.add_flag("--print-effective-config", inv.print_effective_config);
    app.add_option("--config", config_path);
    for (const char* key : {"format", "output", "seed"}) {
        app.add_option_function<std::string>(std::string("--") + key,
                                             [&flags, key](const std::string& v) { assign(flags, key, v); });
    }
    for (const auto& [command, schema] : schemas()) {
        CLI::App* sub = app.add_subcommand(command);
        sub->set_help_flag();
        sub->fallthrough();
        for (const KeySpec& key : schema) {
            std::string names = "--" + key.name;
            std::string snake = key.name;
            std::replace(snake.begin(), snake.end(), '-', '_');
            if (snake != key.name) names += ",--" + snake;
            sub->add_option_function<std::string>(names,
                                                  [&flags, name = key.name](const std::string& v) { flags.values[name] = v; });
        }
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        usage_error(e.what());
    }
    if (!app.get_subcommands().empty()) flags.command = app.get_subcommands().front()->get_name();
    if (inv.help) return inv;

    Raw merged;
    if (config_path) read_config_text(read_file(*config_path), merged);
    if (flags.command) merged.command = flags.command;
    if (flags.format) merged.format = flags.format;
    if (flags.output) merged.output = flags.output;
    if (flags.seed) merged.seed = flags.seed;
    for (const auto& [k, v] : flags.values) merged.values[k] = v;
    inv.config = resolve(merged);
    return inv;
}

RunConfig parse_config(const std::vector<std::string>& args) { return parse_args(args).config; }

RunConfig parse_config_text(const std::string& text, const std::string& command) {
    Raw raw;
    read_config_text(text, raw);
    if (!command.empty()) raw.command = command;
    return resolve(raw);
}

std::string effective_config_text(const RunConfig& config) {
    std::ostringstream out;
    out << "command = " << config.command << "\n";
    out << "format = " << (config.format == OutputFormat::Json ? "json" : "csv") << "\n";
    if (config.output_path) out << "output = " << *config.output_path << "\n";
    if (config.seed) out << "seed = " << *config.seed << "\n";
    for (const auto& [key, value] : config.parameters) out << key << " = " << value << "\n";
    return out.str();
}

std::string usage() {
    std::ostringstream out;
    out << "usage: pfdr_sizer <command> [--key value ...] [--config FILE] [--format json|csv]\n"
           "                  [--output PATH] [--seed N] [--print-effective-config]\n\n"
           "commands and keys (* required):\n";
    for (const auto& [name, keys] : schemas()) {
        out << "  " << name << "\n   ";
        for (const auto& k : keys) {
            out << " " << k.name;
            if (k.presence == Presence::Required) out << "*";
            else if (k.presence == Presence::Defaulted) out << "=" << k.fallback;
        }
        out << "\n";
    }
    out << "\nexit status: 0 success, 1 unattainable or insufficient hits, 2 usage error\n";
    return out.str();
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    Document doc = Document::object();
    doc["command"] = config.command;
    doc["inputs"] = inputs_of(config);
    Outcome outcome;
    try {
        outcome = dispatch(config);
    } catch (const UsageError& e) {
        err << "pfdr_sizer: error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        err << "pfdr_sizer: error: " << e.what() << "\n";
        return 2;
    } catch (const UnsupportedFamilyError& e) {
        err << "pfdr_sizer: error: " << e.what() << "\n";
        return 2;
    } catch (const NotAttainableError& e) {
        outcome.status = "not_attainable";
        outcome.exit_code = 1;
        outcome.outputs["n_exact"] = nullptr;
        outcome.outputs["message"] = e.what();
        outcome.outputs["rho_at_n_max"] = e.rho_at_n_max();
        outcome.outputs["n_max"] = e.n_max();
    } catch (const Error& e) {
        outcome.status = "error";
        outcome.exit_code = 1;
        outcome.outputs["message"] = e.what();
    }
    doc["outputs"] = outcome.outputs;
    doc["diagnostics"] = outcome.diagnostics;
    doc["status"] = outcome.status;
    doc["seed"] = config.seed ? Document(*config.seed) : Document(nullptr);
    doc["tool_version"] = report::kToolVersion;

    const std::string text = config.format == OutputFormat::Json ? report::to_json(doc) : report::to_csv(doc);
    if (config.output_path) {
        std::ofstream file(*config.output_path);
        if (!file) {
            err << "pfdr_sizer: error: cannot write '" << *config.output_path << "'\n";
            return 2;
        }
        file << text;
    } else {
        out << text;
    }
    if (outcome.exit_code != 0) err << "pfdr_sizer: " << outcome.status << "\n";
    return outcome.exit_code;
}

int main_entry(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    Invocation inv;
    try {
        inv = parse_args(args);
    } catch (const UsageError& e) {
        std::cerr << "pfdr_sizer: error: " << e.what() << "\n" << usage();
        return 2;
    }
    if (inv.help) {
        std::cout << usage();
        return 0;
    }
    if (inv.print_effective_config) {
        std::cout << effective_config_text(inv.config);
        return 0;
    }
    return run(inv.config, std::cout, std::cerr);
}

}  // namespace pfdr::cli
