// config.cpp - scenario table, YAML parsing/serialization and validation

#include "relax/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "relax/emit.hpp"
#include "relax/errors.hpp"

namespace relax {

namespace {

const std::vector<ProvenanceEntry>& provenance_table() {
    const double sqrt2 = std::sqrt(2.0);
    static const std::vector<ProvenanceEntry> table = {
        {Scenario::Fig1Random, "chaotic Ising, random initial state",
         {std::sqrt(3.0) / 2.0, sqrt2, 1.0, 0.0, 0.0, 0.0}, {1.0, 2.0, true, 200}, {}},
        {Scenario::Fig2Product, "chaotic Ising, product initial states",
         {std::sqrt(3.0) / 2.0, sqrt2, 1.0, 0.0, 0.0, 0.0}, {1.0, 2.0, true, 200}, {}},
        {Scenario::Fig3Xxz, "disordered XXZ, Neel initial state",
         {0.0, 0.0, 1.0, 0.0, 0.0, 0.0}, {4.0, 8.0, true, 200}, {0.0, sqrt2, std::sqrt(17.0), std::sqrt(43.0)}},
        {Scenario::FigS1Transition, "disordered XXZ across the ergodic-localized transition",
         {0.0, 0.0, 1.0, 0.0, 0.0, 0.0}, {4.0, 8.0, true, 200}, {2.0, 2.5, 3.0, 3.5, 4.0}},
        {Scenario::FigS2TfimRandom, "transverse-field Ising, random initial state",
         {0.0, sqrt2, 1.0, 0.0, 0.0, 0.0}, {1.0, 2.0, true, 200}, {}},
        {Scenario::FigS3TfimProduct, "transverse-field Ising, product initial states",
         {0.0, sqrt2, 1.0, 0.0, 0.0, 0.0}, {1.0, 2.0, true, 200}, {}},
        {Scenario::FigS4Quench, "transverse-field Ising quench h0 -> h1 (free fermions)",
         {0.0, 0.0, 1.0, sqrt2, 1.0, 3.0 / 8.0}, {0.0, 1.0, true, 200}, {}},
    };
    return table;
}

constexpr std::string_view kScenarioNames[] = {"fig1-random",        "fig2-product",       "fig3-xxz",
                                               "figS1-transition",   "figS2-tfim-random",  "figS3-tfim-product",
                                               "figS4-quench"};

[[noreturn]] void fail(const std::string& key, const std::string& message) {
    throw ValidationError("config key '" + key + "': " + message);
}

template <class T>
T scalar(const YAML::Node& node, const std::string& key) {
    if (!node.IsScalar()) fail(key, "expected a scalar");
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        fail(key, "cannot parse '" + node.Scalar() + "'");
    }
}

template <class T>
std::vector<T> sequence(const YAML::Node& node, const std::string& key) {
    std::vector<T> out;
    if (node.IsScalar()) {
        out.push_back(scalar<T>(node, key));
        return out;
    }
    if (!node.IsSequence()) fail(key, "expected a list");
    for (const auto& item : node) out.push_back(scalar<T>(item, key));
    return out;
}

void check_keys(const YAML::Node& node, const std::string& where, std::initializer_list<std::string_view> allowed) {
    if (!node.IsMap()) fail(where, "expected a mapping");
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            fail(where.empty() ? key : where + "." + key, "unknown key");
    }
}

Quantity parse_quantity(const std::string& name) {
    for (auto q : {Quantity::Steady, Quantity::Initial, Quantity::Speed})
        if (to_string(q) == name) return q;
    fail("quantities", "unknown quantity '" + name + "'");
}

ReferenceKind parse_reference(const std::string& name) {
    for (auto r : {ReferenceKind::None, ReferenceKind::MaximallyMixed, ReferenceKind::Gibbs,
                   ReferenceKind::GibbsEnergyMatched, ReferenceKind::DiagonalEnsemble, ReferenceKind::TimeAveraged,
                   ReferenceKind::Gge})
        if (to_string(r) == name) return r;
    fail("reference", "unknown reference '" + name + "'");
}

PositionMode parse_positions(const std::string& name) {
    for (auto p : {PositionMode::Auto, PositionMode::All, PositionMode::First})
        if (to_string(p) == name) return p;
    fail("positions", "unknown mode '" + name + "'");
}

bool is_product_scenario(Scenario s) { return s == Scenario::Fig2Product || s == Scenario::FigS3TfimProduct; }

}  // namespace

// ---------------------------------------------------------------------------
// Names

std::string_view to_string(Scenario scenario) { return kScenarioNames[static_cast<int>(scenario)]; }

Scenario parse_scenario(std::string_view name) {
    for (auto s : all_scenarios())
        if (to_string(s) == name) return s;
    throw ValidationError("unknown scenario '" + std::string(name) + "'");
}

const std::vector<Scenario>& all_scenarios() {
    static const std::vector<Scenario> list = {Scenario::Fig1Random,      Scenario::Fig2Product,
                                               Scenario::Fig3Xxz,         Scenario::FigS1Transition,
                                               Scenario::FigS2TfimRandom, Scenario::FigS3TfimProduct,
                                               Scenario::FigS4Quench};
    return list;
}

std::string_view to_string(Quantity q) {
    switch (q) {
        case Quantity::Steady: return "steady";
        case Quantity::Initial: return "initial";
        case Quantity::Speed: return "speed";
    }
    return "unknown";
}

std::string_view to_string(ReferenceKind kind) {
    switch (kind) {
        case ReferenceKind::None: return "none";
        case ReferenceKind::MaximallyMixed: return "maximally_mixed";
        case ReferenceKind::Gibbs: return "gibbs";
        case ReferenceKind::GibbsEnergyMatched: return "gibbs_energy_matched";
        case ReferenceKind::DiagonalEnsemble: return "diagonal_ensemble";
        case ReferenceKind::TimeAveraged: return "time_averaged";
        case ReferenceKind::Gge: return "gge";
    }
    return "unknown";
}

std::string_view to_string(PositionMode mode) {
    switch (mode) {
        case PositionMode::Auto: return "auto";
        case PositionMode::All: return "all";
        case PositionMode::First: return "first";
    }
    return "unknown";
}

bool is_gaussian(Scenario scenario) { return scenario == Scenario::FigS4Quench; }

bool is_disordered(Scenario scenario) {
    return scenario == Scenario::Fig3Xxz || scenario == Scenario::FigS1Transition;
}

const ProvenanceEntry& provenance(Scenario scenario) {
    for (const auto& entry : provenance_table())
        if (entry.scenario == scenario) return entry;
    throw ValidationError("scenario missing from the provenance table");
}

// ---------------------------------------------------------------------------
// Defaults

ExperimentConfig default_config(Scenario scenario) {
    const auto& p = provenance(scenario);
    ExperimentConfig c;
    c.scenario = scenario;
    c.parameters = p.parameters;
    c.window = p.window;
    c.sizes = {8, 10, 12};
    c.ratios = {0.25, 0.5, 0.75};
    c.metrics = {MetricKind::TraceDistance};
    c.base_seed = 20240601;
    switch (scenario) {
        case Scenario::Fig1Random:
        case Scenario::FigS2TfimRandom:
            c.quantities = {Quantity::Steady, Quantity::Speed};
            c.reference = ReferenceKind::MaximallyMixed;
            break;
        case Scenario::Fig2Product:
            c.initial_state = ProductStateKind::YPlus;
            c.quantities = {Quantity::Speed};
            c.reference = ReferenceKind::GibbsEnergyMatched;
            break;
        case Scenario::FigS3TfimProduct:
            c.initial_state = ProductStateKind::XPlus;
            c.quantities = {Quantity::Speed};
            c.reference = ReferenceKind::GibbsEnergyMatched;
            break;
        case Scenario::Fig3Xxz:
            c.disorder_strengths = p.disorder_strengths;
            c.quantities = {Quantity::Speed};
            c.reference = ReferenceKind::DiagonalEnsemble;
            c.realizations = 16;
            break;
        case Scenario::FigS1Transition:
            c.disorder_strengths = p.disorder_strengths;
            c.quantities = {Quantity::Speed};
            c.reference = ReferenceKind::DiagonalEnsemble;
            c.realizations = 16;
            break;
        case Scenario::FigS4Quench:
            c.sizes = {96};
            c.ratios = {0.125, 0.25, 0.375, 0.5};
            c.metrics = {MetricKind::Bures, MetricKind::Schatten2, MetricKind::NormalizedSchatten2,
                         MetricKind::RelativeDistance};
            c.quantities = {Quantity::Initial, Quantity::Steady, Quantity::Speed};
            c.reference = ReferenceKind::Gge;
            break;
    }
    return c;
}

// ---------------------------------------------------------------------------
// Validation

std::vector<int> subsystem_sizes_for(const ExperimentConfig& config, int num_sites) {
    std::set<int> sizes;
    for (double x : config.ratios) {
        const double target = x * num_sites;
        const int lo = static_cast<int>(std::floor(target + 1e-9));
        const int hi = static_cast<int>(std::ceil(target - 1e-9));
        for (int la : {lo, hi})
            if (la >= 1 && la < num_sites) sizes.insert(la);
    }
    for (int la : config.subsystem_sizes)
        if (la >= 1 && la < num_sites) sizes.insert(la);
    return {sizes.begin(), sizes.end()};
}

void validate(const ExperimentConfig& c) {
    if (c.sizes.empty()) fail("sizes", "at least one system size is required");
    if (c.metrics.empty()) fail("metrics", "at least one metric is required");
    if (c.quantities.empty()) fail("quantities", "at least one quantity is required");
    if (c.ratios.empty() && c.subsystem_sizes.empty()) fail("subsystem", "give ratios or sizes");
    if (c.realizations < 1) fail("realizations", "must be >= 1");
    if (c.first_realization < 0) fail("first_realization", "must be >= 0");
    if (c.workers < 1) fail("workers", "must be >= 1");
    if (!(c.speed_step > 0.0)) fail("speed_step", "must be positive");
    if (!(c.relative_entropy_cutoff > 0.0)) fail("relative_entropy_cutoff", "must be positive");
    if (c.window.samples < 2) fail("window.samples", "must be >= 2");
    if (!(c.window.end > c.window.start)) fail("window", "end must exceed start");
    for (double x : c.ratios)
        if (!(x > 0.0 && x <= 1.0)) fail("subsystem.ratios", "ratios must lie in (0, 1]");
    for (int la : c.subsystem_sizes)
        if (la < 1) fail("subsystem.sizes", "sizes must be >= 1");
    for (int L : c.sizes) {
        if (L < 2) fail("sizes", "L must be >= 2");
        if (subsystem_sizes_for(c, L).empty())
            fail("subsystem", "no subsystem size in [1, L) for L=" + std::to_string(L));
    }
    if (std::set<MetricKind>(c.metrics.begin(), c.metrics.end()).size() != c.metrics.size())
        fail("metrics", "duplicate metric");
    if (std::set<Quantity>(c.quantities.begin(), c.quantities.end()).size() != c.quantities.size())
        fail("quantities", "duplicate quantity");

    const bool wants_steady =
        std::find(c.quantities.begin(), c.quantities.end(), Quantity::Steady) != c.quantities.end();
    if (wants_steady && c.reference == ReferenceKind::None) fail("reference", "steady quantity needs a reference");
    if (c.reference == ReferenceKind::Gibbs && !std::isfinite(c.beta)) fail("reference.beta", "must be finite");

    if (is_product_scenario(c.scenario) && !c.initial_state) fail("initial_state", "product scenario needs a state");
    if (!is_product_scenario(c.scenario) && c.initial_state)
        fail("initial_state", "only product-state scenarios take an initial state");
    if (c.initial_state == ProductStateKind::Neel)
        for (int L : c.sizes)
            if (L % 2 != 0) fail("sizes", "Neel state needs even L");

    if (is_disordered(c.scenario)) {
        if (c.disorder_strengths.empty()) fail("disorder_strengths", "at least one strength is required");
        for (double h : c.disorder_strengths)
            if (!(h >= 0.0) || !std::isfinite(h)) fail("disorder_strengths", "strengths must be finite and >= 0");
        for (int L : c.sizes)
            if (L % 2 != 0) fail("sizes", "Neel state needs even L");
    } else if (!c.disorder_strengths.empty()) {
        fail("disorder_strengths", "only XXZ scenarios take disorder");
    }

    if (is_gaussian(c.scenario)) {
        for (int L : c.sizes)
            if (L % 2 != 0) fail("sizes", "free-fermion quench needs even L");
        for (auto m : c.metrics)
            if (m == MetricKind::TraceDistance)
                fail("metrics", "trace_distance has no Gaussian form; use bures");
        if (c.reference != ReferenceKind::Gge && c.reference != ReferenceKind::None)
            fail("reference", "the quench scenario supports only 'gge'");
        if (c.realizations != 1) fail("realizations", "the quench scenario is deterministic; use 1");
    } else {
        if (c.reference == ReferenceKind::Gge) fail("reference", "'gge' is only available for figS4-quench");
        // XXZ runs diagonalize only the magnetization sector of the Neel state
        if (is_disordered(c.scenario) && wants_steady &&
            (c.reference == ReferenceKind::Gibbs || c.reference == ReferenceKind::GibbsEnergyMatched))
            fail("reference", "canonical references need the full spectrum; use diagonal_ensemble for XXZ");
    }
}

// ---------------------------------------------------------------------------
// YAML

ExperimentConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ValidationError(std::string("config is not valid YAML: ") + e.what());
    }
    if (!root || !root.IsMap()) throw ValidationError("config must be a YAML mapping");
    check_keys(root, "",
               {"scenario", "parameters", "initial_state", "disorder_strengths", "sizes", "subsystem", "window",
                "metrics", "quantities", "reference", "beta", "realizations", "first_realization", "base_seed",
                "workers", "positions", "speed_step", "random_amplitudes", "relative_entropy_cutoff",
                "emit_time_series", "emit_realizations"});
    if (!root["scenario"]) fail("scenario", "required");
    ExperimentConfig c = default_config(parse_scenario(scalar<std::string>(root["scenario"], "scenario")));

    if (const auto p = root["parameters"]) {
        check_keys(p, "parameters", {"h_x", "h_z", "delta", "h0", "h1", "t_star"});
        auto read = [&](const char* key, double& out) {
            if (p[key]) out = scalar<double>(p[key], std::string("parameters.") + key);
        };
        read("h_x", c.parameters.h_x);
        read("h_z", c.parameters.h_z);
        read("delta", c.parameters.delta);
        read("h0", c.parameters.h0);
        read("h1", c.parameters.h1);
        read("t_star", c.parameters.t_star);
    }
    if (const auto n = root["initial_state"]) {
        const auto name = scalar<std::string>(n, "initial_state");
        try {
            c.initial_state = parse_product_state(name);
        } catch (const DomainError&) {
            fail("initial_state", "unknown product state '" + name + "'");
        }
    }
    if (const auto n = root["disorder_strengths"]) c.disorder_strengths = sequence<double>(n, "disorder_strengths");
    if (const auto n = root["sizes"]) c.sizes = sequence<int>(n, "sizes");
    if (const auto s = root["subsystem"]) {
        check_keys(s, "subsystem", {"ratios", "sizes"});
        c.ratios = s["ratios"] ? sequence<double>(s["ratios"], "subsystem.ratios") : std::vector<double>{};
        c.subsystem_sizes = s["sizes"] ? sequence<int>(s["sizes"], "subsystem.sizes") : std::vector<int>{};
    }
    if (const auto w = root["window"]) {
        check_keys(w, "window", {"start", "end", "scale", "samples"});
        if (w["start"]) c.window.start = scalar<double>(w["start"], "window.start");
        if (w["end"]) c.window.end = scalar<double>(w["end"], "window.end");
        if (w["samples"]) c.window.samples = scalar<int>(w["samples"], "window.samples");
        if (w["scale"]) {
            const auto scale = scalar<std::string>(w["scale"], "window.scale");
            if (scale == "L")
                c.window.scale_with_size = true;
            else if (scale == "1")
                c.window.scale_with_size = false;
            else
                fail("window.scale", "expected 'L' or '1'");
        }
    }
    if (const auto n = root["metrics"]) {
        c.metrics.clear();
        for (const auto& name : sequence<std::string>(n, "metrics")) {
            try {
                c.metrics.push_back(parse_metric_kind(name));
            } catch (const DomainError&) {
                fail("metrics", "unknown metric '" + name + "'");
            }
        }
    }
    if (const auto n = root["quantities"]) {
        c.quantities.clear();
        for (const auto& name : sequence<std::string>(n, "quantities")) c.quantities.push_back(parse_quantity(name));
    }
    if (const auto n = root["reference"]) c.reference = parse_reference(scalar<std::string>(n, "reference"));
    if (const auto n = root["beta"]) c.beta = scalar<double>(n, "beta");
    if (const auto n = root["realizations"]) c.realizations = scalar<int>(n, "realizations");
    if (const auto n = root["first_realization"]) c.first_realization = scalar<int>(n, "first_realization");
    if (const auto n = root["base_seed"]) c.base_seed = scalar<std::uint64_t>(n, "base_seed");
    if (const auto n = root["workers"]) c.workers = scalar<int>(n, "workers");
    if (const auto n = root["positions"]) c.positions = parse_positions(scalar<std::string>(n, "positions"));
    if (const auto n = root["speed_step"]) c.speed_step = scalar<double>(n, "speed_step");
    if (const auto n = root["random_amplitudes"]) {
        const auto kind = scalar<std::string>(n, "random_amplitudes");
        if (kind != "complex" && kind != "real") fail("random_amplitudes", "expected 'complex' or 'real'");
        c.complex_random_amplitudes = kind == "complex";
    }
    if (const auto n = root["relative_entropy_cutoff"])
        c.relative_entropy_cutoff = scalar<double>(n, "relative_entropy_cutoff");
    if (const auto n = root["emit_time_series"]) c.emit_time_series = scalar<bool>(n, "emit_time_series");
    if (const auto n = root["emit_realizations"]) c.emit_realizations = scalar<bool>(n, "emit_realizations");

    validate(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string to_yaml(const ExperimentConfig& c) {
    YAML::Emitter out;
    auto num = [](double v) { return format_double(v); };
    out << YAML::BeginMap;
    out << YAML::Key << "scenario" << YAML::Value << std::string(to_string(c.scenario));
    out << YAML::Key << "parameters" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "h_x" << YAML::Value << num(c.parameters.h_x);
    out << YAML::Key << "h_z" << YAML::Value << num(c.parameters.h_z);
    out << YAML::Key << "delta" << YAML::Value << num(c.parameters.delta);
    out << YAML::Key << "h0" << YAML::Value << num(c.parameters.h0);
    out << YAML::Key << "h1" << YAML::Value << num(c.parameters.h1);
    out << YAML::Key << "t_star" << YAML::Value << num(c.parameters.t_star);
    out << YAML::EndMap;
    if (c.initial_state)
        out << YAML::Key << "initial_state" << YAML::Value << std::string(to_string(*c.initial_state));
    if (!c.disorder_strengths.empty()) {
        out << YAML::Key << "disorder_strengths" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (double h : c.disorder_strengths) out << num(h);
        out << YAML::EndSeq;
    }
    out << YAML::Key << "sizes" << YAML::Value << YAML::Flow << c.sizes;
    out << YAML::Key << "subsystem" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "ratios" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (double x : c.ratios) out << num(x);
    out << YAML::EndSeq;
    out << YAML::Key << "sizes" << YAML::Value << YAML::Flow << c.subsystem_sizes;
    out << YAML::EndMap;
    out << YAML::Key << "window" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "start" << YAML::Value << num(c.window.start);
    out << YAML::Key << "end" << YAML::Value << num(c.window.end);
    out << YAML::Key << "scale" << YAML::Value << std::string(c.window.scale_with_size ? "L" : "1");
    out << YAML::Key << "samples" << YAML::Value << c.window.samples;
    out << YAML::EndMap;
    out << YAML::Key << "metrics" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (auto m : c.metrics) out << std::string(to_string(m));
    out << YAML::EndSeq;
    out << YAML::Key << "quantities" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (auto q : c.quantities) out << std::string(to_string(q));
    out << YAML::EndSeq;
    out << YAML::Key << "reference" << YAML::Value << std::string(to_string(c.reference));
    out << YAML::Key << "beta" << YAML::Value << num(c.beta);
    out << YAML::Key << "realizations" << YAML::Value << c.realizations;
    out << YAML::Key << "first_realization" << YAML::Value << c.first_realization;
    out << YAML::Key << "base_seed" << YAML::Value << c.base_seed;
    out << YAML::Key << "workers" << YAML::Value << c.workers;
    out << YAML::Key << "positions" << YAML::Value << std::string(to_string(c.positions));
    out << YAML::Key << "speed_step" << YAML::Value << num(c.speed_step);
    out << YAML::Key << "random_amplitudes" << YAML::Value
        << std::string(c.complex_random_amplitudes ? "complex" : "real");
    out << YAML::Key << "relative_entropy_cutoff" << YAML::Value << num(c.relative_entropy_cutoff);
    out << YAML::Key << "emit_time_series" << YAML::Value << c.emit_time_series;
    out << YAML::Key << "emit_realizations" << YAML::Value << c.emit_realizations;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace relax
