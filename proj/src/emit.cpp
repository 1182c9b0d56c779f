// emit.cpp - CSV / JSON writers and the CSV reader used by tests

#include "relax/emit.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include "json.hpp"
#include <sstream>

#include "relax/errors.hpp"

namespace relax {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

namespace {

std::string optional_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

nlohmann::json json_number(double v) {
    if (!std::isfinite(v)) return format_double(v);  // JSON has no inf / nan
    return v;
}

nlohmann::json json_optional(const std::optional<double>& v) {
    if (!v) return nullptr;
    return json_number(*v);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s) {
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw IoError("bad number '" + s + "' in CSV");
    return v;
}

int parse_int(const std::string& s) {
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw IoError("bad integer '" + s + "' in CSV");
    return v;
}

}  // namespace

std::string to_csv(const SweepResult& result) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& r : result.rows) {
        out += r.scenario + ',' + std::to_string(r.num_sites) + ',' + std::to_string(r.block_size) + ',' +
               format_double(r.x) + ',' + r.t_or_window + ',' + r.metric + ',' + format_double(r.value) + ',' +
               optional_field(r.value_normalized) + ',' + optional_field(r.standard_error) + ',' + r.seed + '\n';
    }
    return out;
}

std::string to_json(const SweepResult& result) {
    const auto& c = result.config;
    nlohmann::json doc;
    nlohmann::json config;
    config["scenario"] = std::string(to_string(c.scenario));
    config["sizes"] = c.sizes;
    config["base_seed"] = c.base_seed;
    config["realizations"] = c.realizations;
    config["yaml"] = to_yaml(c);
    doc["config"] = config;
    doc["regularized"] = result.regularized;
    doc["columns"] = split(std::string(kCsvHeader));
    auto rows = nlohmann::json::array();
    for (const auto& r : result.rows) {
        rows.push_back({{"scenario", r.scenario},
                        {"L", r.num_sites},
                        {"L_A", r.block_size},
                        {"x", json_number(r.x)},
                        {"t_or_window", r.t_or_window},
                        {"metric", r.metric},
                        {"value", json_number(r.value)},
                        {"value_normalized", json_optional(r.value_normalized)},
                        {"stderr", json_optional(r.standard_error)},
                        {"seed", r.seed}});
    }
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

std::filesystem::path write_result(const SweepResult& result, const std::filesystem::path& dir, OutputFormat format) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    const auto path =
        dir / (std::string(to_string(result.config.scenario)) + (format == OutputFormat::Csv ? ".csv" : ".json"));
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << (format == OutputFormat::Csv ? to_csv(result) : to_json(result));
    out.flush();
    if (!out) throw IoError("write to " + path.string() + " failed");
    return path;
}

std::vector<ResultRow> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw IoError("CSV header mismatch");
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != 10) throw IoError("CSV row with " + std::to_string(f.size()) + " fields: " + line);
        ResultRow r;
        r.scenario = f[0];
        r.num_sites = parse_int(f[1]);
        r.block_size = parse_int(f[2]);
        r.x = parse_double(f[3]);
        r.t_or_window = f[4];
        r.metric = f[5];
        r.value = parse_double(f[6]);
        if (!f[7].empty()) r.value_normalized = parse_double(f[7]);
        if (!f[8].empty()) r.standard_error = parse_double(f[8]);
        r.seed = f[9];
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace relax
