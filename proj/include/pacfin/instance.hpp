#pragma once

// Instance documents: a single JSON object holding the chart ranks, the
// nonlinear connection, the structure tensors (as expression strings in the
// chart variables), the sample block, and the tolerance. Strict schema:
// unknown fields are rejected, every shape is validated, and every error
// carries the path into the document.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "structure.hpp"

namespace pacfin {

struct InstanceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InstanceSpec {
    int version = 1;
    int k1 = 0, k2 = 0;
    std::vector<std::vector<std::string>> nonlinear_connection;  // n x m
    std::vector<std::vector<std::string>> metric_g, metric_h;    // n x n, m x m
    std::vector<std::vector<std::string>> phi_h, phi_v;          // n x n, m x m
    std::vector<std::string> eta_h, eta_v, xi_h, xi_v;           // n, m, n, m
    int sample_count = 64;
    std::uint64_t seed = 1;
    SampleBox box;
    double tolerance = 1e-8;

    Chart chart() const { return Chart{k1, k2}; }
};

namespace detail {

using nlohmann::json;

inline void require_keys(const json& obj, const std::vector<std::string>& keys,
                         const std::string& path) {
    for (const auto& k : keys)
        if (!obj.contains(k)) throw InstanceError(path + ": missing field '" + k + "'");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const auto& k : keys) known = known || it.key() == k;
        if (!known) throw InstanceError(path + ": unknown field '" + it.key() + "'");
    }
}

inline std::vector<std::vector<std::string>> string_matrix(const json& j, const std::string& name,
                                                           int rows, int cols) {
    if (!j.is_array() || int(j.size()) != rows)
        throw InstanceError(name + ": expected " + std::to_string(rows) + " rows");
    std::vector<std::vector<std::string>> out;
    for (int r = 0; r < rows; ++r) {
        const json& row = j[std::size_t(r)];
        if (!row.is_array() || int(row.size()) != cols)
            throw InstanceError(name + "[" + std::to_string(r) + "]: expected " +
                                std::to_string(cols) + " entries");
        std::vector<std::string> v;
        for (int c = 0; c < cols; ++c) {
            const json& cell = row[std::size_t(c)];
            if (!cell.is_string())
                throw InstanceError(name + "[" + std::to_string(r) + "][" + std::to_string(c) +
                                    "]: expected an expression string");
            v.push_back(cell.get<std::string>());
        }
        out.push_back(std::move(v));
    }
    return out;
}

inline std::vector<std::string> string_vector(const json& j, const std::string& name, int len) {
    if (!j.is_array() || int(j.size()) != len)
        throw InstanceError(name + ": expected " + std::to_string(len) + " entries");
    std::vector<std::string> out;
    for (int i = 0; i < len; ++i) {
        const json& cell = j[std::size_t(i)];
        if (!cell.is_string())
            throw InstanceError(name + "[" + std::to_string(i) + "]: expected an expression string");
        out.push_back(cell.get<std::string>());
    }
    return out;
}

inline std::vector<std::array<double, 2>> range_list(const json& j, const std::string& name,
                                                     int len) {
    if (!j.is_array() || int(j.size()) != len)
        throw InstanceError(name + ": expected " + std::to_string(len) + " ranges");
    std::vector<std::array<double, 2>> out;
    for (int i = 0; i < len; ++i) {
        const json& r = j[std::size_t(i)];
        if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number())
            throw InstanceError(name + "[" + std::to_string(i) + "]: expected [lo, hi]");
        double lo = r[0].get<double>(), hi = r[1].get<double>();
        if (!(lo < hi)) throw InstanceError(name + "[" + std::to_string(i) + "]: lo must be < hi");
        out.push_back({lo, hi});
    }
    return out;
}

}  // namespace detail

inline InstanceSpec parse_instance_spec(const nlohmann::json& j) {
    using detail::json;
    if (!j.is_object()) throw InstanceError("document root must be an object");
    detail::require_keys(j, {"version", "k1", "k2", "nonlinear_connection", "metric_g", "metric_h",
                             "phi_h", "phi_v", "eta_h", "eta_v", "xi_h", "xi_v", "samples",
                             "tolerance"},
                         "root");
    InstanceSpec s;
    if (!j["version"].is_number_integer() || j["version"].get<int>() != 1)
        throw InstanceError("version: only version 1 is supported");
    if (!j["k1"].is_number_integer() || !j["k2"].is_number_integer())
        throw InstanceError("k1/k2: expected integers");
    s.k1 = j["k1"].get<int>();
    s.k2 = j["k2"].get<int>();
    if (s.k1 < 0 || s.k2 < 0) throw InstanceError("k1/k2: must be nonnegative");
    const int n = 2 * s.k1 + 1, m = 2 * s.k2 + 1;
    s.nonlinear_connection = detail::string_matrix(j["nonlinear_connection"], "nonlinear_connection", n, m);
    s.metric_g = detail::string_matrix(j["metric_g"], "metric_g", n, n);
    s.metric_h = detail::string_matrix(j["metric_h"], "metric_h", m, m);
    s.phi_h = detail::string_matrix(j["phi_h"], "phi_h", n, n);
    s.phi_v = detail::string_matrix(j["phi_v"], "phi_v", m, m);
    s.eta_h = detail::string_vector(j["eta_h"], "eta_h", n);
    s.eta_v = detail::string_vector(j["eta_v"], "eta_v", m);
    s.xi_h = detail::string_vector(j["xi_h"], "xi_h", n);
    s.xi_v = detail::string_vector(j["xi_v"], "xi_v", m);

    const json& samples = j["samples"];
    if (!samples.is_object()) throw InstanceError("samples: expected an object");
    detail::require_keys(samples, {"count", "seed", "box"}, "samples");
    if (!samples["count"].is_number_integer() || samples["count"].get<int>() < 1)
        throw InstanceError("samples.count: expected an integer >= 1");
    s.sample_count = samples["count"].get<int>();
    if (!samples["seed"].is_number_unsigned() && !samples["seed"].is_number_integer())
        throw InstanceError("samples.seed: expected an integer");
    s.seed = samples["seed"].get<std::uint64_t>();
    const json& box = samples["box"];
    if (!box.is_object()) throw InstanceError("samples.box: expected an object");
    detail::require_keys(box, {"x", "y"}, "samples.box");
    s.box.x = detail::range_list(box["x"], "samples.box.x", n);
    s.box.y = detail::range_list(box["y"], "samples.box.y", m);

    if (!j["tolerance"].is_number() || j["tolerance"].get<double>() <= 0)
        throw InstanceError("tolerance: expected a positive number");
    s.tolerance = j["tolerance"].get<double>();
    return s;
}

inline InstanceSpec load_instance_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InstanceError("cannot open instance file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InstanceError(path + ": " + e.what());
    }
    return parse_instance_spec(j);
}

// Parses every expression string against the chart and assembles the
// structure. Parse failures carry the document path of the offending cell.
inline PacStructure build_structure(const InstanceSpec& spec) {
    Chart chart = spec.chart();
    chart.validate();
    const int n = chart.n(), m = chart.m();

    auto parse_cell = [&](const std::string& text, const std::string& where) {
        try {
            return parse(text, n, m);
        } catch (const ParseError& e) {
            throw InstanceError(where + ": " + e.what());
        }
    };
    auto parse_matrix = [&](const std::vector<std::vector<std::string>>& src,
                            const std::string& name) {
        ExprMat out = expr_zeros(int(src.size()), int(src[0].size()));
        for (std::size_t r = 0; r < src.size(); ++r)
            for (std::size_t c = 0; c < src[r].size(); ++c)
                out[r][c] = parse_cell(src[r][c], name + "[" + std::to_string(r) + "][" +
                                                      std::to_string(c) + "]");
        return out;
    };
    auto parse_vector = [&](const std::vector<std::string>& src, const std::string& name) {
        std::vector<Expr> out;
        for (std::size_t i = 0; i < src.size(); ++i)
            out.push_back(parse_cell(src[i], name + "[" + std::to_string(i) + "]"));
        return out;
    };

    PacStructure S;
    S.bundle.chart = chart;
    S.bundle.nc.N = parse_matrix(spec.nonlinear_connection, "nonlinear_connection");
    S.metric.g = parse_matrix(spec.metric_g, "metric_g");
    S.metric.h = parse_matrix(spec.metric_h, "metric_h");
    S.phi_h = parse_matrix(spec.phi_h, "phi_h");
    S.phi_v = parse_matrix(spec.phi_v, "phi_v");
    S.eta.h = parse_vector(spec.eta_h, "eta_h");
    S.eta.v = parse_vector(spec.eta_v, "eta_v");
    S.xi.h = parse_vector(spec.xi_h, "xi_h");
    S.xi.v = parse_vector(spec.xi_v, "xi_v");
    return S;
}

}  // namespace pacfin
