#pragma once

// JSON ingestion for spaces, measures and families.
//
// Schema (schema_version 1):
//   space   {"weights": [..]}
//   measure {"density": [..]}
//   family  {"type": "exponential" | "balanced_linear",
//            "statistics": [[..], ..],
//            "domain": {"lo": [..], "hi": [..]}}

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "igeo/errors.hpp"
#include "igeo/measure_core.hpp"
#include "igeo/submanifolds.hpp"

namespace igeo {

using Json = nlohmann::json;

inline Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const Json::exception& e) {
        throw ConfigError("invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

inline Vec parse_number_array(const Json& j, const std::string& what) {
    if (!j.is_array()) throw ConfigError(what + " must be an array of numbers");
    Vec out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number()) throw ConfigError(what + " must contain only numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

inline SampleSpace parse_space(const Json& j) {
    if (!j.is_object() || !j.contains("weights")) throw ConfigError("space needs a \"weights\" array");
    try {
        return SampleSpace(parse_number_array(j.at("weights"), "space.weights"));
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid space: ") + e.what());
    }
}

inline FiniteMeasure parse_measure(const Json& j, const SampleSpace& space) {
    if (!j.is_object() || !j.contains("density")) throw ConfigError("measure needs a \"density\" array");
    try {
        return FiniteMeasure(space, parse_number_array(j.at("density"), "measure.density"));
    } catch (const Error& e) {
        throw ConfigError(std::string("invalid measure: ") + e.what());
    }
}

inline DomainBox parse_domain(const Json& j, int dim) {
    if (!j.is_object() || !j.contains("lo") || !j.contains("hi"))
        throw ConfigError("domain needs \"lo\" and \"hi\" arrays");
    const Vec lo = parse_number_array(j.at("lo"), "domain.lo");
    const Vec hi = parse_number_array(j.at("hi"), "domain.hi");
    if (static_cast<int>(lo.size()) != dim || static_cast<int>(hi.size()) != dim)
        throw ConfigError("domain arrays must have one entry per parameter");
    DomainBox box;
    box.lo = Eigen::Map<const Eigen::VectorXd>(lo.data(), dim);
    box.hi = Eigen::Map<const Eigen::VectorXd>(hi.data(), dim);
    for (int i = 0; i < dim; ++i)
        if (!(box.lo[i] <= box.hi[i])) throw ConfigError("domain lo must not exceed hi");
    return box;
}

struct FamilyHandle {
    std::string type;
    ParametricFamily family;
    std::optional<ExponentialFamily> exponential;
};

inline FamilyHandle parse_family(const Json& j, const SampleSpace& space) {
    if (!j.is_object() || !j.contains("type")) throw ConfigError("family needs a \"type\" field");
    const std::string type = j.at("type").get<std::string>();
    if (!j.contains("statistics") || !j.at("statistics").is_array() || j.at("statistics").empty())
        throw ConfigError("family needs a non-empty \"statistics\" array of arrays");

    std::vector<Vec> stats;
    for (const auto& row : j.at("statistics")) stats.push_back(parse_number_array(row, "family.statistics"));
    const int dim = static_cast<int>(stats.size());
    if (!j.contains("domain")) throw ConfigError("family needs a \"domain\" object");
    DomainBox box = parse_domain(j.at("domain"), dim);

    try {
        if (type == "exponential") {
            ExponentialFamily ef = expfam_build(space, std::move(stats), std::move(box));
            ParametricFamily family = ef.family;
            return FamilyHandle{type, std::move(family), std::move(ef)};
        }
        if (type == "balanced_linear") {
            return FamilyHandle{type, balanced_linear_build(space, std::move(stats), std::move(box)), std::nullopt};
        }
    } catch (const Error& e) {
        throw ConfigError(std::string("invalid family: ") + e.what());
    }
    throw ConfigError("unknown family type: " + type);
}

inline void require_schema_version(const Json& config) {
    if (!config.is_object() || !config.contains("schema_version"))
        throw ConfigError("config needs \"schema_version\"");
    if (!config.at("schema_version").is_number_integer() || config.at("schema_version").get<int>() != 1)
        throw ConfigError("unsupported schema_version; expected 1");
}

} // namespace igeo
