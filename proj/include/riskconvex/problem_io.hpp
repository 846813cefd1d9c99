#pragma once

#include "riskconvex/certify.hpp"
#include "riskconvex/distortion.hpp"
#include "riskconvex/measures.hpp"
#include "riskconvex/polyhedral.hpp"
#include "riskconvex/risk.hpp"
#include "riskconvex/stability.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace riskconvex::io {

struct RiskSection {
    std::string functional = "expectation"; // expectation|expected_excess|var|cvar|distortion
    double alpha = 0.5;
    double eta = 0.1;
    std::optional<risk::DistortionFunction> distortion;
};

struct ProblemFile {
    poly::RecourseSpec recourse;
    measures::MeasureModel measure;
    std::optional<measures::DensityCertificate> certificate;
    std::optional<certify::RegionSpec> region;
    RiskSection risk_section;
    std::optional<stability::FirstStageSpec> first_stage;
    risk::RiskConfig integration;
};

/// Parses and validates a problem file; ParseError messages name the offending
/// key path.
ProblemFile load_problem(const std::string& path);
ProblemFile parse_problem(const nlohmann::json& j, const std::string& base_dir = ".");

/// Scenario CSV: one point per row; when weight_column is set the last column
/// carries the weight.
measures::MeasureModel load_scenarios_csv(const std::string& path, bool weight_column = false);

nlohmann::ordered_json geometry_report(const poly::ConeComplex& cx);
nlohmann::ordered_json certification_report_json(const certify::CertificationReport& rep);

std::string format_double(double v); // %.17g, byte-stable

} // namespace riskconvex::io
