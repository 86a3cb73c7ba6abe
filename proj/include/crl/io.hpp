#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "crl/curvature.hpp"
#include "crl/dynamics.hpp"
#include "crl/lifting.hpp"
#include "crl/measure.hpp"

namespace crl {

struct SpaceFile {
  SpacePtr space;
  std::optional<RandomWalkKernel> kernel;
  std::optional<DiscreteMeasure> measure;  // optional "measure" entry
};

// Space file schema:
//   {"points": [...], "metric": {"type": "matrix"|"graph", "data": ...},
//    "kernel": [[...]], "measure": [...]}
// Kernel rows must sum to 1 +- 1e-9; rows off by at most 1e-6 are
// renormalized with a warning.
SpaceFile load_space_file(const std::string& path);
SpaceFile parse_space_json(const nlohmann::json& doc);

// A lifted space in the same schema (matrix metric, weight-vector labels,
// lifted kernel rows), so it can be fed back into any command.
nlohmann::json lifted_space_to_json(const LiftedKernel& kernel);

nlohmann::json space_to_json(const SpacePtr& space,
                             const std::optional<RandomWalkKernel>& kernel);

// Serializes with every float printed at 17 significant digits, so equal
// inputs give byte-identical reports. NaN becomes null.
std::string dump_json(const nlohmann::json& doc, int indent = 2);

std::string format_double(double x);

nlohmann::json curvature_report_to_json(const CurvatureReport& report, const SpacePtr& space);
std::string curvature_report_to_csv(const CurvatureReport& report, const SpacePtr& space);

nlohmann::json rate_trace_to_json(const RateTrace& trace);
std::string rate_trace_to_csv(const RateTrace& trace);

void write_file(const std::string& path, const std::string& content);

}  // namespace crl
