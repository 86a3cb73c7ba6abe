#include "crl/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "crl/logging.hpp"

namespace crl {

using nlohmann::json;

SpaceFile load_space_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound(path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw BadConfig("failed to parse " + path + ": " + e.what());
  }
  return parse_space_json(doc);
}

SpaceFile parse_space_json(const json& doc) {
  if (!doc.is_object()) throw BadConfig("space file must be a JSON object");
  if (!doc.contains("points") || !doc["points"].is_array())
    throw BadConfig("space file needs a \"points\" array");
  std::vector<std::string> labels;
  for (const auto& p : doc["points"]) {
    if (p.is_string()) labels.push_back(p.get<std::string>());
    else labels.push_back(p.dump());
  }
  if (!doc.contains("metric") || !doc["metric"].is_object())
    throw BadConfig("space file needs a \"metric\" object");
  const json& metric = doc["metric"];
  std::string type = metric.value("type", "");

  SpaceFile result;
  if (type == "matrix") {
    if (!metric.contains("data") || !metric["data"].is_array())
      throw BadConfig("matrix metric needs \"data\" rows");
    std::vector<std::vector<double>> rows;
    for (const auto& row : metric["data"]) {
      if (!row.is_array()) throw BadConfig("matrix rows must be arrays");
      rows.push_back(row.get<std::vector<double>>());
    }
    if (rows.size() != labels.size())
      throw BadConfig("matrix size does not match the point list");
    auto validation = validate_space(rows, labels);
    if (!validation.ok()) {
      std::string msg = "distance matrix is not a metric:";
      for (const auto& v : validation.violations) msg += " " + v.describe() + ";";
      if (validation.total_violations > validation.violations.size())
        msg += " (+" +
               std::to_string(validation.total_violations - validation.violations.size()) +
               " more)";
      throw ValidationError(validation.violations);
    }
    result.space = validation.space;
  } else if (type == "graph") {
    if (!metric.contains("data") || !metric["data"].is_array())
      throw BadConfig("graph metric needs \"data\" edges");
    std::vector<WeightedEdge> edges;
    for (const auto& e : metric["data"]) {
      if (!e.is_array() || e.size() < 2) throw BadConfig("edges are [a, b, weight?] triples");
      WeightedEdge edge;
      edge.a = e[0].is_string() ? e[0].get<std::string>() : e[0].dump();
      edge.b = e[1].is_string() ? e[1].get<std::string>() : e[1].dump();
      edge.weight = e.size() > 2 ? e[2].get<double>() : 1.0;
      edges.push_back(std::move(edge));
    }
    result.space = graph_metric(edges, labels);
  } else {
    throw BadConfig("metric type must be \"matrix\" or \"graph\"");
  }

  if (doc.contains("kernel")) {
    if (!doc["kernel"].is_array()) throw BadConfig("kernel must be an array of rows");
    std::size_t n = result.space->size();
    if (doc["kernel"].size() != n) throw BadConfig("kernel must have one row per point");
    std::vector<double> rows;
    rows.reserve(n * n);
    for (std::size_t x = 0; x < n; ++x) {
      auto row = doc["kernel"][x].get<std::vector<double>>();
      if (row.size() != n) throw BadConfig("kernel row " + std::to_string(x) + " has wrong size");
      double sum = 0.0;
      for (double w : row) sum += w;
      if (std::abs(sum - 1.0) > tol::kKernelRenorm)
        throw BadConfig("kernel row " + std::to_string(x) + " sums to " + std::to_string(sum) +
                        ", beyond the renormalization threshold");
      if (std::abs(sum - 1.0) > tol::kKernelRowSum) {
        log::warn("kernel row " + std::to_string(x) + " sums to " + std::to_string(sum) +
                  "; renormalizing");
        for (double& w : row) w /= sum;
      }
      rows.insert(rows.end(), row.begin(), row.end());
    }
    result.kernel = RandomWalkKernel(result.space, std::move(rows));
  }

  if (doc.contains("measure")) {
    auto w = doc["measure"].get<std::vector<double>>();
    double sum = 0.0;
    for (double x : w) sum += x;
    if (std::abs(sum - 1.0) > tol::kKernelRenorm)
      throw BadConfig("measure sums to " + std::to_string(sum));
    if (std::abs(sum - 1.0) > tol::kMass)
      for (double& x : w) x /= sum;
    result.measure = DiscreteMeasure(result.space, std::move(w));
  }
  return result;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

json space_to_json(const SpacePtr& space, const std::optional<RandomWalkKernel>& kernel) {
  json doc;
  doc["points"] = space->labels();
  json rows = json::array();
  std::size_t n = space->size();
  for (std::size_t i = 0; i < n; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < n; ++j) row.push_back(space->distance(i, j));
    rows.push_back(std::move(row));
  }
  doc["metric"] = {{"type", "matrix"}, {"data", std::move(rows)}};
  if (kernel) {
    json krows = json::array();
    for (std::size_t i = 0; i < n; ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < n; ++j) row.push_back(kernel->at(i, j));
      krows.push_back(std::move(row));
    }
    doc["kernel"] = std::move(krows);
  }
  return doc;
}

json lifted_space_to_json(const LiftedKernel& kernel) {
  return space_to_json(kernel.space->metric, kernel.as_random_walk_kernel());
}

namespace {

void dump_value(const json& v, std::string& out, int indent, int depth) {
  auto pad = [&](int d) {
    if (indent > 0) out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (v.type()) {
    case json::value_t::number_float:
      out += format_double(v.get<double>());
      break;
    case json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        break;
      }
      bool flat = true;
      for (const auto& e : v)
        if (e.is_structured()) flat = false;
      out += "[";
      bool first = true;
      for (const auto& e : v) {
        if (!first) out += ",";
        if (!flat && indent > 0) {
          out += "\n";
          pad(depth + 1);
        }
        dump_value(e, out, indent, depth + 1);
        first = false;
      }
      if (!flat && indent > 0) {
        out += "\n";
        pad(depth);
      }
      out += "]";
      break;
    }
    case json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        break;
      }
      out += "{";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ",";
        if (indent > 0) {
          out += "\n";
          pad(depth + 1);
        }
        out += json(it.key()).dump();
        out += indent > 0 ? ": " : ":";
        dump_value(it.value(), out, indent, depth + 1);
        first = false;
      }
      if (indent > 0) {
        out += "\n";
        pad(depth);
      }
      out += "}";
      break;
    }
    default:
      out += v.dump();
  }
}

}  // namespace

std::string dump_json(const json& doc, int indent) {
  std::string out;
  dump_value(doc, out, indent, 0);
  out += "\n";
  return out;
}

json curvature_report_to_json(const CurvatureReport& report, const SpacePtr& space) {
  json doc;
  doc["p"] = report.p;
  doc["kappa_inf"] = report.kappa_inf;
  doc["kappa_sup"] = report.kappa_sup;
  doc["argmin_pair"] = {report.argmin_pair.first, report.argmin_pair.second};
  if (space) doc["argmin_labels"] = {space->label(report.argmin_pair.first),
                                     space->label(report.argmin_pair.second)};
  json rows = json::array();
  for (std::size_t i = 0; i < report.n; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < report.n; ++j) {
      double k = report.at(i, j);
      if (std::isnan(k)) row.push_back(nullptr);
      else row.push_back(k);
    }
    rows.push_back(std::move(row));
  }
  doc["kappa_matrix"] = std::move(rows);
  return doc;
}

std::string curvature_report_to_csv(const CurvatureReport& report, const SpacePtr& space) {
  std::ostringstream os;
  os << "x,y,d,wp,kappa\n";
  for (std::size_t i = 0; i < report.n; ++i)
    for (std::size_t j = i + 1; j < report.n; ++j) {
      double d = space->distance(i, j);
      double k = report.at(i, j);
      double w = (1.0 - k) * d;
      os << space->label(i) << "," << space->label(j) << "," << format_double(d) << ","
         << format_double(w) << "," << format_double(k) << "\n";
    }
  return os.str();
}

json rate_trace_to_json(const RateTrace& trace) {
  json doc;
  doc["p"] = trace.p;
  doc["rate_bound"] = trace.rate_bound;
  doc["diameter"] = trace.diameter;
  doc["initial"] = trace.initial;
  doc["within_envelope"] = trace.within_envelope;
  json steps = json::array();
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    json row;
    row["t"] = trace.steps[i].first;
    row["value"] = trace.steps[i].second;
    row["bound"] = trace.envelope(trace.steps[i].first);
    if (i < trace.sup_ratio.size()) row["sup_ratio"] = trace.sup_ratio[i];
    steps.push_back(std::move(row));
  }
  doc["steps"] = std::move(steps);
  return doc;
}

std::string rate_trace_to_csv(const RateTrace& trace) {
  std::ostringstream os;
  os << "t,value,bound\n";
  for (const auto& [t, value] : trace.steps)
    os << t << "," << format_double(value) << "," << format_double(trace.envelope(t)) << "\n";
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << content;
}

}  // namespace crl
