#include "crl/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace crl {

namespace {

constexpr std::size_t kMaxReportedViolations = 100;

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = "p" + std::to_string(i);
  return labels;
}

void scan_violations(const std::vector<double>& d, std::size_t n, double tolerance,
                     std::vector<MetricViolation>& out, std::size_t& total) {
  auto push = [&](MetricViolation v) {
    ++total;
    if (out.size() < kMaxReportedViolations) out.push_back(v);
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double x = d[i * n + j];
      if (!std::isfinite(x)) {
        push({MetricViolation::Kind::NonFinite, i, j, MetricViolation::npos, x, 0.0});
        return;  // everything downstream would be noise
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i * n + i] != 0.0) {
      auto kind = d[i * n + i] < 0.0 ? MetricViolation::Kind::NegativeDistance
                                     : MetricViolation::Kind::NonZeroDiagonal;
      push({kind, i, i, MetricViolation::npos, d[i * n + i], 0.0});
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double dij = d[i * n + j];
      if (dij < 0.0)
        push({MetricViolation::Kind::NegativeDistance, i, j, MetricViolation::npos, dij, 0.0});
      else if (dij == 0.0)
        push({MetricViolation::Kind::ZeroOffDiagonal, i, j, MetricViolation::npos, dij, 0.0});
      if (j > i && std::abs(dij - d[j * n + i]) > tolerance)
        push({MetricViolation::Kind::NonSymmetric, i, j, MetricViolation::npos, dij,
              d[j * n + i]});
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        double lhs = d[i * n + j];
        double rhs = d[i * n + k] + d[k * n + j];
        if (lhs > rhs + tolerance)
          push({MetricViolation::Kind::TriangleViolation, i, j, k, lhs, rhs});
      }
    }
  }
}

}  // namespace

std::string MetricViolation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::NotSquare:
      os << "NotSquare: row " << i << " has " << lhs << " entries, expected " << rhs;
      break;
    case Kind::NonFinite:
      os << "NonFinite(" << i << "," << j << ")";
      break;
    case Kind::NonZeroDiagonal:
      os << "NonZeroDiagonal(" << i << "): " << lhs;
      break;
    case Kind::NegativeDistance:
      os << "NegativeDistance(" << i << "," << j << "): " << lhs;
      break;
    case Kind::ZeroOffDiagonal:
      os << "ZeroOffDiagonal(" << i << "," << j << ")";
      break;
    case Kind::NonSymmetric:
      os << "NonSymmetric(" << i << "," << j << "): " << lhs << " vs " << rhs;
      break;
    case Kind::TriangleViolation:
      os << "TriangleViolation(" << i << "," << j << "," << k << "): " << lhs << " > " << rhs;
      break;
  }
  return os.str();
}

ValidationError::ValidationError(std::vector<MetricViolation> violations)
    : Error([&violations] {
        std::string msg = "metric validation failed:";
        for (const auto& v : violations) msg += " " + v.describe() + ";";
        return msg;
      }()),
      violations_(std::move(violations)) {}

FiniteMetricSpace::FiniteMetricSpace(std::vector<double> d, std::vector<std::string> labels,
                                     std::size_t n)
    : n_(n), d_(std::move(d)), labels_(std::move(labels)) {
  for (double x : d_) diameter_ = std::max(diameter_, x);
}

bool FiniteMetricSpace::same_as(const FiniteMetricSpace& other) const {
  if (this == &other) return true;
  return n_ == other.n_ && d_ == other.d_ && labels_ == other.labels_;
}

SpacePtr FiniteMetricSpace::create(std::vector<double> row_major,
                                   std::vector<std::string> labels, double tolerance) {
  std::size_t n = 0;
  while (n * n < row_major.size()) ++n;
  if (n * n != row_major.size() || n == 0)
    throw ValidationError({{MetricViolation::Kind::NotSquare, 0, MetricViolation::npos,
                            MetricViolation::npos, static_cast<double>(row_major.size()), 0.0}});
  if (labels.empty()) labels = default_labels(n);
  if (labels.size() != n) throw BadConfig("label count does not match matrix size");
  std::vector<MetricViolation> violations;
  std::size_t total = 0;
  scan_violations(row_major, n, tolerance, violations, total);
  if (total != 0) throw ValidationError(std::move(violations));
  return SpacePtr(new FiniteMetricSpace(std::move(row_major), std::move(labels), n));
}

SpaceValidation validate_space(const std::vector<std::vector<double>>& matrix,
                               std::vector<std::string> labels, double tolerance) {
  std::size_t n = matrix.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (matrix[i].size() != n) {
      SpaceValidation bad;
      bad.violations.push_back({MetricViolation::Kind::NotSquare, i, MetricViolation::npos,
                                MetricViolation::npos, static_cast<double>(matrix[i].size()),
                                static_cast<double>(n)});
      bad.total_violations = 1;
      return bad;
    }
  }
  std::vector<double> flat;
  flat.reserve(n * n);
  for (const auto& row : matrix) flat.insert(flat.end(), row.begin(), row.end());
  return validate_space_flat(flat, n, std::move(labels), tolerance);
}

SpaceValidation validate_space_flat(const std::vector<double>& row_major, std::size_t n,
                                    std::vector<std::string> labels, double tolerance) {
  SpaceValidation result;
  if (row_major.size() != n * n || n == 0) {
    result.violations.push_back({MetricViolation::Kind::NotSquare, 0, MetricViolation::npos,
                                 MetricViolation::npos, static_cast<double>(row_major.size()),
                                 static_cast<double>(n * n)});
    result.total_violations = 1;
    return result;
  }
  scan_violations(row_major, n, tolerance, result.violations, result.total_violations);
  if (result.total_violations == 0) {
    if (labels.empty()) labels = default_labels(n);
    result.space = SpacePtr(new FiniteMetricSpace(row_major, std::move(labels), n));
  }
  return result;
}

DisconnectedGraph::DisconnectedGraph(std::vector<std::vector<std::string>> comps)
    : Error([&comps] {
        std::string msg = "graph is disconnected; components:";
        for (const auto& c : comps) {
          msg += " {";
          for (std::size_t i = 0; i < c.size(); ++i) msg += (i ? "," : "") + c[i];
          msg += "}";
        }
        return msg;
      }()),
      components_(std::move(comps)) {}

SpacePtr graph_metric(const std::vector<WeightedEdge>& edges, std::vector<std::string> labels) {
  std::map<std::string, std::size_t> index;
  auto intern = [&](const std::string& name) -> std::size_t {
    auto it = index.find(name);
    if (it != index.end()) return it->second;
    if (!labels.empty() && index.size() >= labels.size())
      throw BadConfig("edge endpoint '" + name + "' not in the declared point list");
    std::size_t id = index.size();
    index.emplace(name, id);
    return id;
  };
  std::vector<std::string> order;
  if (!labels.empty()) {
    for (const auto& l : labels) {
      if (index.count(l)) throw BadConfig("duplicate point label '" + l + "'");
      index.emplace(l, index.size());
    }
    order = labels;
  }
  for (const auto& e : edges) {
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw BadConfig("edge (" + e.a + "," + e.b + ") must have a positive finite weight");
    if (e.a == e.b) throw BadConfig("self-loop at '" + e.a + "'");
    std::size_t ia = intern(e.a);
    std::size_t ib = intern(e.b);
    if (order.size() <= std::max(ia, ib)) order.resize(index.size());
    if (labels.empty()) {
      order[ia] = e.a;
      order[ib] = e.b;
    }
  }
  std::size_t n = index.size();
  if (n == 0) throw BadConfig("empty edge list");

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> d(n * n, inf);
  for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 0.0;
  for (const auto& e : edges) {
    std::size_t ia = index[e.a];
    std::size_t ib = index[e.b];
    d[ia * n + ib] = std::min(d[ia * n + ib], e.weight);
    d[ib * n + ia] = std::min(d[ib * n + ia], e.weight);
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      double dik = d[i * n + k];
      if (dik == inf) continue;
      for (std::size_t j = 0; j < n; ++j) {
        double cand = dik + d[k * n + j];
        if (cand < d[i * n + j]) d[i * n + j] = cand;
      }
    }

  bool connected = std::all_of(d.begin(), d.end(), [](double x) { return std::isfinite(x); });
  if (!connected) {
    std::vector<std::size_t> comp(n, MetricViolation::npos);
    std::size_t ncomp = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (comp[i] != MetricViolation::npos) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (std::isfinite(d[i * n + j])) comp[j] = ncomp;
      ++ncomp;
    }
    std::vector<std::vector<std::string>> groups(ncomp);
    for (std::size_t i = 0; i < n; ++i) groups[comp[i]].push_back(order[i]);
    throw DisconnectedGraph(std::move(groups));
  }
  return FiniteMetricSpace::create(std::move(d), std::move(order), tol::kInternalMetric);
}

SpacePtr scale_space(const SpacePtr& space, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw BadConfig("scale factor must be positive and finite");
  std::vector<double> d = space->matrix();
  for (auto& x : d) x *= factor;
  return FiniteMetricSpace::create(std::move(d), space->labels(), tol::kInternalMetric);
}

bool same_space(const SpacePtr& a, const SpacePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->same_as(*b);
}

}  // namespace crl
