#pragma once

// JSON instance and result schemas. Instances carry the ambient matrix
// w over X, the subset A, and a named family of matrices over A. The
// loader re-validates everything and rejects asymmetry beyond 1e-12.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "metext/core.hpp"
#include "metext/extensor.hpp"
#include "metext/wd.hpp"

namespace metext {

struct Instance {
  SubsetPair pair;
  MetricFamily metrics;
};

namespace io {

inline Matrix matrix_from_json(const nlohmann::json& j) {
  Matrix m;
  for (const auto& row : j) {
    m.emplace_back();
    for (const auto& v : row) m.back().push_back(v.get<double>());
  }
  return m;
}

inline nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& row : m) j.push_back(row);
  return j;
}

inline void check_symmetry(const Matrix& m, const std::string& what) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i].size() != m.size())
      throw StructuralError(what + ": matrix is not square");
    for (std::size_t j = i + 1; j < m.size(); ++j)
      if (std::abs(m[i][j] - m[j][i]) > 1e-12)
        throw StructuralError(what + ": asymmetry beyond 1e-12 at (" +
                              std::to_string(i) + "," + std::to_string(j) + ")");
  }
}

// Detects the declared mode from the matrix: any zero off-diagonal
// entry makes it a pseudometric.
inline MetricMode detect_mode(const Matrix& m) {
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j)
      if (m[i][j] == 0.0) return MetricMode::Pseudometric;
  return MetricMode::Metric;
}

inline Instance instance_from_json(const nlohmann::json& j) {
  std::vector<std::string> points = j.at("points").get<std::vector<std::string>>();
  Matrix w = matrix_from_json(j.at("w"));
  check_symmetry(w, "w");
  auto space = FiniteMetricSpace::create(points, std::move(w), MetricMode::Metric);

  std::vector<int> subset;
  for (const auto& id : j.at("A")) subset.push_back(space.index_of(id.get<std::string>()));

  Instance inst;
  inst.pair = SubsetPair::create(std::move(space), std::move(subset));
  if (j.contains("metrics")) {
    for (const auto& [name, mat] : j.at("metrics").items()) {
      Matrix d = matrix_from_json(mat);
      check_symmetry(d, "metric '" + name + "'");
      if (static_cast<int>(d.size()) != inst.pair.subset_size())
        throw StructuralError("metric '" + name + "' is not a matrix over A");
      const MetricMode mode = detect_mode(d);
      inst.metrics.add(name, std::move(d), mode);
    }
  }
  return inst;
}

inline nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json j;
  j["points"] = inst.pair.ambient.points;
  nlohmann::json a = nlohmann::json::array();
  for (int idx : inst.pair.subset_indices) a.push_back(inst.pair.ambient.points[idx]);
  j["A"] = a;
  j["w"] = matrix_to_json(inst.pair.ambient.dist);
  nlohmann::json metrics = nlohmann::json::object();
  for (const auto& [name, member] : inst.metrics.members)
    metrics[name] = matrix_to_json(member.dist);
  j["metrics"] = metrics;
  return j;
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open instance file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError("malformed instance file: " + std::string(e.what()));
  }
  return instance_from_json(j);
}

inline nlohmann::json result_to_json(const ExtensionResult& r) {
  nlohmann::json j;
  j["metric"] = r.metric_name;
  j["mode"] = r.mode == ExtensionMode::Exact ? "exact" : "truncated";
  j["S_star"] = r.S_star;
  j["S_used"] = r.S_used;
  j["error_bound"] = r.error_bound;
  j["E"] = matrix_to_json(r.matrix);
  return j;
}

inline nlohmann::json wd_to_json(const WDCollection& wd, const SubsetPair& pair) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& cell : wd.cells) {
    nlohmann::json c;
    nlohmann::json members = nlohmann::json::array();
    nlohmann::json gamma = nlohmann::json::object();
    nlohmann::json sigma = nlohmann::json::object();
    for (int y : cell.members) {
      members.push_back(pair.ambient.points[y]);
      gamma[pair.ambient.points[y]] = cell.gamma[y];
      sigma[pair.ambient.points[y]] = cell.sigma[y];
    }
    c["members"] = members;
    c["center"] = pair.ambient.points[cell.center];
    c["anchor"] = pair.ambient.points[cell.anchor];
    c["shell"] = cell.shell;
    c["gamma"] = gamma;
    c["sigma"] = sigma;
    cells.push_back(c);
  }
  nlohmann::json j;
  j["level"] = wd.level;
  j["cells"] = cells;
  return j;
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw StructuralError("cannot open output file: " + path);
  out << j.dump(2) << "\n";
}

inline std::string canonical_dump(const nlohmann::json& j) { return j.dump(); }

// FNV-1a over the canonical dump; stable across runs and platforms.
inline std::string digest(const nlohmann::json& j) {
  const std::string s = canonical_dump(j);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

}  // namespace io
}  // namespace metext
