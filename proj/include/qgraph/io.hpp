#pragma once

// Graph documents (JSON) and CSV result tables.
//
// Graph document:
//   {
//     "edges":      [{"length": 1.0}, {"length": 1.0}],
//     "vertices":   [[1, 2, 3, 4]],
//     "conditions": {"builtin": "figure8_theta"}
//                or {"matrices": [ [[[re, im], ...], ...], ... ]}   one matrix per vertex
//   }

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qgraph/error.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/vertex.hpp"

namespace qgraph {

struct GraphDocument {
  std::vector<double> lengths;
  EndpointPartition vertices;
  /// Empty when the builtin figure-eight family is used.
  std::vector<CMatrix> matrices;
  bool builtin_figure8 = false;

  MetricGraph graph() const {
    std::vector<EdgeGeom> edges;
    for (double l : lengths) edges.push_back({l});
    return MetricGraph::create(std::move(edges), vertices);
  }

  /// Builtin documents give the S_theta family, matrix documents a constant one.
  ConditionFamily family() const {
    if (builtin_figure8) return family_figure_eight();
    std::vector<VertexUnitary> conditions;
    for (const auto& m : matrices) conditions.push_back(VertexUnitary::from_matrix(m));
    return constant_family(std::move(conditions));
  }

  friend bool operator==(const GraphDocument& a, const GraphDocument& b) {
    if (a.builtin_figure8 != b.builtin_figure8 || a.lengths != b.lengths || a.vertices != b.vertices) return false;
    if (a.matrices.size() != b.matrices.size()) return false;
    for (std::size_t i = 0; i < a.matrices.size(); ++i) {
      if (a.matrices[i].rows() != b.matrices[i].rows() || a.matrices[i].cols() != b.matrices[i].cols() ||
          a.matrices[i] != b.matrices[i]) {
        return false;
      }
    }
    return true;
  }
};

inline GraphDocument figure_eight_document(double l1, double l2) {
  GraphDocument d;
  d.lengths = {l1, l2};
  d.vertices = {{1, 2, 3, 4}};
  d.builtin_figure8 = true;
  return d;
}

namespace detail {

[[noreturn]] inline void field_error(const std::string& field, const std::string& what) {
  throw Error(Errc::parse_error, "field " + field + ": " + what);
}

inline double number_at(const nlohmann::json& j, const std::string& field) {
  if (!j.is_number()) field_error(field, "expected a number");
  return j.get<double>();
}

inline CMatrix matrix_at(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) field_error(field, "expected a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  CMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    const std::string rf = field + "/" + std::to_string(r);
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) field_error(rf, "expected a row of length " + std::to_string(n));
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto& e = row[static_cast<std::size_t>(c)];
      const std::string ef = rf + "/" + std::to_string(c);
      if (!e.is_array() || e.size() != 2) field_error(ef, "expected [re, im]");
      m(r, c) = cplx(number_at(e[0], ef + "/0"), number_at(e[1], ef + "/1"));
    }
  }
  return m;
}

}  // namespace detail

/// Parses and validates a graph document; all problems surface as parse-error.
inline GraphDocument parse_graph_document(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::parse_error, e.what());
  }
  if (!j.is_object()) detail::field_error("/", "expected an object");

  GraphDocument d;
  if (!j.contains("edges") || !j["edges"].is_array()) detail::field_error("/edges", "expected an array");
  for (std::size_t i = 0; i < j["edges"].size(); ++i) {
    const auto& e = j["edges"][i];
    const std::string f = "/edges/" + std::to_string(i);
    if (!e.is_object() || !e.contains("length")) detail::field_error(f, "expected {\"length\": value}");
    d.lengths.push_back(detail::number_at(e["length"], f + "/length"));
  }

  if (!j.contains("vertices") || !j["vertices"].is_array()) detail::field_error("/vertices", "expected an array");
  for (std::size_t v = 0; v < j["vertices"].size(); ++v) {
    const auto& list = j["vertices"][v];
    const std::string f = "/vertices/" + std::to_string(v);
    if (!list.is_array()) detail::field_error(f, "expected an array of endpoint indices");
    std::vector<int> ends;
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (!list[i].is_number_integer()) detail::field_error(f + "/" + std::to_string(i), "expected an integer");
      ends.push_back(list[i].get<int>());
    }
    d.vertices.push_back(std::move(ends));
  }

  if (!j.contains("conditions") || !j["conditions"].is_object()) {
    detail::field_error("/conditions", "expected an object");
  }
  const auto& cond = j["conditions"];
  if (cond.contains("builtin")) {
    if (!cond["builtin"].is_string() || cond["builtin"].get<std::string>() != "figure8_theta") {
      detail::field_error("/conditions/builtin", "only \"figure8_theta\" is known");
    }
    d.builtin_figure8 = true;
  } else if (cond.contains("matrices")) {
    if (!cond["matrices"].is_array()) detail::field_error("/conditions/matrices", "expected an array");
    for (std::size_t v = 0; v < cond["matrices"].size(); ++v) {
      d.matrices.push_back(detail::matrix_at(cond["matrices"][v], "/conditions/matrices/" + std::to_string(v)));
    }
  } else {
    detail::field_error("/conditions", "expected \"builtin\" or \"matrices\"");
  }

  // enforce the model invariants now rather than at first use
  try {
    const MetricGraph g = d.graph();
    if (d.builtin_figure8) {
      if (g.edge_count() != 2 || g.vertices() != EndpointPartition{{1, 2, 3, 4}}) {
        detail::field_error("/vertices", "figure8_theta needs two edges and the single vertex [1, 2, 3, 4]");
      }
    } else {
      if (static_cast<int>(d.matrices.size()) != g.vertex_count()) {
        detail::field_error("/conditions/matrices", "one matrix per vertex required");
      }
      for (std::size_t v = 0; v < d.matrices.size(); ++v) {
        if (d.matrices[v].rows() != static_cast<Eigen::Index>(g.vertices()[v].size())) {
          detail::field_error("/conditions/matrices/" + std::to_string(v), "size differs from the vertex degree");
        }
        (void)VertexUnitary::from_matrix(d.matrices[v]);
      }
    }
  } catch (const Error& e) {
    if (e.code() == Errc::parse_error) throw;
    throw Error(Errc::parse_error, e.what());
  }
  return d;
}

inline GraphDocument load_graph_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::parse_error, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_graph_document(buf.str());
}

inline std::string to_json_text(const GraphDocument& d) {
  nlohmann::json j;
  j["edges"] = nlohmann::json::array();
  for (double l : d.lengths) j["edges"].push_back({{"length", l}});
  j["vertices"] = d.vertices;
  if (d.builtin_figure8) {
    j["conditions"] = {{"builtin", "figure8_theta"}};
  } else {
    auto mats = nlohmann::json::array();
    for (const auto& m : d.matrices) {
      auto rows = nlohmann::json::array();
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        auto row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(std::move(row));
      }
      mats.push_back(std::move(rows));
    }
    j["conditions"] = {{"matrices", std::move(mats)}};
  }
  return j.dump(2) + "\n";
}

/// Radians, or one of the exact tokens pi/2, pi, 3pi/2, 2pi.
inline double parse_angle(std::string_view text) {
  if (text == "pi/2") return 0.5 * kPi;
  if (text == "pi") return kPi;
  if (text == "3pi/2") return 1.5 * kPi;
  if (text == "2pi") return 2.0 * kPi;
  const std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) {
    throw Error(Errc::usage_error, "cannot read angle '" + s + "'");
  }
  return v;
}

/// Fixed-precision number (15 significant digits, no negative zero).
inline std::string format_number(double v) {
  if (v == 0.0) v = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

class ResultTable {
 public:
  explicit ResultTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(std::vector<double> row) {
    if (row.size() != columns_.size()) throw Error(Errc::domain_error, "row width differs from the header");
    for (double v : row) {
      if (!std::isfinite(v)) throw Error(Errc::domain_error, "non-finite value in result table");
    }
    rows_.push_back(std::move(row));
  }

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }

  std::string to_csv() const {
    std::string out;
    for (std::size_t c = 0; c < columns_.size(); ++c) out += (c ? "," : "") + columns_[c];
    out += '\n';
    for (const auto& row : rows_) {
      for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + format_number(row[c]);
      out += '\n';
    }
    return out;
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

/// Writes through a temporary sibling file and renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::usage_error, "cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error(Errc::usage_error, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace qgraph
