#pragma once

#include <Eigen/Core>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "elasso/dual.hpp"
#include "elasso/errors.hpp"
#include "elasso/path.hpp"
#include "elasso/selection.hpp"
#include "elasso/spectrum.hpp"

namespace elasso {

using json = nlohmann::ordered_json;

namespace detail {

inline bool parse_double(const std::string& field, double& out) {
  const char* s = field.c_str();
  char* end = nullptr;
  out = std::strtod(s, &end);
  if (end == s) return false;
  while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
  return *end == '\0';
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) fields.push_back(cur);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

}  // namespace detail

/// Reads comma-separated observations (rows) into a DataMatrix. A single
/// non-numeric first row is treated as a header. Ragged rows are rejected.
inline DataMatrix read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadInput("cannot open input file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  std::size_t width = 0;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = detail::split_csv_line(line);
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t j = 0; j < fields.size(); ++j)
      if (!detail::parse_double(fields[j], row[j])) {
        numeric = false;
        break;
      }
    if (!numeric) {
      if (first) {  // header row
        first = false;
        width = fields.size();
        continue;
      }
      throw BadInput("non-numeric value at line " + std::to_string(lineno) +
                     " of " + path);
    }
    if (width == 0) width = fields.size();
    if (fields.size() != width)
      throw BadInput("ragged row at line " + std::to_string(lineno) + " of " +
                     path);
    first = false;
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw BadInput("no data rows in " + path);
  Eigen::MatrixXd m(rows.size(), width);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j) m(i, j) = rows[i][j];
  return make_data_matrix(m);
}

/// Reads one weight per line and validates against the expected length.
inline WeightVector read_weights(const std::string& path, int q) {
  std::ifstream in(path);
  if (!in) throw BadInput("cannot open weight file: " + path);
  std::vector<double> vals;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double v;
    if (!detail::parse_double(line, v))
      throw BadInput("non-numeric weight at line " + std::to_string(lineno) +
                     " of " + path);
    vals.push_back(v);
  }
  if (static_cast<int>(vals.size()) != q)
    throw LengthMismatch("weight file has " + std::to_string(vals.size()) +
                         " entries, expected " + std::to_string(q));
  return make_weight_vector(
      Eigen::Map<const Eigen::VectorXd>(vals.data(), q));
}

/// 17 significant digits: doubles round-trip exactly through text.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline json to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

inline json path_to_json(const ElassoPath& path) {
  json out;
  out["q"] = path.q();
  out["weights"] = to_json(path.weights().a);
  out["eigenvalues"] = to_json(path.eigenvalues());
  out["knots"] = path.knots();
  out["merge_indices"] = path.merge_indices();
  json parts = json::array();
  for (const auto& p : path.partitions()) parts.push_back(p.sizes);
  out["partitions"] = parts;
  json lam = json::array();
  for (double knot : path.knots()) lam.push_back(to_json(path.solve_at(knot)));
  out["lambda_at_knots"] = lam;
  return out;
}

/// Tidy curve export: columns eta, index, lambda.
inline void write_curve_csv(std::ostream& os, const ElassoPath& path,
                            const Eigen::VectorXd& grid) {
  os << "eta,index,lambda\n";
  for (int g = 0; g < grid.size(); ++g) {
    Eigen::VectorXd lam = path.solve_at(grid[g]);
    for (int j = 0; j < lam.size(); ++j)
      os << format_double(grid[g]) << ',' << (j + 1) << ','
         << format_double(lam[j]) << '\n';
  }
}

inline json cv_to_json(const CVResult& r) {
  json out;
  out["grid"] = to_json(r.grid);
  json folds = json::array();
  for (int k = 0; k < r.fold_scores.rows(); ++k)
    folds.push_back(to_json(r.fold_scores.row(k).transpose()));
  out["fold_scores"] = folds;
  out["mean"] = to_json(r.mean);
  out["se"] = to_json(r.se);
  out["eta_min"] = r.eta_min;
  out["cv_min"] = r.mean[r.min_index];
  out["eta_1se"] = r.eta_1se;
  return out;
}

inline json model_cv_to_json(const ModelCVResult& r) {
  json out;
  out["eta_min"] = r.eta_min;
  out["cv"] = cv_to_json(r.cv);
  json models = json::array();
  for (const auto& m : r.models) {
    json rec;
    rec["sizes"] = m.sizes;
    if (std::isfinite(m.knot))
      rec["knot"] = m.knot;
    else
      rec["knot"] = nullptr;
    rec["searched"] = m.searched;
    if (m.searched) {
      rec["best_eta"] = m.best_eta;
      rec["cv_mean"] = m.cv_mean;
      rec["se_at_best"] = m.se_at_best;
    }
    rec["selected"] = m.selected;
    models.push_back(rec);
  }
  out["models"] = models;
  out["selected_index"] = r.selected_index;
  return out;
}

}  // namespace elasso
