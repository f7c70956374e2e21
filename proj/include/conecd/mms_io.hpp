#pragma once

// JSON storage for metric measure spaces:
//   { "labels": [string], "dist": [[number]], "weight": [number] }
// plus a CSV reader for bare distance matrices.

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "conecd/error.hpp"
#include "conecd/mms.hpp"

namespace conecd {

using nlohmann::json;

inline json to_json(const FiniteMetricMeasureSpace& s) {
  json dist = json::array();
  for (Index i = 0; i < s.size(); ++i) {
    json row = json::array();
    for (Index j = 0; j < s.size(); ++j) row.push_back(s.dist(i, j));
    dist.push_back(std::move(row));
  }
  return json{{"labels", s.labels}, {"dist", std::move(dist)}, {"weight", s.weight}};
}

namespace detail {

inline double number_at(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where, "expected a number");
  return v.get<double>();
}

inline const json& field(const json& j, const char* name) {
  if (!j.is_object()) throw ParseError("<root>", "expected a JSON object");
  auto it = j.find(name);
  if (it == j.end()) throw ParseError(name, "missing field");
  return *it;
}

}  // namespace detail

/// Parses the JSON form. Shape problems raise ParseError naming the field and
/// row; invariant violations raise ValidationError.
inline FiniteMetricMeasureSpace space_from_json(const json& j, bool check_triangle = true) {
  FiniteMetricMeasureSpace s;
  const json& labels = detail::field(j, "labels");
  const json& dist = detail::field(j, "dist");
  const json& weight = detail::field(j, "weight");
  if (!labels.is_array()) throw ParseError("labels", "expected an array");
  if (!weight.is_array()) throw ParseError("weight", "expected an array");
  if (!dist.is_array()) throw ParseError("dist", "expected an array of rows");
  const auto n = labels.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!labels[i].is_string()) throw ParseError("labels[" + std::to_string(i) + "]", "expected a string");
    s.labels.push_back(labels[i].get<std::string>());
  }
  if (weight.size() != n)
    throw ParseError("weight", "has " + std::to_string(weight.size()) + " entries, expected " + std::to_string(n));
  for (std::size_t i = 0; i < n; ++i) s.weight.push_back(detail::number_at(weight[i], "weight[" + std::to_string(i) + "]"));
  if (dist.size() != n) {
    const auto missing = std::min(dist.size(), n);
    throw ParseError("dist[" + std::to_string(missing) + "]",
                     "missing matrix row (" + std::to_string(dist.size()) + " of " + std::to_string(n) + " rows)");
  }
  s.dist.resize(static_cast<Index>(n), static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const std::string where = "dist[" + std::to_string(i) + "]";
    if (!dist[i].is_array()) throw ParseError(where, "expected an array");
    if (dist[i].size() != n)
      throw ParseError(where, "row has " + std::to_string(dist[i].size()) + " entries, expected " + std::to_string(n));
    for (std::size_t k = 0; k < n; ++k)
      s.dist(static_cast<Index>(i), static_cast<Index>(k)) =
          detail::number_at(dist[i][k], where + "[" + std::to_string(k) + "]");
  }
  ValidateOptions opt;
  opt.check_triangle = check_triangle;
  require_valid(s, opt);
  return s;
}

inline json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": byte " + std::to_string(e.byte), e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed for " + path);
}

inline FiniteMetricMeasureSpace load_space(const std::string& path, bool check_triangle = true) {
  return space_from_json(parse_json_file(path), check_triangle);
}

inline void save_space(const FiniteMetricMeasureSpace& s, const std::string& path) {
  write_text_file(path, to_json(s).dump(1) + "\n");
}

/// Reads a square distance matrix from CSV (comma or whitespace separated).
/// Labels default to the row index and weights to 1.
inline FiniteMetricMeasureSpace space_from_csv(std::istream& in, const std::string& name = "<csv>") {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    for (char& c : line)
      if (c == ',' || c == ';') c = ' ';
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError(name + ":" + std::to_string(lineno), "not a number: '" + tok + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  const auto n = rows.size();
  FiniteMetricMeasureSpace s;
  s.dist.resize(static_cast<Index>(n), static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n)
      throw ParseError(name + ": row " + std::to_string(i),
                       "has " + std::to_string(rows[i].size()) + " entries, expected " + std::to_string(n));
    for (std::size_t k = 0; k < n; ++k) s.dist(static_cast<Index>(i), static_cast<Index>(k)) = rows[i][k];
    s.labels.push_back(std::to_string(i));
  }
  s.weight.assign(n, 1.0);
  require_valid(s);
  return s;
}

inline FiniteMetricMeasureSpace load_space_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open file");
  return space_from_csv(in, path);
}

}  // namespace conecd
