// SPDX-License-Identifier: Apache-2.0
#ifndef QCTSP_GEO_HPP
#define QCTSP_GEO_HPP

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

namespace qctsp {

inline constexpr double kEarthRadiusKm = 6371.0;

struct City {
  std::string name;
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, [-180, 180]
};

struct DistanceMatrix {
  std::vector<std::string> names;
  std::vector<std::vector<double>> d;  // km, symmetric, zero diagonal

  std::size_t size() const { return names.size(); }
  double at(std::size_t i, std::size_t j) const { return d[i][j]; }

  double max_distance() const {
    double m = 0.0;
    for (const auto& row : d)
      for (double v : row) m = std::max(m, v);
    return m;
  }

  // Sub-matrix over the given city indices, in the given order.
  DistanceMatrix sub_matrix(const std::vector<int>& idx) const {
    DistanceMatrix sub;
    sub.names.reserve(idx.size());
    for (int i : idx) sub.names.push_back(names[static_cast<std::size_t>(i)]);
    sub.d.assign(idx.size(), std::vector<double>(idx.size(), 0.0));
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b)
        sub.d[a][b] = d[static_cast<std::size_t>(idx[a])]
                       [static_cast<std::size_t>(idx[b])];
    return sub;
  }
};

namespace detail {

inline void validate_city(const City& c, const std::string& where) {
  if (c.name.empty())
    throw std::invalid_argument(where + ": empty city name");
  if (!(c.lat >= -90.0 && c.lat <= 90.0))
    throw std::invalid_argument(where + ": latitude " +
                                std::to_string(c.lat) + " out of [-90, 90]");
  if (!(c.lon >= -180.0 && c.lon <= 180.0))
    throw std::invalid_argument(where + ": longitude " +
                                std::to_string(c.lon) + " out of [-180, 180]");
}

inline std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

inline double parse_double(const std::string& s, const std::string& where) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument(where + ": not a number: '" + s + "'");
  }
  if (pos != s.size())
    throw std::invalid_argument(where + ": trailing junk in number: '" + s + "'");
  return v;
}

}  // namespace detail

// CSV with header `name,lat,lon`. Order of rows is preserved.
inline std::vector<City> load_cities(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open cities file: " + path);

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(path + ": empty file, expected header name,lat,lon");
  {
    auto header = detail::split_csv_row(line);
    if (header.size() != 3 || header[0] != "name" || header[1] != "lat" ||
        header[2] != "lon")
      throw std::runtime_error(path + ": bad header, expected name,lat,lon");
  }

  std::vector<City> cities;
  std::unordered_set<std::string> seen;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const std::string where = path + ":" + std::to_string(row);
    auto fields = detail::split_csv_row(line);
    if (fields.size() != 3)
      throw std::invalid_argument(where + ": expected 3 fields, got " +
                                  std::to_string(fields.size()));
    City c;
    c.name = fields[0];
    c.lat = detail::parse_double(fields[1], where);
    c.lon = detail::parse_double(fields[2], where);
    detail::validate_city(c, where);
    if (!seen.insert(c.name).second)
      throw std::invalid_argument(where + ": duplicate city name '" + c.name + "'");
    cities.push_back(std::move(c));
  }
  if (cities.empty()) throw std::runtime_error(path + ": no cities");
  return cities;
}

// Great-circle distance on a sphere of radius 6371.0 km.
inline double haversine_km(const City& a, const City& b) {
  constexpr double deg = M_PI / 180.0;
  const double phi1 = a.lat * deg;
  const double phi2 = b.lat * deg;
  const double dphi = (b.lat - a.lat) * deg;
  const double dlam = (b.lon - a.lon) * deg;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlam / 2.0);
  const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

namespace detail {

inline void validate_matrix(const DistanceMatrix& m, const std::string& where) {
  const std::size_t n = m.names.size();
  if (m.d.size() != n)
    throw std::invalid_argument(where + ": matrix row count != city count");
  for (std::size_t i = 0; i < n; ++i) {
    if (m.d[i].size() != n)
      throw std::invalid_argument(where + ": matrix is not square");
    if (m.d[i][i] != 0.0)
      throw std::invalid_argument(where + ": nonzero diagonal at " +
                                  std::to_string(i));
    for (std::size_t j = 0; j < n; ++j) {
      if (m.d[i][j] < 0.0)
        throw std::invalid_argument(where + ": negative distance at (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
      if (m.d[i][j] != m.d[j][i])
        throw std::invalid_argument(where + ": asymmetric entry at (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
      if (i != j && m.d[i][j] == 0.0)
        throw std::invalid_argument(where + ": zero off-diagonal distance at (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
    }
  }
}

}  // namespace detail

inline DistanceMatrix build_distance_matrix(const std::vector<City>& cities) {
  if (cities.empty())
    throw std::invalid_argument("build_distance_matrix: no cities");
  DistanceMatrix m;
  m.names.reserve(cities.size());
  for (const auto& c : cities) m.names.push_back(c.name);
  const std::size_t n = cities.size();
  m.d.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      m.d[i][j] = m.d[j][i] = haversine_km(cities[i], cities[j]);
  detail::validate_matrix(m, "build_distance_matrix");
  return m;
}

// Cache format: {"cities": [names...], "matrix_km": [[...], ...]}.
// Stored full (not triangular) so symmetry is validated on load.
inline void save_matrix_cache(const DistanceMatrix& m, const std::string& path) {
  nlohmann::ordered_json j;
  j["cities"] = m.names;
  j["matrix_km"] = m.d;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write matrix cache: " + path);
  out << j.dump(2) << "\n";
}

inline DistanceMatrix load_matrix_cache(const std::string& path,
                                        const std::vector<City>& cities) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix cache: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": bad JSON: " + e.what());
  }
  DistanceMatrix m;
  m.names = j.at("cities").get<std::vector<std::string>>();
  m.d = j.at("matrix_km").get<std::vector<std::vector<double>>>();
  if (m.names.size() != cities.size())
    throw std::invalid_argument(path + ": cache has " +
                                std::to_string(m.names.size()) +
                                " cities, request has " +
                                std::to_string(cities.size()));
  for (std::size_t i = 0; i < cities.size(); ++i)
    if (m.names[i] != cities[i].name)
      throw std::invalid_argument(path + ": city mismatch at index " +
                                  std::to_string(i) + ": cache '" + m.names[i] +
                                  "' vs requested '" + cities[i].name + "'");
  detail::validate_matrix(m, path);
  return m;
}

}  // namespace qctsp

#endif  // QCTSP_GEO_HPP
