#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "irlv/common.hpp"
#include "irlv/geometry.hpp"

namespace irlv {

// One observation: linear attenuations (a^(n) > 0), optional {-1,+1} label
// and the position it was measured at.
struct FeatureVector {
  std::vector<double> a;      // linear scale
  int label = 0;              // -1, +1, or 0 when unlabeled
  std::optional<Position> position;
};

using Dataset = std::vector<FeatureVector>;

inline std::vector<double> to_db(const std::vector<double>& lin) {
  std::vector<double> out(lin.size());
  for (std::size_t i = 0; i < lin.size(); ++i) out[i] = linear_to_db(lin[i]);
  return out;
}

// Per-feature affine map z = (x - shift) / scale. Two fit modes: z-score for
// the classifiers and min-max (to a target interval) for the sigmoid-output
// autoencoder.
struct Standardizer {
  std::vector<double> shift;
  std::vector<double> scale;

  std::vector<double> apply(const std::vector<double>& x) const {
    if (x.size() != shift.size())
      throw Error("dimension-mismatch", "standardizer input size");
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - shift[i]) / scale[i];
    return z;
  }

  static Standardizer fit_zscore(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw Error("empty-data", "cannot fit standardizer");
    std::size_t d = rows[0].size();
    Standardizer s;
    s.shift.assign(d, 0.0);
    s.scale.assign(d, 1.0);
    for (const auto& r : rows)
      for (std::size_t i = 0; i < d; ++i) s.shift[i] += r[i];
    for (auto& m : s.shift) m /= static_cast<double>(rows.size());
    std::vector<double> var(d, 0.0);
    for (const auto& r : rows)
      for (std::size_t i = 0; i < d; ++i) {
        double c = r[i] - s.shift[i];
        var[i] += c * c;
      }
    for (std::size_t i = 0; i < d; ++i) {
      double v = var[i] / static_cast<double>(rows.size());
      s.scale[i] = v > 0 ? std::sqrt(v) : 1.0;
    }
    return s;
  }

  static Standardizer fit_minmax(const std::vector<std::vector<double>>& rows,
                                 double lo = 0.05, double hi = 0.95) {
    if (rows.empty()) throw Error("empty-data", "cannot fit standardizer");
    std::size_t d = rows[0].size();
    std::vector<double> mn(d, INFINITY), mx(d, -INFINITY);
    for (const auto& r : rows)
      for (std::size_t i = 0; i < d; ++i) {
        mn[i] = std::min(mn[i], r[i]);
        mx[i] = std::max(mx[i], r[i]);
      }
    Standardizer s;
    s.shift.resize(d);
    s.scale.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      double span = mx[i] - mn[i];
      if (span <= 0) span = 1.0;
      // maps [mn, mx] -> [lo, hi]
      s.scale[i] = span / (hi - lo);
      s.shift[i] = mn[i] - lo * s.scale[i];
    }
    return s;
  }
};

// Rows in dB converted from the dataset's linear attenuations.
inline std::vector<std::vector<double>> db_rows(const Dataset& data) {
  std::vector<std::vector<double>> rows;
  rows.reserve(data.size());
  for (const auto& fv : data) rows.push_back(to_db(fv.a));
  return rows;
}

// --- CSV I/O: columns x, y, a_1..a_N (dB), label; comma, dot decimal, LF ---

inline void write_dataset_csv(const std::string& path, const Dataset& data) {
  if (data.empty()) throw Error("empty-data", "refusing to write empty dataset");
  std::ofstream out(path);
  if (!out) throw Error("io-error", "cannot open " + path + " for writing");
  out.precision(17);
  std::size_t n = data[0].a.size();
  out << "x,y";
  for (std::size_t i = 1; i <= n; ++i) out << ",a_" << i;
  out << ",label\n";
  for (const auto& fv : data) {
    if (fv.a.size() != n) throw Error("ragged-data", "inconsistent feature count");
    Position p = fv.position.value_or(Position{NAN, NAN});
    out << p.x << "," << p.y;
    for (double v : fv.a) out << "," << linear_to_db(v);
    out << "," << fv.label << "\n";
  }
  if (!out) throw Error("io-error", "write failed: " + path);
}

inline Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io-error", "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error("bad-format", "empty file: " + path);
  std::size_t n_cols = 1 + static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  if (n_cols < 4) throw Error("bad-format", "expected x,y,a_1..,label header");
  std::size_t n_feat = n_cols - 3;
  Dataset data;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.size() != n_cols)
      throw Error("ragged-data", path + ": row " + std::to_string(lineno));
    FeatureVector fv;
    if (std::isfinite(vals[0]) && std::isfinite(vals[1]))
      fv.position = Position{vals[0], vals[1]};
    for (std::size_t i = 0; i < n_feat; ++i) {
      double db = vals[2 + i];
      if (!std::isfinite(db)) throw Error("bad-value", "non-finite attenuation");
      fv.a.push_back(db_to_linear(db));
    }
    fv.label = static_cast<int>(vals.back());
    if (fv.label != -1 && fv.label != 1 && fv.label != 0)
      throw Error("bad-value", "label must be -1, +1 or 0");
    data.push_back(std::move(fv));
  }
  return data;
}

}  // namespace irlv
