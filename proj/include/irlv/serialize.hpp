#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "irlv/common.hpp"
#include "irlv/lssvm.hpp"
#include "irlv/mlp.hpp"
#include "irlv/nptest.hpp"

// Flat self-describing text format: "key value..." lines, numbers printed
// with 17 significant digits so a save/load round trip is bit-exact.

namespace irlv {
namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void put_vec(std::ostream& os, const char* key,
                    const std::vector<double>& v) {
  os << key << ' ' << v.size();
  for (double x : v) os << ' ' << fmt17(x);
  os << '\n';
}

inline std::vector<double> get_vec(std::istream& is) {
  std::size_t n = 0;
  if (!(is >> n)) throw Error("parse-error", "vector length expected");
  std::vector<double> v(n);
  for (auto& x : v)
    if (!(is >> x)) throw Error("parse-error", "vector element expected");
  return v;
}

inline void expect_key(std::istream& is, const std::string& want) {
  std::string got;
  if (!(is >> got) || got != want)
    throw Error("parse-error", "expected key '" + want + "', got '" + got + "'");
}

inline void put_stdz(std::ostream& os, const Standardizer& s) {
  put_vec(os, "standardizer_shift", s.shift);
  put_vec(os, "standardizer_scale", s.scale);
}

inline Standardizer get_stdz(std::istream& is) {
  Standardizer s;
  expect_key(is, "standardizer_shift");
  s.shift = get_vec(is);
  expect_key(is, "standardizer_scale");
  s.scale = get_vec(is);
  return s;
}

}  // namespace detail

inline void save_model(std::ostream& os, const MlpModel& m) {
  os << "irlv-model mlp 1\n";
  os << "autoencoder " << (m.is_autoencoder ? 1 : 0) << '\n';
  os << "layers " << m.config.layers.size();
  for (int n : m.config.layers) os << ' ' << n;
  os << '\n';
  os << "activations " << m.config.acts.size();
  for (auto a : m.config.acts) os << ' ' << (a == Activation::Sigmoid ? "sigmoid" : "linear");
  os << '\n';
  detail::put_stdz(os, m.stdz);
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    detail::put_vec(os, "weights", m.weights[l]);
    detail::put_vec(os, "biases", m.biases[l]);
  }
}

inline void save_model(std::ostream& os, const SvmModel& m) {
  os << "irlv-model lssvm 1\n";
  os << "variant " << (m.variant == SvmVariant::TwoClass ? "two-class" : "one-class") << '\n';
  os << "gamma_k " << detail::fmt17(m.kcfg.gamma_k) << '\n';
  os << "regularization " << detail::fmt17(m.kcfg.C) << '\n';
  os << "bias " << detail::fmt17(m.bias) << '\n';
  os << "orientation " << m.orientation << '\n';
  detail::put_stdz(os, m.stdz);
  os << "support_vectors " << m.sv.size() << ' '
     << (m.sv.empty() ? 0 : m.sv.front().size()) << '\n';
  for (const auto& row : m.sv) {
    for (std::size_t j = 0; j < row.size(); ++j)
      os << (j ? " " : "") << detail::fmt17(row[j]);
    os << '\n';
  }
  detail::put_vec(os, "coefficients", m.coef);
}

inline void save_model(std::ostream& os, const QuantizedPdfPair& q) {
  os << "irlv-model np-quantized 1\n";
  os << "lo " << detail::fmt17(q.lo) << '\n';
  os << "hi " << detail::fmt17(q.hi) << '\n';
  os << "n_levels " << q.n_levels << '\n';
  os << "pseudo_count " << detail::fmt17(q.pseudo) << '\n';
  detail::put_vec(os, "pmf_h0", q.p0);
  detail::put_vec(os, "pmf_h1", q.p1);
}

inline std::string model_kind_of(std::istream& is) {
  std::string magic, kind;
  int version = 0;
  if (!(is >> magic >> kind >> version) || magic != "irlv-model")
    throw Error("parse-error", "not a model file");
  if (version != 1) throw Error("parse-error", "unsupported model version");
  return kind;
}

inline MlpModel load_mlp(std::istream& is) {
  MlpModel m;
  int flag = 0;
  detail::expect_key(is, "autoencoder");
  is >> flag;
  m.is_autoencoder = flag != 0;
  detail::expect_key(is, "layers");
  std::size_t nl = 0;
  is >> nl;
  m.config.layers.resize(nl);
  for (auto& n : m.config.layers) is >> n;
  detail::expect_key(is, "activations");
  std::size_t na = 0;
  is >> na;
  m.config.acts.resize(na);
  for (auto& a : m.config.acts) {
    std::string s;
    is >> s;
    a = s == "sigmoid" ? Activation::Sigmoid : Activation::Linear;
  }
  if (!is) throw Error("parse-error", "truncated MLP header");
  m.stdz = detail::get_stdz(is);
  for (std::size_t l = 0; l + 1 < m.config.layers.size(); ++l) {
    detail::expect_key(is, "weights");
    m.weights.push_back(detail::get_vec(is));
    detail::expect_key(is, "biases");
    m.biases.push_back(detail::get_vec(is));
    std::size_t want = static_cast<std::size_t>(m.config.layers[l]) *
                       static_cast<std::size_t>(m.config.layers[l + 1]);
    if (m.weights.back().size() != want)
      throw Error("parse-error", "weight matrix size mismatch");
  }
  return m;
}

inline SvmModel load_svm(std::istream& is) {
  SvmModel m;
  std::string s;
  detail::expect_key(is, "variant");
  is >> s;
  m.variant = s == "one-class" ? SvmVariant::OneClass : SvmVariant::TwoClass;
  detail::expect_key(is, "gamma_k");
  is >> m.kcfg.gamma_k;
  detail::expect_key(is, "regularization");
  is >> m.kcfg.C;
  detail::expect_key(is, "bias");
  is >> m.bias;
  detail::expect_key(is, "orientation");
  is >> m.orientation;
  if (!is) throw Error("parse-error", "truncated SVM header");
  m.stdz = detail::get_stdz(is);
  detail::expect_key(is, "support_vectors");
  std::size_t rows = 0, cols = 0;
  is >> rows >> cols;
  m.sv.assign(rows, std::vector<double>(cols));
  for (auto& row : m.sv)
    for (auto& x : row)
      if (!(is >> x)) throw Error("parse-error", "support vector truncated");
  detail::expect_key(is, "coefficients");
  m.coef = detail::get_vec(is);
  if (m.coef.size() != rows)
    throw Error("parse-error", "coefficient count mismatch");
  return m;
}

inline QuantizedPdfPair load_quantized(std::istream& is) {
  QuantizedPdfPair q;
  detail::expect_key(is, "lo");
  is >> q.lo;
  detail::expect_key(is, "hi");
  is >> q.hi;
  detail::expect_key(is, "n_levels");
  is >> q.n_levels;
  detail::expect_key(is, "pseudo_count");
  is >> q.pseudo;
  if (!is) throw Error("parse-error", "truncated quantized-pmf header");
  detail::expect_key(is, "pmf_h0");
  q.p0 = detail::get_vec(is);
  detail::expect_key(is, "pmf_h1");
  q.p1 = detail::get_vec(is);
  if (static_cast<int>(q.p0.size()) != q.n_levels ||
      static_cast<int>(q.p1.size()) != q.n_levels)
    throw Error("parse-error", "pmf length mismatch");
  return q;
}

template <class Model>
void save_model_file(const std::string& path, const Model& m) {
  std::ofstream os(path);
  if (!os) throw Error("io-error", "cannot open " + path + " for writing");
  save_model(os, m);
  if (!os) throw Error("io-error", "write failed for " + path);
}

}  // namespace irlv
