// crc.hpp -- collaborative representation classification with ridge
// regularized coding.
//
// A query y is coded against the whole dictionary A at once:
//
//   x_hat = argmin_x ||y - A x||^2 + sigma ||x||^2 = (A^H A + sigma I)^-1 A^H y
//
// and labeled by the class whose columns reconstruct y with the smallest
// l2 residual.  The coding operator P = (A^H A + sigma I)^-1 A^H depends only
// on the dictionary, so it is computed once at build time and every query
// reduces to a matrix-vector product plus per-class residuals.
//
// Everything is templated on the scalar so the same code serves the
// time-domain (double) and the spectral (complex) classifier.
#pragma once

#include "scrc/common.hpp"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

namespace scrc::crc {

template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Conditioned dictionary: columns centered (optionally) and scaled to unit
/// l2 norm, each tagged with a class id in 1..class_count.
template <typename Scalar>
struct Dictionary {
  MatX<Scalar> columns;        ///< m x N, conditioned
  std::vector<int> class_of;   ///< N entries, values 1..class_count
  int class_count = 0;
  Vec column_norms;            ///< pre-normalization norms (after centering)
  VecX<Scalar> column_mean;    ///< mean removed from every raw column

  Index dim() const { return columns.rows(); }
  Index size() const { return columns.cols(); }
};

/// Precomputed ridge coding operator for one dictionary.
template <typename Scalar>
struct RegressionOperator {
  MatX<Scalar> p;  ///< N x m; x_hat = p * y
  double sigma = 0.0;
};

template <typename Scalar>
struct CodeVector {
  VecX<Scalar> x_hat;
};

/// Per-class reconstruction residuals plus the decision they induce.
struct ResidualVector {
  Vec residuals;       ///< length class_count, nonnegative
  int label = 0;       ///< argmin class id; ties resolve to the smallest id
  double margin = 0.0; ///< second smallest residual minus smallest
};

struct DictionaryOptions {
  bool center_columns = true;
  bool normalize_columns = true;
};

/// Default regularizer: 0.1 * (m / N) * mean conditioned column energy.
/// With unit-normalized columns the last factor is 1.  The weight is
/// deliberately stout: atoms drawn from the same activity are nearly
/// collinear, and a light ridge lets the coder fit queries with huge
/// mutually-canceling coefficients whose per-class splits are garbage.
inline double default_sigma(Index m, Index n_cols,
                            double mean_column_energy = 1.0) {
  return 0.1 * (double(m) / double(n_cols)) * mean_column_energy;
}

/// Builds a conditioned dictionary and its coding operator.
///
/// raw_columns: m x N sample matrix, one column per training atom.
/// class_of: class id per column; ids must cover 1..K with no gaps.
/// sigma: ridge weight, must be positive.
template <typename Scalar>
std::pair<Dictionary<Scalar>, RegressionOperator<Scalar>> build_dictionary(
    const MatX<Scalar>& raw_columns, const std::vector<int>& class_of,
    double sigma, DictionaryOptions opt = {}) {
  const Index m = raw_columns.rows();
  const Index n = raw_columns.cols();
  if (m < 1 || n < 2) throw DimensionError("dictionary needs >= 2 columns");
  if (Index(class_of.size()) != n)
    throw DimensionError("class label count does not match column count");
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (!all_finite(raw_columns))
    throw NumericError("dictionary columns have non-finite entries");

  int k = 0;
  for (int c : class_of) {
    if (c < 1) throw DataError("class ids must be >= 1");
    k = std::max(k, c);
  }
  if (k < 2) throw DataError("need at least two classes");
  std::vector<Index> per_class(size_t(k), 0);
  for (int c : class_of) ++per_class[size_t(c - 1)];
  for (int c = 0; c < k; ++c)
    if (per_class[size_t(c)] == 0)
      throw DataError("class " + std::to_string(c + 1) + " has no columns");

  Dictionary<Scalar> dict;
  dict.class_of = class_of;
  dict.class_count = k;
  dict.columns = raw_columns;
  if (opt.center_columns) {
    dict.column_mean = raw_columns.rowwise().mean();
    dict.columns.colwise() -= dict.column_mean;
  } else {
    dict.column_mean = VecX<Scalar>::Zero(m);
  }
  dict.column_norms.resize(n);
  for (Index j = 0; j < n; ++j) {
    const double norm = dict.columns.col(j).norm();
    if (norm < 1e-12)
      throw DataError("column " + std::to_string(j) +
                      " is (near) zero after centering");
    dict.column_norms[j] = norm;
    if (opt.normalize_columns) dict.columns.col(j) /= norm;
  }

  // Normal equations via Cholesky; sigma > 0 makes the Gram SPD, and solving
  // against A^H keeps us clear of an explicit inverse.
  MatX<Scalar> gram = dict.columns.adjoint() * dict.columns;
  gram.diagonal().array() += Scalar(sigma);
  Eigen::LLT<MatX<Scalar>> llt(gram);
  if (llt.info() != Eigen::Success)
    throw NumericError("regularized Gram matrix is not positive definite");
  RegressionOperator<Scalar> op;
  op.sigma = sigma;
  op.p = llt.solve(dict.columns.adjoint());
  return {std::move(dict), std::move(op)};
}

/// Codes one observation: x_hat = P y.
template <typename Scalar>
CodeVector<Scalar> code(const RegressionOperator<Scalar>& op,
                        const VecX<Scalar>& y) {
  if (y.size() != op.p.cols())
    throw DimensionError("observation length does not match dictionary");
  if (!all_finite(y)) throw NumericError("observation has non-finite entries");
  return {op.p * y};
}

/// Scores a coded observation against every class and picks the argmin
/// residual; ties break toward the smaller class id.
template <typename Scalar>
ResidualVector classify(const Dictionary<Scalar>& dict,
                        const CodeVector<Scalar>& c, const VecX<Scalar>& y) {
  if (y.size() != dict.dim())
    throw DimensionError("observation length does not match dictionary");
  if (c.x_hat.size() != dict.size())
    throw DimensionError("code length does not match dictionary");
  const int k = dict.class_count;
  MatX<Scalar> recon = MatX<Scalar>::Zero(dict.dim(), k);
  for (Index j = 0; j < dict.size(); ++j)
    recon.col(dict.class_of[size_t(j)] - 1) += dict.columns.col(j) * c.x_hat[j];

  ResidualVector out;
  out.residuals.resize(k);
  for (int i = 0; i < k; ++i) out.residuals[i] = (y - recon.col(i)).norm();
  out.label = 1;
  for (int i = 1; i < k; ++i)
    if (out.residuals[i] < out.residuals[out.label - 1]) out.label = i + 1;
  double second = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i)
    if (i != out.label - 1) second = std::min(second, out.residuals[i]);
  out.margin = second - out.residuals[out.label - 1];
  return out;
}

template <typename Scalar>
ResidualVector classify_one_shot(const Dictionary<Scalar>& dict,
                                 const RegressionOperator<Scalar>& op,
                                 const VecX<Scalar>& y) {
  return classify(dict, code(op, y), y);
}

}  // namespace scrc::crc
