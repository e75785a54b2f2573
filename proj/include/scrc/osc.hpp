// osc.hpp -- ordered subspace clustering for temporally contiguous data.
//
// Columns of X (one per window, in temporal order) are expressed in terms of
// each other:
//
//   min_Z 1/2 ||X - X Z||_F^2 + lambda1 ||Z||_1 + lambda2 ||Z R||_{1,2}
//   s.t. diag(Z) = 0
//
// where R is the forward-difference operator, so ||Z R||_{1,2} sums the l2
// norms of differences of neighboring coefficient columns and pushes
// consecutive windows toward the same representation.  The affinity
// |Z| + |Z^T| then feeds normalized spectral clustering.
//
// Solver: the sequential term is handled through its Moreau envelope with a
// splitting variable U ~ Z R.  Each sweep alternates
//   (1) U  <- column-wise shrinkage of Z R      (exact minimizer in U)
//   (2) Z  <- one proximal gradient step on the smooth part at fixed U,
//             i.e. entrywise soft threshold by lambda1 / L followed by
//             re-zeroing the diagonal,
// with L an upper bound on the smooth part's Lipschitz constant
// (lambda_max(X^T X) + ||R R^T|| / smoothing, ||R R^T|| <= 4).  Both steps
// decrease the split objective, so it is monotone; with lambda2 = 0 the sweep
// reduces to plain ISTA on the sparse self-expression problem.
#pragma once

#include "scrc/common.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace scrc::osc {

enum class SequentialPenalty {
  kGroupL12,   ///< sum of column l2 norms of Z R
  kFrobenius,  ///< ||Z R||_F (single group; ablation variant)
};

/// One clustering instance.  Columns of x must be in temporal order.
struct SelfExpressionProblem {
  Mat x;                  ///< m x N data, one window per column
  double lambda1 = 0.1;   ///< entrywise sparsity weight
  double lambda2 = 0.1;   ///< sequential smoothness weight
  int cluster_count = 2;
};

struct SolverOptions {
  SequentialPenalty penalty = SequentialPenalty::kGroupL12;
  int max_iterations = 200;
  double tolerance = 3e-3;   ///< relative change of Z between sweeps
  double smoothing = 0.1;    ///< Moreau parameter for the sequential term
  bool track_objective = false;
};

/// Solver output: coefficients, the symmetric affinity built from them, and
/// convergence bookkeeping.
struct Affinity {
  Mat z;  ///< N x N, zero diagonal
  Mat w;  ///< |Z| + |Z^T|
  bool converged = false;
  int iterations = 0;
  std::vector<double> objective_history;  ///< split objective per sweep,
                                          ///< filled when tracked
};

namespace detail {

/// Applies the forward-difference operator on the right: out = Z R, where
/// column j of R is e_{j+1} - e_j.  out is N x (N-1).
inline Mat apply_r(const Mat& z) {
  const Index n = z.cols();
  return z.rightCols(n - 1) - z.leftCols(n - 1);
}

/// out = M R^T for M of size N x (N-1); out is N x N.
inline Mat apply_rt(const Mat& m) {
  const Index n = m.cols() + 1;
  Mat out(m.rows(), n);
  out.col(0) = -m.col(0);
  for (Index j = 1; j < n - 1; ++j) out.col(j) = m.col(j - 1) - m.col(j);
  out.col(n - 1) = m.col(n - 2);
  return out;
}

/// Largest eigenvalue of an SPD matrix by power iteration (deterministic
/// start), with a small safety factor.
inline double spectral_norm_upper(const Mat& g) {
  Vec v = Vec::Ones(g.rows()).normalized();
  double lambda = 0.0;
  for (int it = 0; it < 64; ++it) {
    Vec w = g * v;
    const double nw = w.norm();
    if (nw <= 0.0) return 1e-12;
    lambda = v.dot(w);
    v = w / nw;
  }
  return std::max(lambda, 1e-12) * 1.02;
}

/// Proximal map of smoothing * penalty at V: column-wise (or whole-matrix)
/// shrinkage with threshold smoothing * lambda2.
inline Mat shrink_sequential(const Mat& v, double threshold,
                             SequentialPenalty penalty) {
  Mat u = v;
  if (penalty == SequentialPenalty::kFrobenius) {
    const double norm = v.norm();
    const double scale = norm > threshold ? 1.0 - threshold / norm : 0.0;
    u *= scale;
    return u;
  }
  for (Index j = 0; j < v.cols(); ++j) {
    const double norm = v.col(j).norm();
    const double scale = norm > threshold ? 1.0 - threshold / norm : 0.0;
    u.col(j) *= scale;
  }
  return u;
}

inline double penalty_value(const Mat& u, SequentialPenalty penalty) {
  if (penalty == SequentialPenalty::kFrobenius) return u.norm();
  double s = 0.0;
  for (Index j = 0; j < u.cols(); ++j) s += u.col(j).norm();
  return s;
}

}  // namespace detail

inline Affinity solve_self_expression(const SelfExpressionProblem& problem,
                                      const SolverOptions& opt = {}) {
  const Index n = problem.x.cols();
  if (n < 2) throw DimensionError("need at least two columns to cluster");
  if (problem.x.rows() < 1) throw DimensionError("empty feature rows");
  if (!all_finite(problem.x)) throw NumericError("non-finite clustering input");
  if (problem.lambda1 < 0.0 || problem.lambda2 < 0.0)
    throw ConfigError("penalty weights must be nonnegative");
  if (!(opt.smoothing > 0.0)) throw ConfigError("smoothing must be positive");
  if (opt.max_iterations < 1 || !(opt.tolerance > 0.0))
    throw ConfigError("bad solver limits");

  const bool sequential = problem.lambda2 > 0.0;
  const double mu = sequential ? 1.0 / opt.smoothing : 0.0;
  const Mat gram = problem.x.transpose() * problem.x;
  const double lip = detail::spectral_norm_upper(gram) + 4.0 * mu;

  Affinity out;
  out.z = Mat::Zero(n, n);
  Mat u;  // splitting variable, N x (N-1)
  if (sequential) u = Mat::Zero(n, n - 1);

  for (int it = 1; it <= opt.max_iterations; ++it) {
    Mat zr;
    if (sequential) {
      zr = detail::apply_r(out.z);
      u = detail::shrink_sequential(zr, opt.smoothing * problem.lambda2,
                                    opt.penalty);
    }
    Mat grad = gram * out.z - gram;
    if (sequential) grad.noalias() += mu * detail::apply_rt(zr - u);

    Mat z_next = out.z - grad / lip;
    const double thr = problem.lambda1 / lip;
    z_next = z_next.unaryExpr([thr](double v) {
      return v > thr ? v - thr : (v < -thr ? v + thr : 0.0);
    });
    z_next.diagonal().setZero();

    const double delta =
        (z_next - out.z).norm() / std::max(1.0, out.z.norm());
    out.z.swap(z_next);
    out.iterations = it;

    if (opt.track_objective) {
      double f = 0.5 * (problem.x - problem.x * out.z).squaredNorm() +
                 problem.lambda1 * out.z.cwiseAbs().sum();
      if (sequential) {
        const Mat zr_now = detail::apply_r(out.z);
        f += problem.lambda2 * detail::penalty_value(u, opt.penalty) +
             0.5 * mu * (zr_now - u).squaredNorm();
      }
      if (!out.objective_history.empty()) {
        // Each sweep minimizes U exactly and takes a majorizing prox step in
        // Z, so the split objective cannot go up (modulo roundoff).
        assert(f <= out.objective_history.back() +
                        1e-9 * std::max(1.0, out.objective_history.back()));
      }
      out.objective_history.push_back(f);
    }

    if (delta < opt.tolerance) {
      out.converged = true;
      break;
    }
  }

  out.w = out.z.cwiseAbs() + out.z.cwiseAbs().transpose();
  return out;
}

/// Contiguous run of equal labels, [begin, end).
struct ClusterSegment {
  Index begin = 0;
  Index end = 0;
  int label = 0;
};

/// Cluster labels per column (1..k, renumbered so column 0 is in cluster 1)
/// plus diagnostics.
struct ClusterAssignment {
  std::vector<int> labels;
  int cluster_count = 0;
  bool solver_converged = false;
  bool connected = true;  ///< affinity graph has at most k components
  std::vector<Index> cluster_sizes;      ///< per cluster, 1-based label - 1
  std::vector<ClusterSegment> segments;  ///< temporal runs of equal labels
};

namespace detail {

/// Seeded k-means++ on rows of `points`; returns labels in 0..k-1.
/// Deterministic for a fixed seed: ties in assignment go to the lowest
/// center index, empty clusters are reseeded with the farthest point.
inline std::vector<int> kmeans_rows(const Mat& points, int k,
                                    std::uint64_t seed, int max_iters = 100) {
  const Index n = points.rows();
  std::mt19937_64 rng(seed);
  Mat centers(k, points.cols());
  std::vector<Index> chosen;
  {
    std::uniform_int_distribution<Index> first(0, n - 1);
    chosen.push_back(first(rng));
    centers.row(0) = points.row(chosen[0]);
    Vec d2 = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
      const double total = d2.sum();
      Index pick = 0;
      if (total > 0.0) {
        std::uniform_real_distribution<double> unif(0.0, total);
        double target = unif(rng);
        for (Index i = 0; i < n; ++i) {
          target -= d2[i];
          if (target <= 0.0) {
            pick = i;
            break;
          }
        }
      } else {
        pick = Index(c) % n;
      }
      chosen.push_back(pick);
      centers.row(c) = points.row(pick);
      d2 = d2.cwiseMin(
          (points.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }
  }

  std::vector<int> labels(size_t(n), 0);
  for (int it = 0; it < max_iters; ++it) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (points.row(i) - centers.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d = (points.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (labels[size_t(i)] != best) {
        labels[size_t(i)] = best;
        changed = true;
      }
    }
    Mat sums = Mat::Zero(k, points.cols());
    std::vector<Index> counts(size_t(k), 0);
    for (Index i = 0; i < n; ++i) {
      sums.row(labels[size_t(i)]) += points.row(i);
      ++counts[size_t(labels[size_t(i)])];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[size_t(c)] == 0) {
        // reseed with the point farthest from its center
        Index far = 0;
        double far_d = -1.0;
        for (Index i = 0; i < n; ++i) {
          const double d =
              (points.row(i) - centers.row(labels[size_t(i)])).squaredNorm();
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        centers.row(c) = points.row(far);
        labels[size_t(far)] = c;
        changed = true;
      } else {
        centers.row(c) = sums.row(c) / double(counts[size_t(c)]);
      }
    }
    if (!changed) break;
  }
  return labels;
}

}  // namespace detail

/// Normalized spectral clustering of an affinity into k groups.
inline ClusterAssignment spectral_cluster(const Affinity& affinity, int k,
                                          std::uint64_t seed = 0) {
  const Index n = affinity.w.rows();
  if (k < 2) throw ConfigError("cluster count must be at least 2");
  if (n < k) throw DimensionError("fewer columns than clusters");
  if (affinity.w.cols() != n || !affinity.w.isApprox(affinity.w.transpose()))
    throw DataError("affinity must be square and symmetric");
  if ((affinity.w.array() < 0.0).any())
    throw DataError("affinity must be nonnegative");

  Vec degree = affinity.w.rowwise().sum();
  Index isolated = 0;
  Vec dinv_sqrt(n);
  for (Index i = 0; i < n; ++i) {
    if (degree[i] <= 0.0) {
      ++isolated;
      dinv_sqrt[i] = 0.0;
    } else {
      dinv_sqrt[i] = 1.0 / std::sqrt(degree[i]);
    }
  }
  Mat lap = Mat::Identity(n, n) -
            (dinv_sqrt.asDiagonal() * affinity.w * dinv_sqrt.asDiagonal());
  Eigen::SelfAdjointEigenSolver<Mat> es(lap);
  if (es.info() != Eigen::Success)
    throw NumericError("Laplacian eigensolver failed");

  Index near_zero = 0;
  for (Index i = 0; i < n; ++i)
    if (es.eigenvalues()[i] < 1e-8) ++near_zero;

  Mat embedding = es.eigenvectors().leftCols(k);
  for (Index i = 0; i < n; ++i) {
    const double norm = embedding.row(i).norm();
    if (norm > 0.0) embedding.row(i) /= norm;
  }

  std::vector<int> raw = detail::kmeans_rows(embedding, k, seed);

  // Renumber by first appearance so cluster 1 contains column 0.
  std::vector<int> remap(size_t(k), 0);
  int next = 0;
  ClusterAssignment out;
  out.labels.resize(size_t(n));
  for (Index i = 0; i < n; ++i) {
    int& slot = remap[size_t(raw[size_t(i)])];
    if (slot == 0) slot = ++next;
    out.labels[size_t(i)] = slot;
  }
  out.cluster_count = k;
  out.solver_converged = affinity.converged;
  out.connected = (near_zero + isolated) <= Index(k);
  out.cluster_sizes.assign(size_t(k), 0);
  for (int lab : out.labels) ++out.cluster_sizes[size_t(lab - 1)];
  for (Index i = 0; i < n; ++i) {
    if (out.segments.empty() || out.segments.back().label != out.labels[size_t(i)])
      out.segments.push_back({i, i + 1, out.labels[size_t(i)]});
    else
      out.segments.back().end = i + 1;
  }
  return out;
}

/// Options for the one-call couple clustering below.
struct CoupleClusterOptions {
  double lambda1 = 0.1;
  double lambda2 = 0.1;
  SolverOptions solver = {};
  bool normalize_columns = true;
  std::uint64_t seed = 0;
};

/// Clusters the columns of x (temporal order) into k groups: column
/// normalization, self-expression solve, spectral clustering.
inline ClusterAssignment cluster_couple(const Mat& x, int k,
                                        const CoupleClusterOptions& opt = {}) {
  if (x.cols() < 2 * Index(k))
    throw DataError("need at least 2k columns to cluster");
  SelfExpressionProblem problem;
  problem.x = x;
  problem.lambda1 = opt.lambda1;
  problem.lambda2 = opt.lambda2;
  problem.cluster_count = k;
  if (opt.normalize_columns) {
    for (Index j = 0; j < problem.x.cols(); ++j) {
      const double norm = problem.x.col(j).norm();
      if (norm < 1e-12)
        throw DataError("column " + std::to_string(j) +
                        " is (near) zero; cannot normalize");
      problem.x.col(j) /= norm;
    }
  }
  Affinity aff = solve_self_expression(problem, opt.solver);
  return spectral_cluster(aff, k, opt.seed);
}

}  // namespace scrc::osc
