#include "scrc/osc.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace scrc;
using namespace scrc::osc;
using testutil::random_mat;
using testutil::random_vec;

namespace {

double sparse_objective(const Mat& x, const Mat& z, double lambda1) {
  return 0.5 * (x - x * z).squaredNorm() + lambda1 * z.cwiseAbs().sum();
}

/// Plain ISTA reference for the lambda2 = 0 problem, written independently
/// of the library solver (explicit gradient, dense eigensolver for the step).
Mat ista_oracle(const Mat& x, double lambda1, int iters) {
  const Index n = x.cols();
  const double lip =
      Eigen::SelfAdjointEigenSolver<Mat>(x.transpose() * x)
          .eigenvalues()
          .maxCoeff() *
      1.01;
  Mat z = Mat::Zero(n, n);
  const double thr = lambda1 / lip;
  for (int it = 0; it < iters; ++it) {
    Mat grad = x.transpose() * (x * z - x);
    Mat step = z - grad / lip;
    z = step.unaryExpr([thr](double v) {
      return v > thr ? v - thr : (v < -thr ? v + thr : 0.0);
    });
    z.diagonal().setZero();
  }
  return z;
}

/// Data drawn from two orthogonal 4-dimensional subspaces of R^20,
/// `per_side` temporally contiguous columns each.
Mat two_orthogonal_subspaces(Index per_side, std::uint32_t seed,
                             double noise = 0.0) {
  Mat q = Eigen::HouseholderQR<Mat>(random_mat(20, 20, seed)).householderQ();
  Mat x(20, 2 * per_side);
  x.leftCols(per_side) = q.leftCols(4) * random_mat(4, per_side, seed + 1);
  x.rightCols(per_side) = q.middleCols(4, 4) * random_mat(4, per_side, seed + 2);
  if (noise > 0.0) x += noise * random_mat(20, 2 * per_side, seed + 3);
  for (Index j = 0; j < x.cols(); ++j) x.col(j) /= x.col(j).norm();
  return x;
}

}  // namespace

TEST_CASE("lambda2 = 0 reduces to the sparse self-expression solve", "[osc]") {
  Mat x = two_orthogonal_subspaces(5, 400);
  SelfExpressionProblem problem{x, 0.05, 0.0, 2};
  SolverOptions opt;
  opt.max_iterations = 5000;
  opt.tolerance = 1e-12;
  Affinity aff = solve_self_expression(problem, opt);
  REQUIRE(aff.converged);

  Mat oracle = ista_oracle(x, 0.05, 4000);
  const double f_lib = sparse_objective(x, aff.z, 0.05);
  const double f_ref = sparse_objective(x, oracle, 0.05);
  REQUIRE(f_lib == Catch::Approx(f_ref).epsilon(1e-6));
  REQUIRE((aff.z - oracle).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("orthogonal subspaces give block-diagonal coefficients", "[osc]") {
  const Index per = 12;
  Mat x = two_orthogonal_subspaces(per, 500);
  Affinity aff = solve_self_expression({x, 0.05, 0.0, 2});
  REQUIRE(aff.z.topRightCorner(per, per).cwiseAbs().maxCoeff() < 1e-12);
  REQUIRE(aff.z.bottomLeftCorner(per, per).cwiseAbs().maxCoeff() < 1e-12);
  REQUIRE(aff.z.cwiseAbs().maxCoeff() > 0.0);  // not the trivial solution
}

TEST_CASE("cluster_couple recovers contiguous subspace segments", "[osc]") {
  const Index per = 12;
  for (std::uint32_t seed : {500u, 510u, 520u}) {
    Mat x = two_orthogonal_subspaces(per, seed, 0.02);
    CoupleClusterOptions opt;
    opt.lambda1 = 0.05;
    opt.lambda2 = 0.05;
    opt.seed = seed;
    ClusterAssignment res = cluster_couple(x, 2, opt);
    std::vector<int> want(size_t(2 * per), 2);
    for (Index i = 0; i < per; ++i) want[size_t(i)] = 1;
    INFO("seed " << seed);
    REQUIRE(res.labels == want);
    REQUIRE(res.cluster_sizes == std::vector<Index>{per, per});
    REQUIRE(res.segments.size() == 2);
    REQUIRE(res.segments[0].begin == 0);
    REQUIRE(res.segments[0].end == per);
    REQUIRE(res.segments[1].label == 2);
  }
}

TEST_CASE("split objective decreases monotonically", "[osc]") {
  Mat x = two_orthogonal_subspaces(10, 600, 0.05);
  SolverOptions opt;
  opt.track_objective = true;
  opt.max_iterations = 120;
  Affinity aff = solve_self_expression({x, 0.08, 0.08, 2}, opt);
  REQUIRE(aff.objective_history.size() >= 2);
  for (size_t i = 1; i < aff.objective_history.size(); ++i)
    REQUIRE(aff.objective_history[i] <=
            aff.objective_history[i - 1] +
                1e-9 * std::max(1.0, aff.objective_history[i - 1]));
}

TEST_CASE("sequential penalty smooths neighboring coefficients", "[osc]") {
  Mat x = two_orthogonal_subspaces(10, 700, 0.15);
  Affinity plain = solve_self_expression({x, 0.05, 0.0, 2});
  Affinity smooth = solve_self_expression({x, 0.05, 0.3, 2});
  const double rough_plain =
      detail::penalty_value(detail::apply_r(plain.z),
                            SequentialPenalty::kGroupL12);
  const double rough_smooth =
      detail::penalty_value(detail::apply_r(smooth.z),
                            SequentialPenalty::kGroupL12);
  REQUIRE(rough_smooth < rough_plain);
}

TEST_CASE("Frobenius ablation solves and clusters too", "[osc]") {
  Mat x = two_orthogonal_subspaces(10, 800, 0.02);
  CoupleClusterOptions opt;
  opt.solver.penalty = SequentialPenalty::kFrobenius;
  opt.seed = 9;
  ClusterAssignment res = cluster_couple(x, 2, opt);
  std::vector<int> want(20, 2);
  for (Index i = 0; i < 10; ++i) want[size_t(i)] = 1;
  REQUIRE(res.labels == want);
}

TEST_CASE("solver and clustering are deterministic", "[osc]") {
  Mat x = two_orthogonal_subspaces(8, 900, 0.1);
  SelfExpressionProblem problem{x, 0.1, 0.1, 2};
  Affinity a = solve_self_expression(problem);
  Affinity b = solve_self_expression(problem);
  REQUIRE((a.z - b.z).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(a.iterations == b.iterations);
  REQUIRE(a.converged == b.converged);
  ClusterAssignment c1 = spectral_cluster(a, 2, 1234);
  ClusterAssignment c2 = spectral_cluster(b, 2, 1234);
  REQUIRE(c1.labels == c2.labels);
}

TEST_CASE("iteration cap marks the result non-converged", "[osc]") {
  Mat x = two_orthogonal_subspaces(8, 1000);
  SolverOptions opt;
  opt.max_iterations = 1;
  Affinity aff = solve_self_expression({x, 0.1, 0.1, 2}, opt);
  REQUIRE_FALSE(aff.converged);
  REQUIRE(aff.iterations == 1);
}

TEST_CASE("spectral clustering of a hand-built affinity", "[osc]") {
  const Index n = 7;
  Mat w = Mat::Zero(n, n);
  w.topLeftCorner(3, 3).setOnes();
  w.bottomRightCorner(4, 4).setOnes();
  w.diagonal().setZero();
  Affinity aff;
  aff.z = Mat::Zero(n, n);
  aff.w = w;
  aff.converged = true;

  ClusterAssignment res = spectral_cluster(aff, 2, 7);
  REQUIRE(res.labels == std::vector<int>{1, 1, 1, 2, 2, 2, 2});
  REQUIRE(res.cluster_sizes == std::vector<Index>{3, 4});
  REQUIRE(res.segments.size() == 2);
  REQUIRE(res.segments[0].begin == 0);
  REQUIRE(res.segments[0].end == 3);
  REQUIRE(res.segments[0].label == 1);
  REQUIRE(res.segments[1].begin == 3);
  REQUIRE(res.segments[1].end == 7);
  REQUIRE(res.connected);  // exactly two components for two clusters
  REQUIRE(res.solver_converged);
}

TEST_CASE("more components than clusters clears the connected flag", "[osc]") {
  const Index n = 9;
  Mat w = Mat::Zero(n, n);
  w.block(0, 0, 3, 3).setOnes();
  w.block(3, 3, 3, 3).setOnes();
  w.block(6, 6, 3, 3).setOnes();
  w.diagonal().setZero();
  Affinity aff;
  aff.z = Mat::Zero(n, n);
  aff.w = w;
  ClusterAssignment res = spectral_cluster(aff, 2, 3);
  REQUIRE_FALSE(res.connected);
}

TEST_CASE("clustering input validation", "[osc]") {
  REQUIRE_THROWS_AS(solve_self_expression({Mat::Ones(3, 1), 0.1, 0.1, 2}),
                    DimensionError);
  REQUIRE_THROWS_AS(solve_self_expression({Mat::Ones(3, 4), -0.1, 0.1, 2}),
                    ConfigError);
  {
    SolverOptions opt;
    opt.smoothing = 0.0;
    REQUIRE_THROWS_AS(solve_self_expression({Mat::Ones(3, 4), 0.1, 0.1, 2},
                                            opt),
                      ConfigError);
  }
  {
    Mat bad = Mat::Ones(3, 4);
    bad(1, 2) = std::nan("");
    REQUIRE_THROWS_AS(solve_self_expression({bad, 0.1, 0.1, 2}),
                      NumericError);
  }

  Affinity aff;
  aff.z = Mat::Zero(4, 4);
  aff.w = Mat::Zero(4, 4);
  aff.w(0, 1) = 1.0;  // asymmetric
  REQUIRE_THROWS_AS(spectral_cluster(aff, 2), DataError);
  aff.w = -Mat::Ones(4, 4);
  REQUIRE_THROWS_AS(spectral_cluster(aff, 2), DataError);
  aff.w = Mat::Ones(4, 4);
  REQUIRE_THROWS_AS(spectral_cluster(aff, 1), ConfigError);
  REQUIRE_THROWS_AS(spectral_cluster(aff, 5), DimensionError);

  REQUIRE_THROWS_AS(cluster_couple(Mat::Ones(5, 3), 2, {}), DataError);
  Mat zero_col = random_mat(5, 6, 1);
  zero_col.col(2).setZero();
  REQUIRE_THROWS_AS(cluster_couple(zero_col, 2, {}), DataError);
}
