#include "scrc/crc.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"

#include <random>

using namespace scrc;
using namespace scrc::crc;
using testutil::random_mat;
using testutil::random_vec;

namespace {

CMat random_cmat(Index rows, Index cols, std::uint32_t seed) {
  return random_mat(rows, cols, seed).cast<Complex>() +
         Complex(0, 1) * random_mat(rows, cols, seed + 1).cast<Complex>();
}

std::vector<int> cyclic_classes(Index n, int k) {
  std::vector<int> out(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) out[size_t(i)] = int(i) % k + 1;
  return out;
}

/// Independent residual computation: explicit per-class reconstruction sums.
template <typename Scalar>
Vec brute_force_residuals(const Dictionary<Scalar>& dict,
                          const VecX<Scalar>& x_hat, const VecX<Scalar>& y) {
  Vec r(dict.class_count);
  for (int cls = 1; cls <= dict.class_count; ++cls) {
    VecX<Scalar> recon = VecX<Scalar>::Zero(dict.dim());
    for (Index j = 0; j < dict.size(); ++j)
      if (dict.class_of[size_t(j)] == cls)
        recon += dict.columns.col(j) * x_hat[j];
    r[cls - 1] = (y - recon).norm();
  }
  return r;
}

}  // namespace

TEST_CASE("ridge code satisfies the normal equations", "[crc]") {
  SECTION("real") {
    Mat a = random_mat(40, 18, 11);
    auto [dict, op] = build_dictionary<double>(a, cyclic_classes(18, 3), 0.05);
    Vec y = random_vec(40, 12);
    CodeVector<double> c = code(op, y);
    Mat gram = dict.columns.transpose() * dict.columns;
    gram.diagonal().array() += 0.05;
    Vec lhs = gram * c.x_hat;
    Vec rhs = dict.columns.transpose() * y;
    REQUIRE((lhs - rhs).norm() < 1e-10 * y.norm());
  }
  SECTION("complex") {
    CMat a = random_cmat(40, 18, 21);
    auto [dict, op] = build_dictionary<Complex>(a, cyclic_classes(18, 3), 0.05);
    CVec y = random_cmat(40, 1, 23);
    CodeVector<Complex> c = code(op, y);
    CMat gram = dict.columns.adjoint() * dict.columns;
    gram.diagonal().array() += Complex(0.05, 0);
    REQUIRE((gram * c.x_hat - dict.columns.adjoint() * y).norm() <
            1e-10 * y.norm());
  }
}

TEST_CASE("identity dictionary has the closed-form operator P = I/2", "[crc]") {
  Mat eye = Mat::Identity(3, 3);
  DictionaryOptions raw{.center_columns = false, .normalize_columns = false};
  auto [dict, op] = build_dictionary<double>(eye, {1, 2, 3}, 1.0, raw);
  REQUIRE((op.p - 0.5 * Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);

  Vec y(3);
  y << 1, 0, 0;
  // x_hat = y/2, so class 1 reconstructs [0.5 0 0] while classes 2 and 3
  // reconstruct nothing (their lone coefficient is zero)
  ResidualVector res = classify_one_shot(dict, op, y);
  REQUIRE(res.residuals[0] == Catch::Approx(0.5).margin(1e-14));
  REQUIRE(res.residuals[1] == Catch::Approx(1.0).margin(1e-14));
  REQUIRE(res.residuals[2] == Catch::Approx(1.0).margin(1e-14));
  REQUIRE(res.label == 1);
  REQUIRE(res.margin == Catch::Approx(0.5).margin(1e-14));
}

TEST_CASE("classify matches brute-force residuals", "[crc]") {
  SECTION("real") {
    Mat a = random_mat(50, 20, 31);
    auto [dict, op] = build_dictionary<double>(a, cyclic_classes(20, 4), 0.1);
    for (std::uint32_t t = 0; t < 5; ++t) {
      Vec y = random_vec(50, 100 + t);
      CodeVector<double> c = code(op, y);
      ResidualVector res = classify(dict, c, y);
      Vec want = brute_force_residuals(dict, c.x_hat, y);
      REQUIRE((res.residuals - want).cwiseAbs().maxCoeff() < 1e-12);
      REQUIRE((res.residuals.array() >= 0.0).all());
      Index argmin = 0;
      want.minCoeff(&argmin);
      REQUIRE(res.label == int(argmin) + 1);
    }
  }
  SECTION("complex") {
    CMat a = random_cmat(50, 20, 41);
    auto [dict, op] = build_dictionary<Complex>(a, cyclic_classes(20, 4), 0.1);
    CVec y = random_cmat(50, 1, 43);
    CodeVector<Complex> c = code(op, y);
    ResidualVector res = classify(dict, c, y);
    Vec want = brute_force_residuals(dict, c.x_hat, y);
    REQUIRE((res.residuals - want).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("zero query ties every class and resolves to the smallest id",
          "[crc]") {
  Mat a = random_mat(30, 12, 51);
  auto [dict, op] = build_dictionary<double>(a, cyclic_classes(12, 3), 0.2);
  ResidualVector res = classify_one_shot(dict, op, Vec(Vec::Zero(30)));
  REQUIRE(res.residuals.maxCoeff() < 1e-14);
  REQUIRE(res.label == 1);
  REQUIRE(res.margin == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("conditioning: centered unit columns, recoverable scaling", "[crc]") {
  Mat a = random_mat(25, 10, 61).array() + 1.5;
  auto [dict, op] = build_dictionary<double>(a, cyclic_classes(10, 2), 0.05);
  for (Index j = 0; j < dict.size(); ++j) {
    REQUIRE(dict.columns.col(j).norm() == Catch::Approx(1.0).epsilon(1e-12));
    Vec rebuilt = dict.columns.col(j) * dict.column_norms[j] +
                  dict.column_mean;
    REQUIRE((rebuilt - a.col(j)).norm() < 1e-10);
  }
}

TEST_CASE("coding commutes with unitary maps of the feature space", "[crc]") {
  // Residuals depend only on inner products, so rotating the dictionary and
  // the query together changes nothing.
  Mat a = random_mat(24, 12, 71);
  Mat q = Eigen::HouseholderQR<Mat>(random_mat(24, 24, 72))
              .householderQ();
  auto classes = cyclic_classes(12, 3);
  auto [d1, o1] = build_dictionary<double>(a, classes, 0.07,
                                           {.center_columns = false});
  auto [d2, o2] = build_dictionary<double>(Mat(q * a), classes, 0.07,
                                           {.center_columns = false});
  for (std::uint32_t t = 0; t < 4; ++t) {
    Vec y = random_vec(24, 200 + t);
    ResidualVector r1 = classify_one_shot(d1, o1, y);
    ResidualVector r2 = classify_one_shot(d2, o2, Vec(q * y));
    REQUIRE((r1.residuals - r2.residuals).cwiseAbs().maxCoeff() < 1e-10);
    REQUIRE(r1.label == r2.label);
  }
}

TEST_CASE("heavier regularization shrinks the code", "[crc]") {
  Mat a = random_mat(30, 15, 81);
  Vec y = random_vec(30, 82);
  auto classes = cyclic_classes(15, 3);
  auto [d1, o1] = build_dictionary<double>(a, classes, 0.01);
  auto [d2, o2] = build_dictionary<double>(a, classes, 100.0);
  REQUIRE(code(o2, y).x_hat.norm() < code(o1, y).x_hat.norm());
}

TEST_CASE("default sigma rule", "[crc]") {
  REQUIRE(default_sigma(300, 100, 2.0) == Catch::Approx(0.6));
  REQUIRE(default_sigma(800, 250) == Catch::Approx(0.32));
}

TEST_CASE("dictionary construction rejects bad input", "[crc]") {
  Mat a = random_mat(20, 8, 91);
  auto classes = cyclic_classes(8, 2);
  REQUIRE_THROWS_AS(build_dictionary<double>(a, classes, 0.0), ConfigError);
  REQUIRE_THROWS_AS(build_dictionary<double>(a, classes, -1.0), ConfigError);
  REQUIRE_THROWS_AS(build_dictionary<double>(a, cyclic_classes(7, 2), 0.1),
                    DimensionError);
  REQUIRE_THROWS_AS(
      build_dictionary<double>(a, std::vector<int>(8, 1), 0.1), DataError);
  {
    auto gapped = classes;
    for (auto& c : gapped) c = c == 2 ? 3 : 1;  // ids {1, 3}: class 2 empty
    REQUIRE_THROWS_AS(build_dictionary<double>(a, gapped, 0.1), DataError);
  }
  {
    Mat dup(6, 2);  // identical columns center to zero
    dup.col(0) = random_vec(6, 92);
    dup.col(1) = dup.col(0);
    REQUIRE_THROWS_AS(build_dictionary<double>(dup, {1, 2}, 0.1), DataError);
  }
  {
    Mat bad = a;
    bad(0, 0) = std::nan("");
    REQUIRE_THROWS_AS(build_dictionary<double>(bad, classes, 0.1),
                      NumericError);
  }
}

TEST_CASE("query validation", "[crc]") {
  Mat a = random_mat(20, 8, 95);
  auto [dict, op] = build_dictionary<double>(a, cyclic_classes(8, 2), 0.1);
  REQUIRE_THROWS_AS(code(op, Vec(random_vec(19, 1))), DimensionError);
  Vec bad = random_vec(20, 2);
  bad[3] = std::numeric_limits<double>::infinity();
  REQUIRE_THROWS_AS(code(op, bad), NumericError);
  CodeVector<double> short_code{random_vec(7, 3)};
  REQUIRE_THROWS_AS(classify(dict, short_code, Vec(random_vec(20, 4))),
                    DimensionError);
}
