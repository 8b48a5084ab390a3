#include <doctest.h>

#include <cmath>

#include "haad/errors.hpp"
#include "haad/random.hpp"
#include "haad/spectral.hpp"

using namespace haad;

namespace {

// Direct cosine-formula DCT-II evaluated in long double.
long double dct_entry(int k, int n, int h) {
  const long double pi = 3.141592653589793238462643383279502884L;
  const long double scale = k == 0 ? std::sqrt(1.0L / h) : std::sqrt(2.0L / h);
  return scale * std::cos(pi * (2.0L * n + 1.0L) * k / (2.0L * h));
}

Eigen::MatrixXd naive_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      for (Eigen::Index k = 0; k < a.cols(); ++k) out(i, j) += a(i, k) * b(k, j);
  return out;
}

}  // namespace

TEST_CASE("square basis is orthogonal") {
  const DctBasis b(4, 4);
  CHECK((b.matrix() * b.matrix().transpose() - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((b.matrix().transpose() * b.matrix() - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("DC row is constant") {
  const DctBasis b(1, 60);
  REQUIRE(b.matrix().rows() == 1);
  for (int n = 0; n < 60; ++n) CHECK(b.matrix()(0, n) == doctest::Approx(1.0 / std::sqrt(60.0)).epsilon(1e-15));
}

TEST_CASE("truncated basis matches extended-precision reference") {
  const DctBasis b(10, 60);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k)
    for (int n = 0; n < 60; ++n)
      worst = std::max(worst, static_cast<double>(std::fabs(b.matrix()(k, n) - dct_entry(k, n, 60))));
  CHECK(worst < 1e-13);
  CHECK((b.matrix() * b.matrix().transpose() - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("invalid basis sizes") {
  CHECK_THROWS_AS(DctBasis(5, 4), ArgumentError);
  CHECK_THROWS_AS(DctBasis(0, 4), ArgumentError);
}

TEST_CASE("constant motion has DC-only spectrum") {
  const int h = 60;
  Eigen::RowVectorXd v(6);
  v << 0.1, -0.2, 0.3, 1.5, 0.0, -2.0;
  const Eigen::MatrixXd x = v.replicate(h, 1);
  const auto c = dct_encode(DctBasis(10, h), x);
  CHECK((c.row(0) - std::sqrt(static_cast<double>(h)) * v).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(c.bottomRows(9).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("zero motion encodes to zero") {
  const auto c = dct_encode(DctBasis(10, 60), Eigen::MatrixXd::Zero(60, 6));
  CHECK(c.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("encode matches a naive matrix product") {
  Rng rng(3);
  const Eigen::MatrixXd x = standard_normal(60, 6, rng);
  const DctBasis b(10, 60);
  CHECK((dct_encode(b, x) - naive_product(b.matrix(), x)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("shape mismatches are rejected") {
  const DctBasis b(10, 60);
  CHECK_THROWS_AS(dct_encode(b, Eigen::MatrixXd::Zero(59, 6)), ArgumentError);
  CHECK_THROWS_AS(idct_frames(b, Eigen::MatrixXd::Zero(9, 6)), ArgumentError);
  CHECK_THROWS_AS(idct_decode(b, Eigen::MatrixXd::Zero(10, 6), 3), ArgumentError);
}

TEST_CASE("full-rank round trip") {
  Rng rng(4);
  const Eigen::MatrixXd x = standard_normal(60, 9, rng);
  const DctBasis b(60, 60);
  const auto back = idct_decode(b, dct_encode(b, x), 3);
  CHECK((back.frames() - x).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("band-limited signals are recovered exactly") {
  Rng rng(5);
  const DctBasis full(60, 60);
  Eigen::MatrixXd spectrum = Eigen::MatrixXd::Zero(60, 6);
  spectrum.topRows(10) = standard_normal(10, 6, rng);
  const Eigen::MatrixXd x = full.matrix().transpose() * spectrum;
  const DctBasis b(10, 60);
  CHECK((idct_frames(b, dct_encode(b, x)) - x).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("truncation error equals discarded spectral energy") {
  Rng rng(6);
  const Eigen::MatrixXd x = standard_normal(60, 6, rng);
  const DctBasis b(10, 60);
  const double err = (idct_frames(b, dct_encode(b, x)) - x).squaredNorm();
  // Oracle: energy of components 10..59 under the full basis, built from the cosine formula.
  double discarded = 0.0;
  for (int k = 10; k < 60; ++k) {
    for (int col = 0; col < 6; ++col) {
      long double c = 0.0L;
      for (int n = 0; n < 60; ++n) c += dct_entry(k, n, 60) * x(n, col);
      discarded += static_cast<double>(c * c);
    }
  }
  CHECK(err == doctest::Approx(discarded).epsilon(1e-9));
}

TEST_CASE("properties over random motions") {
  Rng rng(7);
  std::uniform_int_distribution<int> len(4, 40);
  for (int trial = 0; trial < 50; ++trial) {
    const int h = len(rng);
    const int m = 1 + trial % h;
    const DctBasis b(m, h);
    const Eigen::MatrixXd x = standard_normal(h, 6, rng);
    const Eigen::MatrixXd y = standard_normal(h, 6, rng);

    // Parseval on the retained band.
    CHECK(dct_encode(b, x).norm() <= x.norm() + 1e-12);

    // Linearity.
    const double a = 0.7, c = -1.3;
    const Eigen::MatrixXd lhs = dct_encode(b, Eigen::MatrixXd(a * x + c * y));
    const Eigen::MatrixXd rhs = a * dct_encode(b, x) + c * dct_encode(b, y);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);

    // Projection idempotence.
    const Eigen::MatrixXd once = idct_frames(b, dct_encode(b, x));
    const Eigen::MatrixXd twice = idct_frames(b, dct_encode(b, once));
    CHECK((once - twice).cwiseAbs().maxCoeff() < 1e-9);

    // Equality in Parseval iff band-limited.
    CHECK(dct_encode(b, once).norm() == doctest::Approx(once.norm()).epsilon(1e-10));
  }
}
