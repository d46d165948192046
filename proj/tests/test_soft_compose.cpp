#include <doctest.h>

#include <cmath>
#include <random>

#include "cbf/soft_compose.hpp"
#include "oracles.hpp"

using cbf::Jet2;
using cbf::SoftParams;

namespace {

Jet2 random_jet(std::mt19937& rng, int dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Jet2 j(dim);
  j.value = u(rng);
  for (int i = 0; i < dim; ++i) j.grad(i) = u(rng);
  for (int i = 0; i < dim; ++i) {
    for (int k = i; k < dim; ++k) {
      j.hess(i, k) = j.hess(k, i) = u(rng);
    }
  }
  return j;
}

}  // namespace

TEST_CASE("softmin values") {
  const std::vector<double> single{5.0};
  CHECK(cbf::softmin(SoftParams(20.0, 1), single) == doctest::Approx(5.0));

  const std::vector<double> pair{0.0, 0.0};
  CHECK(cbf::softmin(SoftParams(20.0, 2), pair) ==
        doctest::Approx(-std::log(2.0) / 20.0));

  const std::vector<double> zo{0.0, 1.0};
  const double v = cbf::softmin(SoftParams(20.0, 2), zo);
  CHECK(v >= -std::log(2.0) / 20.0);
  CHECK(v < 0.0);
  CHECK(v == doctest::Approx(oracles::naive_softmin(20.0, zo)).epsilon(1e-12));
}

TEST_CASE("softmax values") {
  const std::vector<double> single{5.0};
  CHECK(cbf::softmax(SoftParams(20.0, 1), single) == doctest::Approx(5.0));

  for (int n : {2, 5, 8}) {
    const std::vector<double> equal(n, 3.25);
    CHECK(cbf::softmax(SoftParams(20.0, n), equal) == doctest::Approx(3.25));
  }

  const std::vector<double> zo{0.0, 1.0};
  const double v = cbf::softmax(SoftParams(20.0, 2), zo);
  CHECK(v > 1.0 - std::log(2.0) / 20.0);
  CHECK(v <= 1.0);
  CHECK(v == doctest::Approx(oracles::naive_softmax(20.0, zo)).epsilon(1e-12));
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(SoftParams(0.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(SoftParams(20.0, 0), std::invalid_argument);
  const std::vector<double> bad{1.0, std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(cbf::softmin(SoftParams(20.0, 2), bad), std::invalid_argument);
  const std::vector<double> wrong_len{1.0};
  CHECK_THROWS_AS(cbf::softmax(SoftParams(20.0, 2), wrong_len),
                  std::invalid_argument);
}

TEST_CASE("sandwich bounds on random inputs") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (double kappa : {1.0, 10.0, 20.0, 100.0}) {
    for (int n = 1; n <= 8; ++n) {
      for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> z(n);
        for (double& zi : z) zi = u(rng);
        const double zmin = *std::min_element(z.begin(), z.end());
        const double zmax = *std::max_element(z.begin(), z.end());
        const double offset = std::log(static_cast<double>(n)) / kappa;
        const double smin = cbf::softmin(SoftParams(kappa, n), z);
        const double smax = cbf::softmax(SoftParams(kappa, n), z);
        CHECK(smin >= zmin - offset - 1e-12);
        CHECK(smin <= zmin + 1e-12);
        CHECK(smax >= zmax - offset - 1e-12);
        CHECK(smax <= zmax + 1e-12);
      }
    }
  }
}

TEST_CASE("permutation, monotonicity, translation properties") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  const SoftParams params(10.0, 4);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> z{u(rng), u(rng), u(rng), u(rng)};
    std::vector<double> shuffled = z;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(cbf::softmin(params, z) == doctest::Approx(cbf::softmin(params, shuffled)));
    CHECK(cbf::softmax(params, z) == doctest::Approx(cbf::softmax(params, shuffled)));

    // Raising one argument must not decrease either function.
    std::vector<double> raised = z;
    raised[rep % 4] += 0.7;
    CHECK(cbf::softmin(params, raised) >= cbf::softmin(params, z) - 1e-12);
    CHECK(cbf::softmax(params, raised) >= cbf::softmax(params, z) - 1e-12);

    const double c = u(rng);
    std::vector<double> shifted = z;
    for (double& zi : shifted) zi += c;
    CHECK(cbf::softmin(params, shifted) ==
          doctest::Approx(cbf::softmin(params, z) + c).epsilon(1e-12));
    CHECK(cbf::softmax(params, shifted) ==
          doctest::Approx(cbf::softmax(params, z) + c).epsilon(1e-12));
  }
}

TEST_CASE("stability for large magnitudes") {
  const std::vector<double> z{1e6, -1e6, 5e5};
  CHECK(std::isfinite(cbf::softmin(SoftParams(100.0, 3), z)));
  CHECK(std::isfinite(cbf::softmax(SoftParams(100.0, 3), z)));
  CHECK(cbf::softmin(SoftParams(100.0, 3), z) == doctest::Approx(-1e6));
  CHECK(cbf::softmax(SoftParams(100.0, 3), z) == doctest::Approx(1e6));
}

TEST_CASE("jet identity and symmetric-weight cases") {
  std::mt19937 rng(3);
  const Jet2 j = random_jet(rng, 3);
  std::vector<Jet2> one{j};
  for (auto fn : {cbf::softmin_jet, cbf::softmax_jet}) {
    const Jet2 out = fn(SoftParams(20.0, 1), one);
    CHECK(out.value == doctest::Approx(j.value));
    CHECK((out.grad - j.grad).norm() == doctest::Approx(0.0));
    CHECK((out.hess - j.hess).norm() == doctest::Approx(0.0));
  }

  Jet2 a = random_jet(rng, 3);
  Jet2 b = random_jet(rng, 3);
  b.value = a.value;  // equal values -> weights 1/2 each
  std::vector<Jet2> two{a, b};
  const Jet2 mi = cbf::softmin_jet(SoftParams(20.0, 2), two);
  CHECK((mi.grad - 0.5 * (a.grad + b.grad)).norm() == doctest::Approx(0.0));
  const Jet2 ma = cbf::softmax_jet(SoftParams(20.0, 2), two);
  CHECK((ma.grad - 0.5 * (a.grad + b.grad)).norm() == doctest::Approx(0.0));
}

TEST_CASE("jet matches finite differences of the scalar function") {
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int dim = 3;
  const SoftParams params(8.0, 4);

  // Arguments are quadratic fields z_i(x) = v_i + g_i.x + 0.5 x^T H_i x so
  // their exact jets at any x are available in closed form.
  std::vector<Jet2> bases;
  for (int i = 0; i < 4; ++i) bases.push_back(random_jet(rng, dim));

  auto args_at = [&](const Eigen::VectorXd& x) {
    std::vector<Jet2> out;
    for (const Jet2& b : bases) {
      Jet2 j(dim);
      j.value = b.value + b.grad.dot(x) + 0.5 * x.dot(b.hess * x);
      j.grad = b.grad + b.hess * x;
      j.hess = b.hess;
      out.push_back(std::move(j));
    }
    return out;
  };

  for (bool use_max : {false, true}) {
    auto field = [&](const Eigen::VectorXd& x) {
      std::vector<double> z;
      for (const Jet2& j : args_at(x)) z.push_back(j.value);
      return use_max ? cbf::softmax(params, z) : cbf::softmin(params, z);
    };
    for (int rep = 0; rep < 20; ++rep) {
      Eigen::VectorXd x(dim);
      for (int i = 0; i < dim; ++i) x(i) = u(rng);
      const std::vector<Jet2> args = args_at(x);
      const Jet2 out =
          use_max ? cbf::softmax_jet(params, args) : cbf::softmin_jet(params, args);
      CHECK(out.value == doctest::Approx(field(x)).epsilon(1e-12));
      const Eigen::VectorXd gfd = oracles::fd_gradient(field, x);
      CHECK((Eigen::VectorXd(out.grad) - gfd).norm() <=
            1e-6 * std::max(1.0, gfd.norm()));
      const Eigen::MatrixXd hfd = oracles::fd_hessian(field, x);
      CHECK((Eigen::MatrixXd(out.hess) - hfd).norm() <=
            1e-5 * std::max(1.0, hfd.norm()));
    }
  }
}

TEST_CASE("jet dimension mismatch rejected") {
  std::mt19937 rng(5);
  std::vector<Jet2> bad{random_jet(rng, 2), random_jet(rng, 3)};
  CHECK_THROWS_AS(cbf::softmin_jet(SoftParams(10.0, 2), bad), std::invalid_argument);
}
