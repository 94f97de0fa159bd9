#include <cmath>
#include <vector>

#include <doctest.h>

#include "hops/kernels.hpp"
#include "oracles.hpp"

using namespace hops;

namespace {

const std::vector<std::size_t> kLengths{0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16,
                                        17, 31, 32, 33, 100, 1023};

double scale_of(const std::vector<double>& v) {
  double s = 1.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("simd variants agree with the scalar reference") {
  const auto& scalar = kern::scalar_ops();
  const auto& active = kern::ops();
  INFO("active backend: ", active.name);

  for (std::size_t n : kLengths) {
    auto a = oracle::random_vector(n, 100 + static_cast<unsigned>(n));
    auto b = oracle::random_vector(n, 200 + static_cast<unsigned>(n));

    const double ds = scalar.dot(a.data(), b.data(), n);
    const double dv = active.dot(a.data(), b.data(), n);
    CHECK(std::abs(ds - dv) <= 1e-13 * std::max(1.0, std::abs(ds)) + 1e-13 * n);

    const double ss = scalar.sum_sq(a.data(), n);
    const double sv = active.sum_sq(a.data(), n);
    CHECK(std::abs(ss - sv) <= 1e-13 * std::max(1.0, ss) + 1e-13 * n);

    auto y1 = b;
    auto y2 = b;
    scalar.axpy(0.37, a.data(), y1.data(), n);
    active.axpy(0.37, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(y1[i] - y2[i]) <= 4e-16 * (std::abs(y1[i]) + scale_of(a)));
    }

    auto s1 = a;
    auto s2 = a;
    scalar.scal(-1.75, s1.data(), n);
    active.scal(-1.75, s2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(s1[i] == s2[i]);

    auto x1 = a, x2 = a, z1 = b, z2 = b;
    const double c = std::cos(0.7), s = std::sin(0.7);
    scalar.rot(x1.data(), z1.data(), n, c, s);
    active.rot(x2.data(), z2.data(), n, c, s);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(x1[i] - x2[i]) <= 4e-16 * (std::abs(x1[i]) + 1.0));
      CHECK(std::abs(z1[i] - z2[i]) <= 4e-16 * (std::abs(z1[i]) + 1.0));
    }
  }
}

TEST_CASE("rotation preserves norms") {
  auto x = oracle::random_vector(129, 7);
  auto y = oracle::random_vector(129, 8);
  const double before = kern::sum_sq(x.data(), x.size()) + kern::sum_sq(y.data(), y.size());
  kern::rot(x.data(), y.data(), x.size(), std::cos(1.1), std::sin(1.1));
  const double after = kern::sum_sq(x.data(), x.size()) + kern::sum_sq(y.data(), y.size());
  CHECK(after == doctest::Approx(before).epsilon(1e-13));
}

TEST_CASE("backend selection") {
  const std::string original = kern::backend_name();
  CHECK(kern::set_backend("scalar"));
  CHECK(std::string(kern::backend_name()) == "scalar");
  CHECK_FALSE(kern::set_backend("never-a-backend"));
  CHECK(kern::set_backend("auto"));
  CHECK(kern::set_backend(original));
}

}  // TEST_SUITE
