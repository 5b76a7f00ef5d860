// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "pcct/error.hpp"
#include "pcct/sampling.hpp"

using namespace pcct::sampling;
using pcct::orthobasis::Distribution;

TEST_SUITE("sampling") {
  TEST_CASE("latin hypercube puts one point in every stratum of every column") {
    const std::size_t n = 37;
    const auto d = lhs_unit(n, 4, 99);
    REQUIRE(d.rows() == static_cast<Eigen::Index>(n));
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      std::set<long> strata;
      for (Eigen::Index i = 0; i < d.rows(); ++i) {
        const double u = d.unit(i, j);
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        strata.insert(static_cast<long>(std::floor(u * static_cast<double>(n))));
      }
      CHECK(strata.size() == n);
    }
  }

  TEST_CASE("designs are reproducible and seed dependent") {
    CHECK(lhs_unit(20, 3, 5).unit == lhs_unit(20, 3, 5).unit);
    CHECK(lhs_unit(20, 3, 5).unit != lhs_unit(20, 3, 6).unit);
    CHECK(random_unit(20, 3, 5).unit == random_unit(20, 3, 5).unit);
    // Row streams do not depend on the total number of rows.
    CHECK(random_unit(8, 3, 5).unit == random_unit(20, 3, 5).unit.topRows(8));
    CHECK(derive_seed(1, 2) != derive_seed(1, 3));
    CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  }

  TEST_CASE("redraws stay inside the original strata") {
    const std::size_t n = 10;
    const auto d = lhs_unit(n, 3, 17);
    for (int attempt = 1; attempt <= 3; ++attempt) {
      const auto row = redraw_in_strata(d, 4, attempt);
      for (Eigen::Index j = 0; j < 3; ++j) {
        CHECK(std::floor(row[j] * 10.0) == std::floor(d.unit(4, j) * 10.0));
      }
    }
    CHECK(redraw_in_strata(d, 4, 1) != redraw_in_strata(d, 4, 2));
  }

  TEST_CASE("inverse CDFs") {
    CHECK(inverse_cdf(Distribution::gaussian(0, 1), 0.975) == doctest::Approx(1.959963984540054));
    CHECK(inverse_cdf(Distribution::gaussian(2, 3), 0.5) == doctest::Approx(2.0));
    CHECK(inverse_cdf(Distribution::uniform(-1, 3), 0.25) == doctest::Approx(0.0));
    // Exponential with rate 2: median ln 2 / 2.
    CHECK(inverse_cdf(Distribution::gamma(1, 2), 0.5) == doctest::Approx(std::log(2.0) / 2.0));
    CHECK(inverse_cdf(Distribution::beta(1, 1, 0, 10), 0.3) == doctest::Approx(3.0));
    CHECK(inverse_cdf(Distribution::point_mass(4.5), 0.9) == 4.5);
    CHECK_THROWS_AS((void)inverse_cdf(Distribution::gaussian(0, 1), 0.0), pcct::Error);
    CHECK_THROWS_AS((void)inverse_cdf(Distribution::gaussian(0, 1), 1.5), pcct::Error);
  }

  TEST_CASE("materialize maps columns through their marginals") {
    const auto d = lhs_unit(1000, 2, 3);
    const std::vector<Distribution> dists{Distribution::gaussian(10, 2), Distribution::uniform(0, 1)};
    const auto x = materialize(d, dists);
    CHECK(x.col(0).mean() == doctest::Approx(10.0).epsilon(1e-3));
    CHECK(x.col(1).minCoeff() >= 0.0);
    CHECK(x.col(1).maxCoeff() <= 1.0);
    CHECK(materialize_row(d.unit.row(7), dists) == x.row(7));
  }

  TEST_CASE("uniform stream statistics") {
    Rng rng(123, {4, 5});
    double sum = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += rng.uniform_open();
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
    Rng r2(1);
    for (int i = 0; i < 1000; ++i) CHECK(r2.below(7) < 7);
  }
}
