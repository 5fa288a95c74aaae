#include <doctest.h>

#include <cmath>
#include <vector>

#include "chanstat/dpss.hpp"
#include "oracles.hpp"
#include "util.hpp"

using namespace chanstat;

namespace {

double inner(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

}  // namespace

TEST_CASE("shortest sequence is the closed form") {
    const DpssSet set = dpss(2, 0.5, 1);
    REQUIRE(set.tapers.rows() == 1);
    REQUIRE(set.tapers.cols() == 2);
    CHECK(set.tapers(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(set.tapers(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("tapers are orthonormal with descending concentrations") {
    for (std::size_t n : {16, 30, 64}) {
        const DpssSet set = dpss(n, 2.0, 4);
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < 4; ++j) {
                const double want = i == j ? 1.0 : 0.0;
                CHECK(std::abs(inner(set.tapers.row(i), set.tapers.row(j), n) - want) <
                      1e-10);
            }
        }
        for (std::size_t i = 1; i < 4; ++i) {
            CHECK(set.concentrations[i - 1] > set.concentrations[i]);
        }
        for (double lambda : set.concentrations) {
            CHECK(lambda > 0.0);
            CHECK(lambda < 1.0);
        }
    }
}

TEST_CASE("concentrations match an external reference implementation") {
    // Frozen from scipy.signal.windows.dpss(..., return_ratios=True).
    const struct {
        std::size_t n;
        double a;
        std::vector<double> lambdas;
    } cases[] = {
        {30, 2.0, {0.999946953780126, 0.997669837900876, 0.960226655635122, 0.722996088105041}},
        {16, 2.5, {0.999998413856241, 0.999893696582871, 0.997004936643212}},
        {64, 2.0, {0.99994369559394, 0.99758566274959, 0.959573790482457, 0.722022775142957}},
    };
    for (const auto& c : cases) {
        const DpssSet set = dpss(c.n, c.a, c.lambdas.size());
        for (std::size_t i = 0; i < c.lambdas.size(); ++i) {
            CHECK(set.concentrations[i] == doctest::Approx(c.lambdas[i]).epsilon(1e-10));
        }
    }
}

TEST_CASE("leading taper matches the external reference pointwise") {
    // Frozen from scipy.signal.windows.dpss(30, 2.0, 4): first taper, first entries.
    const DpssSet set = dpss(30, 2.0, 4);
    double sum0 = 0.0;
    for (std::size_t i = 0; i < 30; ++i) {
        sum0 += set.tapers(0, i);
    }
    CHECK(sum0 == doctest::Approx(4.52911981111675).epsilon(1e-10));
    CHECK(std::abs(set.tapers(0, 0)) == doctest::Approx(0.00810303891770783).epsilon(1e-9));
    CHECK(std::abs(set.tapers(0, 1)) == doctest::Approx(0.016741124768368).epsilon(1e-9));
    CHECK(std::abs(set.tapers(0, 2)) == doctest::Approx(0.0290090353031736).epsilon(1e-9));
}

TEST_CASE("tridiagonal route agrees with the dense kernel diagonalization") {
    for (std::size_t n : {8, 12, 16}) {
        const DpssSet fast = dpss(n, 2.0, 3);
        const oracles::TaperSet slow = oracles::dpss_dense(n, 2.0, 3);
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(fast.concentrations[k] ==
                  doctest::Approx(slow.concentrations[k]).epsilon(1e-8));
            double diff = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                diff = std::max(diff, std::abs(fast.tapers(k, i) - slow.tapers(k, i)));
            }
            CHECK(diff < 1e-8);
        }
    }
}

TEST_CASE("sign convention makes the first significant entry positive") {
    for (std::size_t n : {16, 30, 64}) {
        const DpssSet set = dpss(n, 2.5, 4);
        for (std::size_t k = 0; k < 4; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                if (std::abs(set.tapers(k, i)) > 1e-8) {
                    CHECK(set.tapers(k, i) > 0.0);
                    break;
                }
            }
        }
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(dpss(1, 0.4, 1), ValidationError);
    CHECK_THROWS_AS(dpss(16, 0.0, 2), ValidationError);
    CHECK_THROWS_AS(dpss(16, 9.0, 2), ValidationError);
    CHECK_THROWS_AS(dpss(16, 2.0, 0), ValidationError);
    CHECK_THROWS_AS(dpss(16, 2.0, 17), ValidationError);
}

TEST_CASE("taper grid forms unit-energy separable windows") {
    const DpssSet time_set = dpss(12, 2.0, 2);
    const DpssSet freq_set = dpss(9, 2.5, 2);
    const TaperGrid grid = taper_grid(time_set, freq_set);
    REQUIRE(grid.count() == 4);
    REQUIRE(grid.n == 12);
    REQUIRE(grid.m == 9);
    for (std::size_t w = 0; w < grid.count(); ++w) {
        const std::size_t i = w / 2;
        const std::size_t j = w % 2;
        double frob = 0.0;
        for (std::size_t r = 0; r < grid.n; ++r) {
            for (std::size_t c = 0; c < grid.m; ++c) {
                const double want = time_set.tapers(i, r) * freq_set.tapers(j, c);
                CHECK(grid.windows[w](r, c) == doctest::Approx(want).epsilon(1e-12));
                frob += grid.windows[w](r, c) * grid.windows[w](r, c);
            }
        }
        CHECK(frob == doctest::Approx(1.0).epsilon(1e-10));
    }
}
