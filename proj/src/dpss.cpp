#include "chanstat/dpss.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <iostream>
#include <numbers>

namespace chanstat {

namespace {

// Sign convention shared with every consumer: first element of magnitude
// above 1e-8 must be positive.
void canonicalize_sign(double* v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(v[i]) > 1e-8) {
            if (v[i] < 0.0) {
                for (std::size_t j = 0; j < n; ++j) v[j] = -v[j];
            }
            return;
        }
    }
}

// Exact in-band energy for a unit-energy sequence: the quadratic form with
// the sinc concentration kernel, sin(2 pi W (i-j)) / (pi (i-j)).
double concentration(const double* u, std::size_t n, double w) {
    using std::numbers::pi;
    double off = 0.0;
    for (std::size_t d = 1; d < n; ++d) {
        const double kern = std::sin(2.0 * pi * w * static_cast<double>(d)) /
                            (pi * static_cast<double>(d));
        double s = 0.0;
        for (std::size_t i = 0; i + d < n; ++i) s += u[i] * u[i + d];
        off += kern * s;
    }
    // Diagonal contributes 2W times the unit energy of u.
    return 2.0 * w + 2.0 * off;
}

}  // namespace

DpssSet dpss(std::size_t n, double a, std::size_t k) {
    if (n < 2) throw ValidationError("dpss: sequence length must be at least 2");
    if (k < 1 || k > n) throw ValidationError("dpss: taper count out of range");
    if (!(a > 0.0) || a > static_cast<double>(n) / 2.0) {
        throw ValidationError("dpss: half-bandwidth product out of range");
    }
    if (static_cast<double>(k) > std::floor(2.0 * a)) {
        std::cerr << "dpss: warning: requesting " << k
                  << " tapers exceeds the well-concentrated count floor(2a)="
                  << static_cast<std::size_t>(std::floor(2.0 * a)) << "\n";
    }

    using std::numbers::pi;
    const double w = a / static_cast<double>(n);
    const double c2w = std::cos(2.0 * pi * w);

    Eigen::VectorXd diag(static_cast<Eigen::Index>(n));
    Eigen::VectorXd sub(static_cast<Eigen::Index>(n - 1));
    for (std::size_t i = 0; i < n; ++i) {
        const double half = (static_cast<double>(n) - 1.0 - 2.0 * static_cast<double>(i)) / 2.0;
        diag[static_cast<Eigen::Index>(i)] = c2w * half * half;
    }
    for (std::size_t i = 1; i < n; ++i) {
        sub[static_cast<Eigen::Index>(i - 1)] =
            static_cast<double>(i) * (static_cast<double>(n) - static_cast<double>(i)) / 2.0;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw Error("dpss: tridiagonal eigensolver failed to converge");
    }

    DpssSet set;
    set.length = n;
    set.half_bandwidth_product = a;
    set.tapers = RMat(k, n);
    set.concentrations.resize(k);

    // Eigenvalues come back ascending; the most concentrated sequence sits at
    // the top of the spectrum.
    for (std::size_t order = 0; order < k; ++order) {
        const auto col = solver.eigenvectors().col(static_cast<Eigen::Index>(n - 1 - order));
        double* dst = set.tapers.row(order);
        double energy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dst[i] = col[static_cast<Eigen::Index>(i)];
            energy += dst[i] * dst[i];
        }
        const double norm = 1.0 / std::sqrt(energy);
        for (std::size_t i = 0; i < n; ++i) dst[i] *= norm;
        canonicalize_sign(dst, n);
        set.concentrations[order] = concentration(dst, n, w);
    }
    return set;
}

TaperGrid taper_grid(const DpssSet& time_set, const DpssSet& freq_set) {
    if (time_set.tapers.rows() == 0 || freq_set.tapers.rows() == 0) {
        throw ValidationError("taper_grid: empty taper set");
    }
    TaperGrid grid;
    grid.n = time_set.length;
    grid.m = freq_set.length;
    grid.time_tapers = time_set.tapers;
    grid.freq_tapers = freq_set.tapers;

    const std::size_t count_i = time_set.tapers.rows();
    const std::size_t count_j = freq_set.tapers.rows();
    grid.windows.reserve(count_i * count_j);
    for (std::size_t i = 0; i < count_i; ++i) {
        for (std::size_t j = 0; j < count_j; ++j) {
            RMat win(grid.n, grid.m);
            const double* ut = time_set.tapers.row(i);
            const double* vf = freq_set.tapers.row(j);
            for (std::size_t s = 0; s < grid.n; ++s) {
                double* row = win.row(s);
                for (std::size_t q = 0; q < grid.m; ++q) row[q] = ut[s] * vf[q];
            }
            grid.windows.push_back(std::move(win));
        }
    }
    return grid;
}

}  // namespace chanstat
