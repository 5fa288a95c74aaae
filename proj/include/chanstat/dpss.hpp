#pragma once

#include <cstddef>
#include <vector>

#include "chanstat/types.hpp"

namespace chanstat {

// Discrete prolate spheroidal sequences for one axis.
struct DpssSet {
    std::size_t length = 0;              // n
    double half_bandwidth_product = 0;   // a, with W = a/n
    RMat tapers;                         // k x n, rows unit-energy, sign-canonical
    std::vector<double> concentrations;  // in-band energy fractions, descending
};

// Computes the k most concentrated sequences of length n for half-bandwidth
// product a.  Sequences are eigenvectors of the symmetric tridiagonal Slepian
// matrix; concentrations are the spectral energy fractions inside |f| <= a/n.
// Each taper is scaled so its first element of magnitude above 1e-8 is
// positive.  Requires 2 <= n, 0 < a <= n/2, 1 <= k <= n.
DpssSet dpss(std::size_t n, double a, std::size_t k);

// Separable 2-D taper family: windows[w] = outer(u_i, v_j) with w = i*J + j.
struct TaperGrid {
    std::size_t n = 0;             // time extent of each window
    std::size_t m = 0;             // frequency extent
    RMat time_tapers;              // I x n
    RMat freq_tapers;              // J x m
    std::vector<RMat> windows;     // I*J matrices, n x m, unit Frobenius norm

    std::size_t count() const { return windows.size(); }
};

TaperGrid taper_grid(const DpssSet& time_set, const DpssSet& freq_set);

}  // namespace chanstat
