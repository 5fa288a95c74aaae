#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "chanstat/types.hpp"

namespace chanstat::kernels {

enum class Backend { scalar, avx2 };

// Function table for the arithmetic hot loops.  All matrices row-major,
// complex values interleaved re/im.  Inputs must be finite; aliasing between
// output and input ranges is not allowed.
struct Kernels {
    const char* name;

    // c = a * b with a (n x k), b (k x m), c (n x m).  c is overwritten.
    void (*cgemm)(const cplx* a, const cplx* b, cplx* c,
                  std::size_t n, std::size_t k, std::size_t m);

    // acc[i] += |s[i]|^2
    void (*accumulate_mag2)(const cplx* s, double* acc, std::size_t len);

    double (*dot)(const double* a, const double* b, std::size_t len);

    double (*sum)(const double* a, std::size_t len);

    void (*scale)(double* a, std::size_t len, double factor);
};

// Table for a specific backend; throws ValidationError if this host cannot
// run it.
const Kernels& get(Backend b);

// Currently selected table.  First use picks the best supported backend,
// honouring the CHANSTAT_KERNELS environment variable ("scalar" or "avx2").
const Kernels& active();

// Force a backend; returns false (leaving the selection unchanged) if the
// host lacks support.
bool select(Backend b);

std::vector<Backend> available();

const char* backend_name(Backend b);
bool parse_backend(const std::string& name, Backend& out);

}  // namespace chanstat::kernels
