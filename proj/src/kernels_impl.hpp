#pragma once

#include "chanstat/kernels.hpp"

namespace chanstat::kernels {

const Kernels* scalar_table();

// Null when the library was built without AVX2 support.
const Kernels* avx2_table();

bool host_has_avx2();

}  // namespace chanstat::kernels
