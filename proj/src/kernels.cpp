#include <cstdlib>
#include <mutex>

#include "kernels_impl.hpp"

namespace chanstat::kernels {

namespace {

const Kernels* selected = nullptr;
std::once_flag init_flag;

void init_selection() {
    const char* env = std::getenv("CHANSTAT_KERNELS");
    if (env != nullptr) {
        Backend b;
        if (parse_backend(env, b)) {
            if (b == Backend::scalar) {
                selected = scalar_table();
                return;
            }
            if (b == Backend::avx2 && host_has_avx2() && avx2_table() != nullptr) {
                selected = avx2_table();
                return;
            }
        }
        // Unusable request falls through to auto selection.
    }
    if (host_has_avx2() && avx2_table() != nullptr) {
        selected = avx2_table();
    } else {
        selected = scalar_table();
    }
}

}  // namespace

bool host_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Kernels& get(Backend b) {
    switch (b) {
        case Backend::scalar:
            return *scalar_table();
        case Backend::avx2:
            if (host_has_avx2() && avx2_table() != nullptr) return *avx2_table();
            throw ValidationError("avx2 kernels not supported on this host");
    }
    throw ValidationError("unknown kernel backend");
}

const Kernels& active() {
    std::call_once(init_flag, init_selection);
    return *selected;
}

bool select(Backend b) {
    std::call_once(init_flag, init_selection);
    if (b == Backend::scalar) {
        selected = scalar_table();
        return true;
    }
    if (b == Backend::avx2 && host_has_avx2() && avx2_table() != nullptr) {
        selected = avx2_table();
        return true;
    }
    return false;
}

std::vector<Backend> available() {
    std::vector<Backend> out{Backend::scalar};
    if (host_has_avx2() && avx2_table() != nullptr) out.push_back(Backend::avx2);
    return out;
}

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar:
            return "scalar";
        case Backend::avx2:
            return "avx2";
    }
    return "?";
}

bool parse_backend(const std::string& name, Backend& out) {
    if (name == "scalar") {
        out = Backend::scalar;
        return true;
    }
    if (name == "avx2") {
        out = Backend::avx2;
        return true;
    }
    return false;
}

}  // namespace chanstat::kernels
