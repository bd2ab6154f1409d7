#include <cstdlib>
#include <cstring>

#include "stochldpc/kernels.hpp"

namespace stochldpc::kern {

namespace {

const Backend& select() {
    const char* env = std::getenv("STOCHLDPC_KERNELS");
    if (env && std::strcmp(env, "scalar") == 0) return scalar_backend();
    const Backend* avx2 = avx2_backend();
    if (env && std::strcmp(env, "avx2") == 0 && avx2) return *avx2;
    if (env && std::strcmp(env, "scalar") != 0 && std::strcmp(env, "avx2") != 0 &&
        std::strcmp(env, "auto") != 0)
        return scalar_backend(); // unknown value: safest choice
    return avx2 ? *avx2 : scalar_backend();
}

} // namespace

const Backend& backend() {
    static const Backend& b = select();
    return b;
}

} // namespace stochldpc::kern
