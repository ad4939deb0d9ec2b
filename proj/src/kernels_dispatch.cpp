// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <string>

#include "conewalk/common.hpp"
#include "conewalk/kernels.hpp"

namespace conewalk::kern {

namespace {

Ops const* g_active = nullptr;

Ops const* resolve(Backend b)
{
    switch (b) {
        case Backend::Scalar:
            return &scalar_ops();
        case Backend::Avx2:
#if defined(CONEWALK_HAVE_AVX2)
            if (avx2_supported())
                return &avx2_ops();
#endif
            throw ValidationError("avx2 backend requested but not available");
        case Backend::Auto:
        default:
#if defined(CONEWALK_HAVE_AVX2)
            if (avx2_supported())
                return &avx2_ops();
#endif
            return &scalar_ops();
    }
}

Ops const* init_from_env()
{
    char const* env = std::getenv("CONEWALK_BACKEND");
    if (env == nullptr)
        return resolve(Backend::Auto);
    std::string v(env);
    if (v == "scalar")
        return resolve(Backend::Scalar);
    if (v == "avx2")
        return resolve(Backend::Avx2);
    if (v == "auto" || v.empty())
        return resolve(Backend::Auto);
    throw ValidationError("unknown CONEWALK_BACKEND value: " + v);
}

}  // namespace

bool avx2_supported()
{
#if defined(CONEWALK_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

Ops const& ops()
{
    if (g_active == nullptr)
        g_active = init_from_env();
    return *g_active;
}

void set_backend(Backend b)
{
    g_active = resolve(b);
}

char const* backend_name()
{
    return ops().name;
}

}  // namespace conewalk::kern
