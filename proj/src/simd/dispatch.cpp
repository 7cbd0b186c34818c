// Copyright 2026-present the homodyne project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <atomic>
#include <string>

#include "homodyne/error.hpp"
#include "kernels.hpp"

namespace homodyne::simd {
namespace {

bool cpu_has(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if defined(HOMODYNE_HAVE_AVX2)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Isa::neon:
#if defined(HOMODYNE_HAVE_NEON)
            return true;  // mandatory on aarch64
#else
            return false;
#endif
    }
    return false;
}

std::atomic<const KernelTable*>& forced() {
    static std::atomic<const KernelTable*> table{nullptr};
    return table;
}

}  // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "unknown";
}

const KernelTable* kernels_for(Isa isa) {
    if (!cpu_has(isa)) return nullptr;
    switch (isa) {
        case Isa::scalar: return &scalar_kernels();
#if defined(HOMODYNE_HAVE_AVX2)
        case Isa::avx2: return &detail::avx2_kernels();
#endif
#if defined(HOMODYNE_HAVE_NEON)
        case Isa::neon: return &detail::neon_kernels();
#endif
        default: return nullptr;
    }
}

std::vector<Isa> available_isas() {
    std::vector<Isa> out;
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
        if (kernels_for(isa)) out.push_back(isa);
    return out;
}

const KernelTable& active_kernels() {
    if (const KernelTable* f = forced().load(std::memory_order_acquire)) return *f;
    static const KernelTable* best = [] {
        const KernelTable* t = &scalar_kernels();
        for (Isa isa : available_isas()) t = kernels_for(isa);
        return t;
    }();
    return *best;
}

void force_isa(Isa isa) {
    const KernelTable* t = kernels_for(isa);
    if (!t) throw UsageError("instruction set not available: " + std::string(isa_name(isa)));
    forced().store(t, std::memory_order_release);
}

}  // namespace homodyne::simd
