#include "bird/kernels.hpp"

#include <atomic>

namespace bird::kernels {

namespace {

constexpr Ops kScalarOps{Lane::scalar, detail::dot_scalar, detail::dot_batch_scalar};

#if defined(__x86_64__) || defined(_M_X64)
constexpr Ops kAvx2Ops{Lane::avx2, detail::dot_avx2, detail::dot_batch_avx2};

bool cpu_has_avx2() {
    return __builtin_cpu_supports("avx2") != 0;
}
#endif

#if defined(__aarch64__)
constexpr Ops kNeonOps{Lane::neon, detail::dot_neon, detail::dot_batch_neon};
#endif

const Ops* find_ops(Lane lane) {
    switch (lane) {
        case Lane::scalar:
            return &kScalarOps;
        case Lane::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            if (cpu_has_avx2()) return &kAvx2Ops;
#endif
            return nullptr;
        case Lane::neon:
#if defined(__aarch64__)
            return &kNeonOps;
#else
            return nullptr;
#endif
    }
    return nullptr;
}

const Ops* detect_best() {
#if defined(__aarch64__)
    return &kNeonOps;
#elif defined(__x86_64__) || defined(_M_X64)
    if (cpu_has_avx2()) return &kAvx2Ops;
    return &kScalarOps;
#else
    return &kScalarOps;
#endif
}

std::atomic<const Ops*> g_active{nullptr};

}  // namespace

const Ops& active() noexcept {
    const Ops* ops = g_active.load(std::memory_order_acquire);
    if (!ops) {
        ops = detect_best();
        g_active.store(ops, std::memory_order_release);
    }
    return *ops;
}

std::vector<Lane> available_lanes() {
    std::vector<Lane> lanes;
    for (Lane l : {Lane::neon, Lane::avx2, Lane::scalar}) {
        if (find_ops(l)) lanes.push_back(l);
    }
    return lanes;
}

void force_lane(Lane lane) {
    const Ops* ops = find_ops(lane);
    if (!ops) {
        throw Error(Errc::invalid_input,
                    std::string("kernel lane not available on this machine: ") + to_string(lane));
    }
    g_active.store(ops, std::memory_order_release);
}

void reset_lane() {
    g_active.store(detect_best(), std::memory_order_release);
}

}  // namespace bird::kernels
