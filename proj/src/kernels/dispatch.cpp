#include "sunset/kernels.hpp"

#include "kernels_impl.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace sunset::kernels {

namespace {

constexpr KernelTable kScalar{
    &scalar::dot, &scalar::squared_norm, &scalar::scale, &scalar::find, &scalar::gibbs_weights,
};

#if defined(SUNSET_HAVE_AVX2)
constexpr KernelTable kAvx2{
    &avx2::dot, &avx2::squared_norm, &avx2::scale, &avx2::find, &avx2::gibbs_weights,
};
#endif

Isa detect() noexcept {
    if (const char* env = std::getenv("SUNSET_SIMD"); env != nullptr && std::strcmp(env, "scalar") == 0) {
        return Isa::Scalar;
    }
    return isa_supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{detect()};
    return isa;
}

}  // namespace

bool isa_supported(Isa isa) noexcept {
    switch (isa) {
    case Isa::Scalar:
        return true;
    case Isa::Avx2:
#if defined(SUNSET_HAVE_AVX2)
        return __builtin_cpu_supports("avx2") != 0;
#else
        return false;
#endif
    }
    return false;
}

const KernelTable& table(Isa isa) {
#if defined(SUNSET_HAVE_AVX2)
    if (isa == Isa::Avx2 && isa_supported(Isa::Avx2)) return kAvx2;
#endif
    if (isa == Isa::Scalar) return kScalar;
    throw std::invalid_argument("kernel variant not available on this CPU");
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

const char* isa_name(Isa isa) noexcept {
    return isa == Isa::Avx2 ? "avx2" : "scalar";
}

void force_isa(Isa isa) noexcept {
    current().store(isa_supported(isa) ? isa : Isa::Scalar, std::memory_order_relaxed);
}

namespace {
const KernelTable& active() { return table(active_isa()); }
}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    return active().dot(a.data(), b.data(), a.size());
}

double squared_norm(std::span<const double> a) {
    return active().squared_norm(a.data(), a.size());
}

void scale(std::span<double> a, double factor) {
    active().scale(a.data(), a.size(), factor);
}

double cosine(std::span<const double> a, std::span<const double> b) {
    const double na = squared_norm(a);
    const double nb = squared_norm(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot(a, b) / (std::sqrt(na) * std::sqrt(nb));
}

std::size_t find(std::string_view haystack, std::string_view needle) {
    return active().find(haystack.data(), haystack.size(), needle.data(), needle.size());
}

void gibbs_weights(std::span<const std::int32_t> doc_topic, std::span<const std::int32_t> word_topic,
                   std::span<const std::int32_t> topic_total, double alpha, double beta,
                   double vbeta, std::span<double> out) {
    const std::size_t k = out.size();
    if (doc_topic.size() != k || word_topic.size() != k || topic_total.size() != k) {
        throw std::invalid_argument("gibbs_weights: length mismatch");
    }
    active().gibbs_weights(doc_topic.data(), word_topic.data(), topic_total.data(), k, alpha, beta,
                           vbeta, out.data());
}

}  // namespace sunset::kernels
