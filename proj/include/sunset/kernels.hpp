#pragma once

// Data-parallel inner loops used by matching, diversity and topic modelling.
//
// Each kernel has a scalar reference implementation and an AVX2 variant.
// The variant is chosen once at startup from CPUID; SUNSET_SIMD=scalar in the
// environment (or force_isa) pins the scalar path. Element-wise kernels are
// bit-identical across variants; reductions (dot, squared_norm) may differ in
// the last few ulps because the lanes are summed in a different order.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace sunset::kernels {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*squared_norm)(const double* a, std::size_t n);
    void (*scale)(double* a, std::size_t n, double factor);
    /// First offset of needle in haystack, or SIZE_MAX.
    std::size_t (*find)(const char* hay, std::size_t n, const char* needle, std::size_t m);
    /// out[t] = (doc_topic[t] + alpha) * (word_topic[t] + beta) / (topic_total[t] + vbeta)
    void (*gibbs_weights)(const std::int32_t* doc_topic, const std::int32_t* word_topic,
                          const std::int32_t* topic_total, std::size_t k, double alpha,
                          double beta, double vbeta, double* out);
};

[[nodiscard]] bool isa_supported(Isa isa) noexcept;
[[nodiscard]] const KernelTable& table(Isa isa);
[[nodiscard]] Isa active_isa() noexcept;
[[nodiscard]] const char* isa_name(Isa isa) noexcept;

/// Pin the dispatch target (tests and benchmarks). Unsupported targets fall
/// back to scalar.
void force_isa(Isa isa) noexcept;

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);
void scale(std::span<double> a, double factor);
/// Cosine similarity; 0 when either vector has zero norm.
double cosine(std::span<const double> a, std::span<const double> b);
std::size_t find(std::string_view haystack, std::string_view needle);
void gibbs_weights(std::span<const std::int32_t> doc_topic, std::span<const std::int32_t> word_topic,
                   std::span<const std::int32_t> topic_total, double alpha, double beta,
                   double vbeta, std::span<double> out);

}  // namespace sunset::kernels
