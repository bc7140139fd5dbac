// Compiled with -mavx2 only; callers reach these through the dispatch table
// after a CPUID check.

#include "kernels_impl.hpp"

#include <immintrin.h>

#include <cstring>

namespace sunset::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
        acc2 = _mm256_add_pd(acc2, _mm256_mul_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8)));
        acc3 = _mm256_add_pd(acc3, _mm256_mul_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12)));
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    }
    double acc = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double squared_norm(const double* a, std::size_t n) {
    return dot(a, a, n);
}

void scale(double* a, std::size_t n, double factor) {
    const __m256d f = _mm256_set1_pd(factor);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(a + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), f));
    for (; i < n; ++i) a[i] *= factor;
}

// First/last byte filter: compare 32 candidate start positions at once
// against the needle's first and last byte, then memcmp the survivors.
std::size_t find(const char* hay, std::size_t n, const char* needle, std::size_t m) {
    if (m == 0) return 0;
    if (m > n) return static_cast<std::size_t>(-1);
    const __m256i first = _mm256_set1_epi8(needle[0]);
    const __m256i last = _mm256_set1_epi8(needle[m - 1]);
    std::size_t i = 0;
    for (; i + m + 31 <= n; i += 32) {
        const __m256i block_first = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(hay + i));
        const __m256i block_last =
            _mm256_loadu_si256(reinterpret_cast<const __m256i*>(hay + i + m - 1));
        const __m256i eq = _mm256_and_si256(_mm256_cmpeq_epi8(first, block_first),
                                            _mm256_cmpeq_epi8(last, block_last));
        auto mask = static_cast<std::uint32_t>(_mm256_movemask_epi8(eq));
        while (mask != 0) {
            const auto bit = static_cast<std::size_t>(__builtin_ctz(mask));
            if (std::memcmp(hay + i + bit, needle, m) == 0) return i + bit;
            mask &= mask - 1;
        }
    }
    for (; i + m <= n; ++i) {
        if (hay[i] == needle[0] && std::memcmp(hay + i, needle, m) == 0) return i;
    }
    return static_cast<std::size_t>(-1);
}

void gibbs_weights(const std::int32_t* doc_topic, const std::int32_t* word_topic,
                   const std::int32_t* topic_total, std::size_t k, double alpha, double beta,
                   double vbeta, double* out) {
    const __m256d va = _mm256_set1_pd(alpha);
    const __m256d vb = _mm256_set1_pd(beta);
    const __m256d vz = _mm256_set1_pd(vbeta);
    std::size_t t = 0;
    for (; t + 4 <= k; t += 4) {
        const __m256d d = _mm256_add_pd(
            _mm256_cvtepi32_pd(_mm_loadu_si128(reinterpret_cast<const __m128i*>(doc_topic + t))), va);
        const __m256d w = _mm256_add_pd(
            _mm256_cvtepi32_pd(_mm_loadu_si128(reinterpret_cast<const __m128i*>(word_topic + t))), vb);
        const __m256d z = _mm256_add_pd(
            _mm256_cvtepi32_pd(_mm_loadu_si128(reinterpret_cast<const __m128i*>(topic_total + t))), vz);
        _mm256_storeu_pd(out + t, _mm256_div_pd(_mm256_mul_pd(d, w), z));
    }
    for (; t < k; ++t) {
        const double d = static_cast<double>(doc_topic[t]) + alpha;
        const double w = static_cast<double>(word_topic[t]) + beta;
        const double z = static_cast<double>(topic_total[t]) + vbeta;
        out[t] = d * w / z;
    }
}

}  // namespace sunset::kernels::avx2
