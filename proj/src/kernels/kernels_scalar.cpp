#include "kernels_impl.hpp"

#include <cstring>

namespace sunset::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double squared_norm(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
    return acc;
}

void scale(double* a, std::size_t n, double factor) {
    for (std::size_t i = 0; i < n; ++i) a[i] *= factor;
}

std::size_t find(const char* hay, std::size_t n, const char* needle, std::size_t m) {
    if (m == 0) return 0;
    if (m > n) return static_cast<std::size_t>(-1);
    const char first = needle[0];
    const std::size_t last_start = n - m;
    for (std::size_t i = 0; i <= last_start; ++i) {
        if (hay[i] == first && std::memcmp(hay + i, needle, m) == 0) return i;
    }
    return static_cast<std::size_t>(-1);
}

void gibbs_weights(const std::int32_t* doc_topic, const std::int32_t* word_topic,
                   const std::int32_t* topic_total, std::size_t k, double alpha, double beta,
                   double vbeta, double* out) {
    for (std::size_t t = 0; t < k; ++t) {
        const double d = static_cast<double>(doc_topic[t]) + alpha;
        const double w = static_cast<double>(word_topic[t]) + beta;
        const double z = static_cast<double>(topic_total[t]) + vbeta;
        out[t] = d * w / z;
    }
}

}  // namespace sunset::kernels::scalar
