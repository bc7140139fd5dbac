#pragma once

#include <cstddef>
#include <cstdint>

namespace sunset::kernels {

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double squared_norm(const double* a, std::size_t n);
void scale(double* a, std::size_t n, double factor);
std::size_t find(const char* hay, std::size_t n, const char* needle, std::size_t m);
void gibbs_weights(const std::int32_t* doc_topic, const std::int32_t* word_topic,
                   const std::int32_t* topic_total, std::size_t k, double alpha, double beta,
                   double vbeta, double* out);
}  // namespace scalar

#if defined(SUNSET_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double squared_norm(const double* a, std::size_t n);
void scale(double* a, std::size_t n, double factor);
std::size_t find(const char* hay, std::size_t n, const char* needle, std::size_t m);
void gibbs_weights(const std::int32_t* doc_topic, const std::int32_t* word_topic,
                   const std::int32_t* topic_total, std::size_t k, double alpha, double beta,
                   double vbeta, double* out);
}  // namespace avx2
#endif

}  // namespace sunset::kernels
