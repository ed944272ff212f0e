#pragma once

#include <cstddef>
#include <cstdint>

namespace embedkey::kernels {

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double dist2(const double* a, const double* b, std::size_t n);
std::uint64_t hamming(const std::uint8_t* a, const std::uint8_t* b, std::size_t n);
} // namespace scalar

#if defined(EMBEDKEY_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double dist2(const double* a, const double* b, std::size_t n);
std::uint64_t hamming(const std::uint8_t* a, const std::uint8_t* b, std::size_t n);
} // namespace avx2
#endif

} // namespace embedkey::kernels
