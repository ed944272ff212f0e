#pragma once

#include <cstdint>
#include <span>
#include <string_view>

// Data-parallel inner loops used by the network and the distance functions.
//
// Every kernel has a portable scalar reference and, on x86-64, an AVX2 variant.
// The variant is picked once at first use from CPUID; setting
// EMBEDKEY_KERNELS=scalar in the environment forces the reference path.
// Floating-point variants may differ from the reference in the last bits
// because the summation order differs; the Hamming kernel is exact.

namespace embedkey::kernels {

struct KernelTable {
    std::string_view name;
    double (*dot)(const double* a, const double* b, std::size_t n);
    /// y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    /// sum (a_i - b_i)^2
    double (*dist2)(const double* a, const double* b, std::size_t n);
    /// popcount(a xor b) over n bytes
    std::uint64_t (*hamming)(const std::uint8_t* a, const std::uint8_t* b, std::size_t n);
};

const KernelTable& scalar_table();
/// nullptr when the binary or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();
const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b)
{
    return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y)
{
    active().axpy(alpha, x.data(), y.data(), x.size());
}

inline double dist2(std::span<const double> a, std::span<const double> b)
{
    return active().dist2(a.data(), b.data(), a.size());
}

inline std::uint64_t hamming(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b)
{
    return active().hamming(a.data(), b.data(), a.size());
}

} // namespace embedkey::kernels
