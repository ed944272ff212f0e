#include "kernels_impl.hpp"

#include <bit>
#include <cstring>

namespace embedkey::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n)
{
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double dist2(const double* a, const double* b, std::size_t n)
{
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

std::uint64_t hamming(const std::uint8_t* a, const std::uint8_t* b, std::size_t n)
{
    std::uint64_t count = 0;
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        std::uint64_t wa, wb;
        std::memcpy(&wa, a + i, 8);
        std::memcpy(&wb, b + i, 8);
        count += std::uint64_t(std::popcount(wa ^ wb));
    }
    for (; i < n; ++i) count += std::uint64_t(std::popcount(std::uint8_t(a[i] ^ b[i])));
    return count;
}

} // namespace embedkey::kernels::scalar
