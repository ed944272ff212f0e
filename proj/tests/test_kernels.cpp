#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdlib>
#include <string_view>
#include <random>
#include <vector>

#include "embedkey/kernels.hpp"

using namespace embedkey::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n)
{
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

double naive_dot(const std::vector<double>& a, const std::vector<double>& b)
{
    long double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (long double)a[i] * b[i];
    return double(s);
}

} // namespace

TEST_SUITE("kernels")
{
    TEST_CASE("scalar reference matches naive loops")
    {
        const KernelTable& k = scalar_table();
        std::mt19937_64 rng(1);
        for (std::size_t n = 0; n < 68; ++n) {
            auto a = random_vec(rng, n), b = random_vec(rng, n);
            CHECK(k.dot(a.data(), b.data(), n) == doctest::Approx(naive_dot(a, b)).epsilon(1e-12));
            double d2 = 0;
            for (std::size_t i = 0; i < n; ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
            CHECK(k.dist2(a.data(), b.data(), n) == doctest::Approx(d2).epsilon(1e-12));
            auto y = b;
            k.axpy(0.75, a.data(), y.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == b[i] + 0.75 * a[i]);

            std::vector<std::uint8_t> p(n), q(n);
            std::uint64_t bits = 0;
            for (std::size_t i = 0; i < n; ++i) {
                p[i] = std::uint8_t(rng());
                q[i] = std::uint8_t(rng());
                bits += std::popcount(std::uint8_t(p[i] ^ q[i]));
            }
            CHECK(k.hamming(p.data(), q.data(), n) == bits);
        }
    }

    TEST_CASE("AVX2 variant agrees with the scalar reference")
    {
        const KernelTable* v = avx2_table();
        if (v == nullptr) {
            MESSAGE("AVX2 not available; skipping");
            return;
        }
        const KernelTable& s = scalar_table();
        std::mt19937_64 rng(2);
        for (std::size_t n = 0; n < 68; ++n) {
            for (int rep = 0; rep < 5; ++rep) {
                auto a = random_vec(rng, n), b = random_vec(rng, n);
                double scale = 0;
                for (std::size_t i = 0; i < n; ++i) scale += std::fabs(a[i] * b[i]);
                CHECK(std::fabs(v->dot(a.data(), b.data(), n) - s.dot(a.data(), b.data(), n)) <= 1e-14 * (scale + 1));
                double d2 = s.dist2(a.data(), b.data(), n);
                CHECK(std::fabs(v->dist2(a.data(), b.data(), n) - d2) <= 1e-14 * (d2 + 1));

                auto y1 = b, y2 = b;
                s.axpy(-1.25, a.data(), y1.data(), n);
                v->axpy(-1.25, a.data(), y2.data(), n);
                for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(y1[i] - y2[i]) <= 1e-15 * (std::fabs(y1[i]) + 1));

                std::vector<std::uint8_t> p(n), q(n);
                for (std::size_t i = 0; i < n; ++i) {
                    p[i] = std::uint8_t(rng());
                    q[i] = std::uint8_t(rng());
                }
                CHECK(v->hamming(p.data(), q.data(), n) == s.hamming(p.data(), q.data(), n));
            }
        }
        // Large buffers exercise the blocked popcount path.
        std::vector<std::uint8_t> p(4099), q(4099);
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = std::uint8_t(rng());
            q[i] = std::uint8_t(~p[i]);
        }
        CHECK(v->hamming(p.data(), q.data(), p.size()) == 4099u * 8u);
    }

    TEST_CASE("active table is one of the two")
    {
        const KernelTable& a = active();
        CHECK((&a == &scalar_table() || &a == avx2_table()));
        const char* forced = std::getenv("EMBEDKEY_KERNELS");
        if (forced != nullptr && std::string_view(forced) == "scalar") CHECK(&a == &scalar_table());
        MESSAGE("active kernels: " << a.name);
    }
}
