#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "kqr/rational.hpp"

namespace kqr {

/// Seeded RNG wrapper. Only raw mt19937_64 draws are used (the standard
/// pins that generator bit-exactly); sampling helpers below avoid
/// std::uniform_* distributions, whose output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }

    /// Uniform in [0, n) via rejection sampling (unbiased).
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do { x = gen_(); } while (x >= limit);
        return x % n;
    }

    /// Bernoulli with exact rational probability p in [0,1].
    bool chance(const Rational& p) {
        if (p.num() <= 0) return false;
        if (p >= Rational(1)) return true;
        // x/2^64 < num/den  <=>  x*den < num*2^64
        unsigned __int128 x = gen_();
        unsigned __int128 num = static_cast<unsigned __int128>(p.num());
        unsigned __int128 den = static_cast<unsigned __int128>(p.den());
        return x * den < (num << 64);
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// Derive an independent stream for restart/worker index i.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t i) {
        // splitmix64 step on seed + golden-ratio stride
        std::uint64_t z = seed + (i + 1) * 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace kqr
