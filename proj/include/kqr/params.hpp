#pragma once

#include <cstdint>
#include <stdexcept>

#include "kqr/rational.hpp"

namespace kqr {

/// Search limits. All limits are node/attempt counts so that exhausting a
/// budget is deterministic for a given seed.
struct Budget {
    std::int64_t max_nodes = 2'000'000;  // backtracking nodes per solve
    int restarts = 8;                    // randomized restarts (nibble, greedy)
    int candidates = 8;                  // candidate decompositions per group
    int retries = 64;                    // global pipeline retries
};

/// The numeric knobs the hierarchies leave symbolic, as explicit values.
struct ParamSet {
    int q = 3;
    int r = 2;
    int lambda = 1;

    Rational eps = Rational(1, 100);
    Rational xi = Rational(1, 10);
    Rational d = Rational(0);          // 0 = measure from the input
    Rational mu = Rational(1, 2);
    Rational rho = Rational(1, 4);
    Rational rho_size = Rational(1, 2);
    Rational gamma = Rational(1, 10);
    Rational nu = Rational(1, 2);  // cover-down reserve density

    std::uint64_t seed = 0;
    Budget budget;
    int threads = 1;

    void validate() const {
        if (!(q > r && r >= 1)) throw std::invalid_argument("ParamSet: need q > r >= 1");
        if (lambda < 1) throw std::invalid_argument("ParamSet: need lambda >= 1");
        for (const Rational* x : {&eps, &xi, &d, &mu, &rho, &rho_size, &gamma, &nu}) {
            if (*x < Rational(0) || *x > Rational(1))
                throw std::invalid_argument("ParamSet: rational knob outside [0,1]");
        }
    }
};

}  // namespace kqr
