#pragma once

// Chart dimensions, sample boxes, and the deterministic sampler.
//
// A chart carries the two fibre ranks (k1, k2); the base dimension is
// n = 2*k1 + 1 and the fibre dimension m = 2*k2 + 1, both odd, so the total
// space dimension is even. All "holds at sample points" contracts refer to
// points drawn from a user-declared box with a user-declared seed through
// splitmix64, which is portable across platforms.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "expr.hpp"

namespace pacfin {

struct Chart {
    int k1 = 0, k2 = 0;

    int n() const { return 2 * k1 + 1; }  // horizontal dimension
    int m() const { return 2 * k2 + 1; }  // vertical dimension
    int dim() const { return n() + m(); }

    void validate() const {
        if (k1 < 0 || k2 < 0) throw std::invalid_argument("chart ranks must be nonnegative");
    }
};

struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform01() { return double(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    int below(int n) { return int(next() % std::uint64_t(n)); }
};

struct SampleBox {
    std::vector<std::array<double, 2>> x, y;  // per-variable [lo, hi]

    static SampleBox cube(const Chart& c, double lo, double hi) {
        SampleBox b;
        b.x.assign(std::size_t(c.n()), {lo, hi});
        b.y.assign(std::size_t(c.m()), {lo, hi});
        return b;
    }
};

inline std::vector<Point> sample_points(const SampleBox& box, int count, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<Point> pts;
    pts.reserve(std::size_t(count));
    for (int s = 0; s < count; ++s) {
        Point p;
        p.x.reserve(box.x.size());
        p.y.reserve(box.y.size());
        for (const auto& r : box.x) p.x.push_back(rng.uniform(r[0], r[1]));
        for (const auto& r : box.y) p.y.push_back(rng.uniform(r[0], r[1]));
        pts.push_back(std::move(p));
    }
    return pts;
}

// Random polynomial in the chart variables, used for oracle tests and for
// the spanning test-field sets. Degree and term count stay small so that
// nested derivatives remain cheap.
inline Expr random_polynomial(SplitMix64& rng, int nx, int ny, int max_degree, int terms) {
    Expr sum = Expr::constant(0.0);
    for (int t = 0; t < terms; ++t) {
        Expr mono = Expr::constant(rng.uniform(-1.0, 1.0));
        int deg = rng.below(max_degree + 1);
        for (int d = 0; d < deg; ++d) {
            int pick = rng.below(nx + ny);
            mono = mono * (pick < nx ? Expr::x(pick) : Expr::y(pick - nx));
        }
        sum = sum + mono;
    }
    return sum;
}

}  // namespace pacfin
