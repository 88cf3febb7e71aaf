#pragma once
// Deterministic random number utilities: a splitmix64 sequential stream, an
// index-addressable standard-normal reservoir, and label-based seed
// derivation. Everything here is platform-stable: identical seeds produce
// identical bits on any conforming implementation, which is what makes
// coupled constructions (two runs sharing the same normals) reproducible.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gffperc {

constexpr uint64_t kSplitmixGamma = 0x9e3779b97f4a7c15ull;

// Finalizer of the splitmix64 generator (Steele/Lea/Flood).
inline uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline uint64_t splitmix64(uint64_t& state) {
    state += kSplitmixGamma;
    return mix64(state);
}

// Inverse standard-normal CDF, Wichura's algorithm AS 241 (PPND16 variant),
// accurate to ~1e-16 over (0,1). Throws outside the open interval.
inline double normal_icdf(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("normal_icdf: p must lie in (0,1)");
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num =
            (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                  6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
              1.3314166789178437745e2) * r + 3.3871328727963666080e0);
        const double den =
            (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                  3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
              4.2313330701600911252e1) * r + 1.0);
        return q * num / den;
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0);
        const double den =
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
        val = num / den;
    } else {
        r -= 5.0;
        const double num =
            (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0);
        const double den =
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
        val = num / den;
    }
    return (q < 0.0) ? -val : val;
}

// Sequential pseudo-random stream. Cheap to construct; pass by reference and
// never share one stream across concurrent consumers.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() { return splitmix64(state_); }

    // Uniform on the open interval (0,1), 53 significant bits.
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_normal() { return normal_icdf(next_unit()); }

    // Unbiased uniform draw from {0, ..., bound-1}.
    uint64_t next_below(uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
        const uint64_t reject_below = (0 - bound) % bound;  // 2^64 mod bound
        uint64_t r;
        do {
            r = next_u64();
        } while (r < reject_below);
        return r % bound;
    }

  private:
    uint64_t state_;
};

// Index-addressable stream of i.i.d. standard normals: xi(i) is the i-th
// output of the splitmix64 stream pushed through the normal inverse CDF.
// Random access (rather than sequential-only state) is what lets two coupled
// constructions consume the *same* normals regardless of visit order.
class GaussianReservoir {
  public:
    explicit GaussianReservoir(uint64_t seed) : seed_(seed) {}

    uint64_t seed() const { return seed_; }

    double uniform_at(uint64_t index) const {
        const uint64_t bits = mix64(seed_ + (index + 1) * kSplitmixGamma);
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    double xi(uint64_t index) const { return normal_icdf(uniform_at(index)); }

  private:
    uint64_t seed_;
};

// FNV-1a over the master seed and length-prefixed labels. Stable across
// platforms; used to give every (experiment, n, replica, ...) coordinate its
// own independent stream so results do not depend on execution order.
inline uint64_t derive_seed(uint64_t master, std::initializer_list<std::string_view> labels) {
    uint64_t h = 0xcbf29ce484222325ull;
    auto feed = [&h](const unsigned char* data, size_t len) {
        for (size_t i = 0; i < len; ++i) {
            h ^= data[i];
            h *= 0x100000001b3ull;
        }
    };
    auto feed_u64 = [&](uint64_t v) {
        unsigned char bytes[8];
        for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
        feed(bytes, 8);
    };
    feed_u64(master);
    for (std::string_view label : labels) {
        feed_u64(label.size());
        feed(reinterpret_cast<const unsigned char*>(label.data()), label.size());
    }
    return h;
}

inline uint64_t derive_seed(uint64_t master, std::string_view label, uint64_t index) {
    return derive_seed(master, {label, std::to_string(index)});
}

}  // namespace gffperc
