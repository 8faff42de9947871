#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string>
#include <string_view>

namespace irg {

// 128-bit base seed, written as up to 32 hex digits.
struct Seed {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;

    static Seed parse(std::string_view text);
    std::string hex() const;

    friend bool operator==(const Seed&, const Seed&) = default;
};

// Tags separating the independent randomness families derived from one seed.
enum class SiteKind : std::uint64_t {
    weights = 1,
    edge_bucket = 2,
    vertex_mark = 3,
    edge_mark = 4,
    coupling = 5,
    tree = 6,
    repair = 7,
    limit = 8,
    overlay = 9,
    rde = 10,
    experiment = 11,
};

std::uint64_t mix64(std::uint64_t x);

// Keyed hash of a canonical site description. Everything random in the
// library is a function of such keys, so results never depend on call order.
std::uint64_t site_key(const Seed& seed, std::uint64_t stream, SiteKind kind,
                       std::initializer_list<std::uint64_t> parts);

// Maps 64 random bits to the open interval (0, 1).
inline double to_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

// SplitMix64 stream started from a key. Satisfies UniformRandomBitGenerator.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t key) : state_(mix64(key ^ 0x6a09e667f3bcc909ULL)) {}
    Rng(const Seed& seed, std::uint64_t stream, SiteKind kind,
        std::initializer_list<std::uint64_t> parts)
        : Rng(site_key(seed, stream, kind, parts)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return next(); }
    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }
    double uniform() { return to_unit(next()); }
    // Uniform index in [0, bound).
    std::uint64_t below(std::uint64_t bound);

private:
    std::uint64_t state_;
};

// Derives a child seed; used to hand independent seeds to sub-computations.
Seed derive_seed(const Seed& seed, std::uint64_t tag, std::uint64_t index);

}  // namespace irg
