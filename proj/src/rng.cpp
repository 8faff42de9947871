#include "irg/rng.hpp"

#include <cctype>
#include <cstdio>
#include <stdexcept>

namespace irg {

std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

namespace {
std::uint64_t absorb(std::uint64_t h, std::uint64_t x) {
    return mix64(h ^ (x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}
}  // namespace

std::uint64_t site_key(const Seed& seed, std::uint64_t stream, SiteKind kind,
                       std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = absorb(mix64(seed.hi), seed.lo);
    h = absorb(h, stream);
    h = absorb(h, static_cast<std::uint64_t>(kind));
    h = absorb(h, parts.size());
    for (std::uint64_t p : parts) h = absorb(h, p);
    return h;
}

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below: empty range");
    // Lemire's multiply-shift with rejection.
    while (true) {
        const std::uint64_t x = next();
        const __uint128_t m = static_cast<__uint128_t>(x) * bound;
        const std::uint64_t low = static_cast<std::uint64_t>(m);
        if (low >= bound || low >= (-bound) % bound) return static_cast<std::uint64_t>(m >> 64);
    }
}

Seed derive_seed(const Seed& seed, std::uint64_t tag, std::uint64_t index) {
    Seed out;
    out.hi = site_key(seed, tag, SiteKind::experiment, {index, 1});
    out.lo = site_key(seed, tag, SiteKind::experiment, {index, 2});
    return out;
}

Seed Seed::parse(std::string_view text) {
    if (text.size() >= 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) text.remove_prefix(2);
    if (text.empty() || text.size() > 32) throw std::invalid_argument("seed must be 1 to 32 hex digits");
    Seed s;
    for (char c : text) {
        int d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
        else throw std::invalid_argument(std::string("invalid hex digit in seed: ") + c);
        s.hi = (s.hi << 4) | (s.lo >> 60);
        s.lo = (s.lo << 4) | static_cast<std::uint64_t>(d);
    }
    return s;
}

std::string Seed::hex() const {
    char buf[35];
    std::snprintf(buf, sizeof buf, "0x%016llx%016llx", static_cast<unsigned long long>(hi),
                  static_cast<unsigned long long>(lo));
    return buf;
}

}  // namespace irg
