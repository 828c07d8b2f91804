#include "torusns/rng.hpp"

#include <cmath>

namespace torusns {

namespace {

constexpr std::uint32_t kMult0 = 0xD2511F53u;
constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& x, std::uint32_t k0, std::uint32_t k1) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMult0) * x[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMult1) * x[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
}

inline double u64_to_unit_open(std::uint64_t v) {
    // (0, 1]: 53-bit mantissa, shifted away from zero.
    return (static_cast<double>(v >> 11) + 1.0) * 0x1.0p-53;
}

inline double u64_to_unit_halfopen(std::uint64_t v) {
    // [0, 1).
    return static_cast<double>(v >> 11) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        std::uint64_t key) {
    std::array<std::uint32_t, 4> x = counter;
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    for (int round = 0; round < 10; ++round) {
        philox_round(x, k0, k1);
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return x;
}

std::array<std::uint32_t, 4> RngStream::block(Domain d, std::uint64_t step,
                                              std::uint32_t slot) const {
    // Trajectory indices above 2^32 fold into the high counter word with the
    // domain tag; step is limited to 2^32 per trajectory.
    const std::array<std::uint32_t, 4> counter = {
        slot,
        static_cast<std::uint32_t>(step),
        static_cast<std::uint32_t>(trajectory_),
        static_cast<std::uint32_t>(trajectory_ >> 32) ^
            (static_cast<std::uint32_t>(d) << 28) ^
            (static_cast<std::uint32_t>(step >> 32) << 4),
    };
    return philox4x32(counter, seed_);
}

std::pair<double, double> RngStream::gaussian_pair(Domain d, std::uint64_t step,
                                                   std::uint32_t slot) const {
    const auto b = block(d, step, slot);
    const std::uint64_t w0 = (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
    const std::uint64_t w1 = (static_cast<std::uint64_t>(b[2]) << 32) | b[3];
    const double u1 = u64_to_unit_open(w0);
    const double u2 = u64_to_unit_halfopen(w1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
}

double RngStream::uniform(Domain d, std::uint64_t step, std::uint32_t slot) const {
    const auto b = block(d, step, slot);
    const std::uint64_t w = (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
    return u64_to_unit_open(w);
}

SpectralField random_field(TruncationParams trunc, const RngStream& rng, std::uint64_t tag,
                           double decay) {
    SpectralField u(trunc);
    u.for_each_mode([&](WaveVector k, Complex&) {
        if (!k.is_half_lattice()) return;
        const auto slot = static_cast<std::uint32_t>(u.index(k));
        const auto [g1, g2] = rng.gaussian_pair(RngStream::Domain::initial_condition, tag, slot);
        const double amp = std::pow(1.0 + k.norm2(), -decay / 2.0) / std::sqrt(2.0);
        u.set_pair(k, Complex(g1, g2) * amp);
    });
    return u;
}

SpectralField random_field_with_norm(TruncationParams trunc, const RngStream& rng,
                                     std::uint64_t tag, double h_norm, double decay) {
    SpectralField u = random_field(trunc, rng, tag, decay);
    const double n = norm_h(u);
    if (n > 0.0) u *= h_norm / n;
    return u;
}

}  // namespace torusns
