#pragma once

#include <array>
#include <cstdint>
#include <utility>

#include "torusns/spectral_field.hpp"

namespace torusns {

/// Philox4x32-10 block cipher: maps a 128-bit counter and 64-bit key to four
/// 32-bit words.  Distinct counters give independent outputs, so draws can be
/// indexed by (trajectory, step, slot) and partitioned freely across workers.
std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        std::uint64_t key);

/// Value-type handle on one trajectory's random stream.
///
/// Identical (seed, trajectory, domain, step, slot) coordinates reproduce
/// bit-identical draws on every platform and thread count.
class RngStream {
  public:
    enum class Domain : std::uint32_t {
        ou_noise = 0,
        initial_condition = 1,
        experiment = 2,
    };

    RngStream() = default;
    RngStream(std::uint64_t seed, std::uint64_t trajectory = 0)
        : seed_(seed), trajectory_(trajectory) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t trajectory() const { return trajectory_; }

    RngStream with_trajectory(std::uint64_t trajectory) const {
        return RngStream(seed_, trajectory);
    }

    std::array<std::uint32_t, 4> block(Domain d, std::uint64_t step, std::uint32_t slot) const;

    /// Two independent N(0,1) draws (Box-Muller on one Philox block).
    std::pair<double, double> gaussian_pair(Domain d, std::uint64_t step, std::uint32_t slot) const;

    /// One uniform draw in (0,1).
    double uniform(Domain d, std::uint64_t step, std::uint32_t slot) const;

  private:
    std::uint64_t seed_ = 0;
    std::uint64_t trajectory_ = 0;
};

/// Random real-valued field with per-mode profile (1+|k|^2)^{-decay/2};
/// conjugate pairs are linked so the field is real.  `tag` separates draws
/// (e.g. sample index) within the stream's initial-condition domain.
SpectralField random_field(TruncationParams trunc, const RngStream& rng, std::uint64_t tag,
                           double decay = 2.0);

/// Same, rescaled to the requested H-norm.
SpectralField random_field_with_norm(TruncationParams trunc, const RngStream& rng,
                                     std::uint64_t tag, double h_norm, double decay = 2.0);

}  // namespace torusns
