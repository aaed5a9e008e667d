#pragma once

#include <cstdint>

#include <gmpxx.h>

#include "pslice/padic.hpp"

namespace pslice {

/// Counter-based generator: output i is a SplitMix64 hash of (key, i).
///
/// A stream is fully determined by (seed, stream id); streams are owned by a
/// single worker and never shared.
class DigitStream {
public:
    DigitStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t next_u64();
    /// Uniform base-p digit; rejection on the top range, no modulo bias.
    std::uint32_t next_digit(std::uint32_t p);
    /// Uniform integer in [0, p^k), assembled from chunks of exactly uniform digits.
    mpz_class next_below_prime_power(std::uint32_t p, int k);
    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit_double();

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Independent stream for one worker.
DigitStream split_stream(const PadicContext& ctx, std::uint32_t worker_id);

/// Haar measure on Z_p pushed forward to precision p^kappa: kappa uniform
/// digits read as an integer. All-zero digits give the exact zero.
PadicScalar sample_uniform_O(const ContextPtr& ctx, DigitStream& rng);
PadicVector sample_uniform_O_vector(const ContextPtr& ctx, std::size_t length, DigitStream& rng);

}  // namespace pslice
