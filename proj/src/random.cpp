#include "pslice/random.hpp"

namespace pslice {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

DigitStream::DigitStream(std::uint64_t seed, std::uint64_t stream_id)
    : key_(mix64(seed ^ mix64(stream_id * kGolden + 0x632BE59BD9B4E019ULL))) {}

std::uint64_t DigitStream::next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

std::uint32_t DigitStream::next_digit(std::uint32_t p) {
    const std::uint64_t limit = (~std::uint64_t{0} / p) * p;
    for (;;) {
        const std::uint64_t x = next_u64();
        if (x < limit) return static_cast<std::uint32_t>(x % p);
    }
}

mpz_class DigitStream::next_below_prime_power(std::uint32_t p, int k) {
    // Largest chunk p^c <= 2^62 so that a single rejection step yields c digits.
    int chunk_digits = 0;
    std::uint64_t chunk = 1;
    while (chunk <= (std::uint64_t{1} << 62) / p) {
        chunk *= p;
        ++chunk_digits;
    }
    mpz_class out = 0;
    mpz_class scale = 1;
    int remaining = k;
    while (remaining > 0) {
        const int c = remaining < chunk_digits ? remaining : chunk_digits;
        std::uint64_t modulus = 1;
        for (int i = 0; i < c; ++i) modulus *= p;
        const std::uint64_t limit = (~std::uint64_t{0} / modulus) * modulus;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        mpz_class part;
        mpz_set_ui(part.get_mpz_t(), x % modulus);
        out += part * scale;
        mpz_class m;
        mpz_set_ui(m.get_mpz_t(), modulus);
        scale *= m;
        remaining -= c;
    }
    return out;
}

double DigitStream::next_unit_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

DigitStream split_stream(const PadicContext& ctx, std::uint32_t worker_id) {
    return DigitStream(ctx.seed(), worker_id);
}

PadicScalar sample_uniform_O(const ContextPtr& ctx, DigitStream& rng) {
    return PadicScalar::from_integer(ctx, rng.next_below_prime_power(ctx->prime(), ctx->precision()));
}

PadicVector sample_uniform_O_vector(const ContextPtr& ctx, std::size_t length, DigitStream& rng) {
    PadicVector out;
    out.reserve(length);
    for (std::size_t i = 0; i < length; ++i) out.push_back(sample_uniform_O(ctx, rng));
    return out;
}

}  // namespace pslice
