#pragma once

#include <array>
#include <cstdint>

namespace geostop {

// Philox-4x32-10 counter stream. The 64-bit experiment seed is the key and
// the 64-bit stream id occupies the top half of the counter, so stream k of
// seed s produces the same values no matter how many workers consume streams
// or in which order. Trial i always uses stream i.
class PhiloxStream {
public:
    PhiloxStream(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_{static_cast<std::uint32_t>(seed),
               static_cast<std::uint32_t>(seed >> 32)},
          ctr_{0u, 0u,
               static_cast<std::uint32_t>(stream),
               static_cast<std::uint32_t>(stream >> 32)} {}

    std::uint64_t next_u64() {
        if (have_ == 0) refill();
        return out_[--have_];
    }

    // 53-bit uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in [0, n); multiply-shift, bias below 2^-64
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWey0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWey1 = 0xBB67AE85u;

    static void round(std::array<std::uint32_t, 4>& x, std::uint32_t k0, std::uint32_t k1) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * x[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * x[2];
        const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
        const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
        x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
    }

    void refill() {
        std::array<std::uint32_t, 4> x = ctr_;
        std::uint32_t k0 = key_[0], k1 = key_[1];
        for (int r = 0; r < 10; ++r) {
            round(x, k0, k1);
            k0 += kWey0;
            k1 += kWey1;
        }
        out_[1] = (static_cast<std::uint64_t>(x[1]) << 32) | x[0];
        out_[0] = (static_cast<std::uint64_t>(x[3]) << 32) | x[2];
        have_ = 2;
        if (++ctr_[0] == 0) ++ctr_[1];  // 64-bit block counter in the low half
    }

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> ctr_;
    std::array<std::uint64_t, 2> out_{};
    int have_ = 0;
};

}  // namespace geostop
