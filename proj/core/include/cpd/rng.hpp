#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <utility>

namespace cpd {

/// Philox4x32-10 counter-based generator. The key is the user seed, the upper
/// half of the counter is the stream id and the lower half counts blocks, so
/// a (seed, stream) pair names one reproducible sequence independent of
/// thread scheduling.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Uniform in (0, 1].
    double uniform_open_zero() noexcept { return 1.0 - uniform(); }
    /// Uniform integer in [0, bound), bound >= 1, by rejection.
    std::uint64_t uniform_index(std::uint64_t bound) noexcept;
    double normal() noexcept;
    double exponential() noexcept;
    /// log of a Gamma(shape, 1) variate; stays finite for very small shapes.
    double log_gamma_variate(double shape) noexcept;
    double gamma(double shape) noexcept;

    template <typename T>
    void shuffle(std::span<T> values) noexcept {
        for (std::size_t i = values.size(); i > 1; --i) {
            auto j = static_cast<std::size_t>(uniform_index(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    void refill() noexcept;

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> counter_;
    std::array<std::uint32_t, 4> block_{};
    std::size_t used_ = 4;
};

namespace detail {
/// Raw Philox4x32-10 block function, exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;
}  // namespace detail

RngStream make_rng_stream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

/// Hashes a tuple of integers into a stream id (splitmix64 chaining).
std::uint64_t derive_stream_id(std::initializer_list<std::uint64_t> parts) noexcept;

namespace stream_tag {
inline constexpr std::uint64_t forest_tree = 0x7265'6566'6f72'6573ULL;
inline constexpr std::uint64_t permutation = 0x7065'726d'7574'6573ULL;
inline constexpr std::uint64_t simulation = 0x7369'6d75'6c61'7465ULL;
}  // namespace stream_tag

}  // namespace cpd
