#ifndef PDMP_RNG_HPP
#define PDMP_RNG_HPP

#include <cstdint>
#include <random>

namespace pdmp {

/// SplitMix64 output finalizer.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed for chain `index` of an ensemble rooted at `master`.
constexpr std::uint64_t chain_seed(std::uint64_t master, std::uint64_t index)
{
    return splitmix64_mix(master + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

/// Source of the driving randomness of a chain. Samplers only ever talk to
/// this interface so tests can script the variates.
class VariateStream {
public:
    virtual ~VariateStream() = default;
    /// Uniform on the open interval (0, 1).
    virtual double uniform() = 0;
    virtual double normal() = 0;
    /// Standard exponential, Exp(1).
    virtual double exponential();
};

class ChainRng final : public VariateStream {
public:
    explicit ChainRng(std::uint64_t seed) : engine_(seed) {}
    static ChainRng for_chain(std::uint64_t master, std::uint64_t index)
    {
        return ChainRng(chain_seed(master, index));
    }

    double uniform() override;
    double normal() override { return normal_(engine_); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

}  // namespace pdmp

#endif  // PDMP_RNG_HPP
