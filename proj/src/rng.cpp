#include "pdmp/rng.hpp"

#include <cmath>

namespace pdmp {

double VariateStream::exponential() { return -std::log(uniform()); }

double ChainRng::uniform()
{
    // 53 random bits centred in their cell: never 0, never 1.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace pdmp
