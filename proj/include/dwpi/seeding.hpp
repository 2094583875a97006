#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dwpi {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);
std::uint64_t derive_seed(std::uint64_t base, std::string_view label);

}  // namespace dwpi
