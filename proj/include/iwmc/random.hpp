#pragma once

#include "iwmc/data.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>

namespace iwmc {

using Rng = std::mt19937_64;

/// Deterministic sub-seed: splitmix64 folded over the base seed and tags.
/// Every random draw in the library flows from a single user seed through
/// this function, so (seed, tags) fully identifies a stream.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags);

/// i.i.d. standard normal matrix.
Matrix gaussian_matrix(Index rows, Index cols, Rng& rng);

/// Sub-seed tags. Values are part of the reproducibility contract.
namespace seed_tag {
inline constexpr std::uint64_t mstage = 1;
inline constexpr std::uint64_t amputation = 2;
inline constexpr std::uint64_t folds = 3;
inline constexpr std::uint64_t synth = 4;
inline constexpr std::uint64_t baseline = 5;
inline constexpr std::uint64_t mnar_columns = 6;
}  // namespace seed_tag

}  // namespace iwmc
