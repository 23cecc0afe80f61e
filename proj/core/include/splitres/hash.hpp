#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace splitres {

// 64-bit FNV-1a. Stable across platforms; used for config hashes and for
// deriving per-document seeds.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis = 0xcbf29ce484222325ULL);

std::string hex64(std::uint64_t value);

std::uint64_t mix_seed(std::uint64_t seed, std::string_view key);

}  // namespace splitres
