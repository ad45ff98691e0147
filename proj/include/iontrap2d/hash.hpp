#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace iontrap2d {

/// 64-bit FNV-1a; stable across platforms, used for provenance tags.
std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);

/// Lower-case 16-digit hex rendering.
std::string hex64(std::uint64_t value);

}  // namespace iontrap2d
