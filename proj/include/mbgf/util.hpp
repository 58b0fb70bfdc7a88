#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace mbgf {

inline constexpr std::uint64_t fnv1a_offset = 0xcbf29ce484222325ull;

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h = fnv1a_offset);
std::uint64_t fnv1a64(const std::string& s);
std::uint64_t fnv1a64_file(const std::string& path);  // throws parse_error if unreadable

std::string hex16(std::uint64_t v);

// Locale-independent float formatting. format_g12 is the artifact format
// (12 significant digits); format_full round-trips the double exactly.
std::string format_g12(double x);
std::string format_full(double x);

}  // namespace mbgf
