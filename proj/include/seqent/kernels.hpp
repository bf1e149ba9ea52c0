#pragma once

// Orbit-scan kernels: the data-parallel inner loops behind Birkhoff averages,
// densities and d_f estimates. Each kernel has a scalar reference version and,
// on x86-64, an AVX2 version chosen at runtime. Both must agree bit for bit.

#include <cstddef>
#include <cstdint>
#include <span>

#include "seqent/sft.hpp"

namespace seqent::kernels {

enum class Isa { scalar, avx2 };

const char* isa_name(Isa isa) noexcept;
/// Best instruction set supported by both this build and the running CPU.
Isa best_available() noexcept;
Isa active() noexcept;
/// Forces a kernel family; throws InvalidArgument if it is unavailable.
void set_active(Isa isa);

/// One coordinate test of a pattern: symbol at s + offset must lie in mask.
struct Probe {
  std::uint32_t offset = 0;
  SymbolMask mask = 0;
};

// Flag arrays hold only the bytes 0 and 1.

/// out[s] = AND over probes of has_symbol(mask, seq[s + offset]), for s < out.size().
/// With `accumulate` the result is OR-ed into out instead of stored.
/// Requires seq.size() >= out.size() + max offset.
void match_probes(std::span<const Symbol> seq, std::span<const Probe> probes, std::span<std::uint8_t> out,
                  bool accumulate);
std::size_t count_ones(std::span<const std::uint8_t> flags);
/// Number of s with a[s] = 1 and b[s] = 1.
std::size_t count_both(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
/// Number of s with a[s] = 1 and b[s] = 0.
std::size_t count_first_only(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
/// Number of s with a[s] != b[s].
std::size_t count_differ(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

namespace scalar {
void match_probes(std::span<const Symbol> seq, std::span<const Probe> probes, std::span<std::uint8_t> out,
                  bool accumulate);
std::size_t count_ones(std::span<const std::uint8_t> flags);
std::size_t count_both(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
std::size_t count_first_only(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
std::size_t count_differ(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
}  // namespace scalar

#if defined(SEQENT_HAVE_AVX2)
namespace avx2 {
// Symbols >= 16 never match; callers route masks with such bits to the scalar kernel.
void match_probes(std::span<const Symbol> seq, std::span<const Probe> probes, std::span<std::uint8_t> out,
                  bool accumulate);
std::size_t count_ones(std::span<const std::uint8_t> flags);
std::size_t count_both(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
std::size_t count_first_only(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
std::size_t count_differ(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
}  // namespace avx2
#endif

}  // namespace seqent::kernels
