#include "seqent/kernels.hpp"

namespace seqent::kernels::scalar {

void match_probes(std::span<const Symbol> seq, std::span<const Probe> probes, std::span<std::uint8_t> out,
                  bool accumulate) {
  for (std::size_t s = 0; s < out.size(); ++s) {
    std::uint8_t hit = 1;
    for (const Probe& p : probes) {
      if (!has_symbol(p.mask, seq[s + p.offset])) {
        hit = 0;
        break;
      }
    }
    out[s] = accumulate ? static_cast<std::uint8_t>(out[s] | hit) : hit;
  }
}

std::size_t count_ones(std::span<const std::uint8_t> flags) {
  std::size_t n = 0;
  for (auto f : flags) n += f;
  return n;
}

std::size_t count_both(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a[i] & b[i];
  return n;
}

std::size_t count_first_only(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a[i] & (b[i] ^ 1U);
  return n;
}

std::size_t count_differ(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a[i] ^ b[i];
  return n;
}

}  // namespace seqent::kernels::scalar
