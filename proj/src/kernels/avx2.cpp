// Compiled with -mavx2; only reached after a runtime CPU check.
#include <immintrin.h>

#include <algorithm>
#include <array>

#include "seqent/kernels.hpp"

namespace seqent::kernels::avx2 {
namespace {

__m256i lookup_table(SymbolMask mask) {
  alignas(16) std::array<std::uint8_t, 16> t{};
  for (int s = 0; s < 16; ++s) t[static_cast<std::size_t>(s)] = ((mask >> s) & 1U) ? 0xFF : 0x00;
  const __m128i lane = _mm_load_si128(reinterpret_cast<const __m128i*>(t.data()));
  return _mm256_broadcastsi128_si256(lane);
}

std::uint64_t horizontal_sum(__m256i sad) {
  alignas(32) std::array<std::uint64_t, 4> parts{};
  _mm256_store_si256(reinterpret_cast<__m256i*>(parts.data()), sad);
  return parts[0] + parts[1] + parts[2] + parts[3];
}

template <typename Combine>
std::size_t count_pairwise(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b, Combine combine,
                           std::size_t (*tail)(std::span<const std::uint8_t>, std::span<const std::uint8_t>)) {
  const std::size_t n = a.size();
  const __m256i zero = _mm256_setzero_si256();
  __m256i acc = zero;
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a.data() + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b.data() + i));
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(combine(va, vb), zero));
  }
  return static_cast<std::size_t>(horizontal_sum(acc)) + tail(a.subspan(i), b.subspan(i));
}

}  // namespace

void match_probes(std::span<const Symbol> seq, std::span<const Probe> probes, std::span<std::uint8_t> out,
                  bool accumulate) {
  const std::size_t n = out.size();
  constexpr std::size_t kBatch = 8;
  __m256i tables[kBatch];
  const __m256i sixteen = _mm256_set1_epi8(16);
  const __m256i one = _mm256_set1_epi8(1);
  std::size_t s = 0;
  for (; s + 32 <= n; s += 32) {
    __m256i acc = _mm256_set1_epi8(static_cast<char>(0xFF));
    for (std::size_t base = 0; base < probes.size(); base += kBatch) {
      const std::size_t count = std::min(kBatch, probes.size() - base);
      if (s == 0 || probes.size() > kBatch) {
        for (std::size_t j = 0; j < count; ++j) tables[j] = lookup_table(probes[base + j].mask);
      }
      for (std::size_t j = 0; j < count; ++j) {
        const Probe& p = probes[base + j];
        const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(seq.data() + s + p.offset));
        const __m256i in_range = _mm256_cmpgt_epi8(sixteen, v);
        const __m256i hit = _mm256_and_si256(_mm256_shuffle_epi8(tables[j], v), in_range);
        acc = _mm256_and_si256(acc, hit);
      }
    }
    __m256i flags = _mm256_and_si256(acc, one);
    auto* dst = reinterpret_cast<__m256i*>(out.data() + s);
    if (accumulate) flags = _mm256_or_si256(flags, _mm256_loadu_si256(dst));
    _mm256_storeu_si256(dst, flags);
  }
  if (s < n) scalar::match_probes(seq.subspan(s), probes, out.subspan(s), accumulate);
}

std::size_t count_ones(std::span<const std::uint8_t> flags) {
  const __m256i zero = _mm256_setzero_si256();
  __m256i acc = zero;
  std::size_t i = 0;
  for (; i + 32 <= flags.size(); i += 32) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(flags.data() + i));
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(v, zero));
  }
  return static_cast<std::size_t>(horizontal_sum(acc)) + scalar::count_ones(flags.subspan(i));
}

std::size_t count_both(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  return count_pairwise(a, b, [](__m256i x, __m256i y) { return _mm256_and_si256(x, y); }, &scalar::count_both);
}

std::size_t count_first_only(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  return count_pairwise(a, b, [](__m256i x, __m256i y) { return _mm256_andnot_si256(y, x); },
                        &scalar::count_first_only);
}

std::size_t count_differ(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  return count_pairwise(a, b, [](__m256i x, __m256i y) { return _mm256_xor_si256(x, y); }, &scalar::count_differ);
}

}  // namespace seqent::kernels::avx2
