#include <atomic>

#include "seqent/error.hpp"
#include "seqent/kernels.hpp"

namespace seqent::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(SEQENT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

std::atomic<Isa>& active_isa() {
  static std::atomic<Isa> isa{best_available()};
  return isa;
}

bool masks_fit_lookup(std::span<const Probe> probes) {
  for (const Probe& p : probes) {
    if ((p.mask >> 16) != 0) return false;
  }
  return true;
}

}  // namespace

const char* isa_name(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Isa best_available() noexcept { return cpu_has_avx2() ? Isa::avx2 : Isa::scalar; }

Isa active() noexcept { return active_isa().load(std::memory_order_relaxed); }

void set_active(Isa isa) {
  if (isa == Isa::avx2 && !cpu_has_avx2()) throw InvalidArgument("avx2 kernels are not available");
  active_isa().store(isa, std::memory_order_relaxed);
}

void match_probes(std::span<const Symbol> seq, std::span<const Probe> probes, std::span<std::uint8_t> out,
                  bool accumulate) {
#if defined(SEQENT_HAVE_AVX2)
  if (active() == Isa::avx2 && masks_fit_lookup(probes)) {
    avx2::match_probes(seq, probes, out, accumulate);
    return;
  }
#else
  (void)masks_fit_lookup;
#endif
  scalar::match_probes(seq, probes, out, accumulate);
}

#if defined(SEQENT_HAVE_AVX2)
#define SEQENT_DISPATCH(fn, ...) \
  return active() == Isa::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__)
#else
#define SEQENT_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

std::size_t count_ones(std::span<const std::uint8_t> flags) { SEQENT_DISPATCH(count_ones, flags); }

std::size_t count_both(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  SEQENT_DISPATCH(count_both, a, b);
}

std::size_t count_first_only(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  SEQENT_DISPATCH(count_first_only, a, b);
}

std::size_t count_differ(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  SEQENT_DISPATCH(count_differ, a, b);
}

#undef SEQENT_DISPATCH

}  // namespace seqent::kernels
