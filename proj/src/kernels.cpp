#include "cdg/kernels.hpp"

#include <stdexcept>

namespace cdg::kern {

namespace {
Impl g_active = avx2_supported() ? Impl::avx2 : Impl::scalar;
}

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Impl active() { return g_active; }

void force(Impl impl) {
  if (impl == Impl::avx2 && !avx2_supported())
    throw std::runtime_error("kern: avx2 not supported on this cpu");
  g_active = impl;
}

void reset() { g_active = avx2_supported() ? Impl::avx2 : Impl::scalar; }

void axpy_scalar(std::uint32_t* y, const std::uint32_t* x, std::uint32_t c, std::size_t n, std::uint32_t p) {
  for (std::size_t i = 0; i < n; ++i)
    y[i] = static_cast<std::uint32_t>((y[i] + std::uint64_t(c) * x[i]) % p);
}

void scal_scalar(std::uint32_t* y, std::uint32_t c, std::size_t n, std::uint32_t p) {
  for (std::size_t i = 0; i < n; ++i)
    y[i] = static_cast<std::uint32_t>(std::uint64_t(c) * y[i] % p);
}

void axpy(std::uint32_t* y, const std::uint32_t* x, std::uint32_t c, std::size_t n, std::uint32_t p) {
  if (g_active == Impl::avx2) axpy_avx2(y, x, c, n, p);
  else axpy_scalar(y, x, c, n, p);
}

void scal(std::uint32_t* y, std::uint32_t c, std::size_t n, std::uint32_t p) {
  if (g_active == Impl::avx2) scal_avx2(y, c, n, p);
  else scal_scalar(y, c, n, p);
}

} // namespace cdg::kern
