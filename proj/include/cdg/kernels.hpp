#pragma once

#include <cstddef>
#include <cstdint>

// Row kernels for dense mod-p elimination. A scalar reference implementation
// is always available; an AVX2 variant (Shoup reduction) is selected at
// runtime when the CPU supports it. Both operate on canonical residues < p
// and require p < 2^30.
namespace cdg::kern {

enum class Impl { scalar, avx2 };

Impl active();
bool avx2_supported();
// Test hook: force a specific implementation. Throws if unsupported on this CPU.
void force(Impl impl);
void reset();

// y[i] = (y[i] + c * x[i]) mod p
void axpy(std::uint32_t* y, const std::uint32_t* x, std::uint32_t c, std::size_t n, std::uint32_t p);
// y[i] = (c * y[i]) mod p
void scal(std::uint32_t* y, std::uint32_t c, std::size_t n, std::uint32_t p);

// Reference implementations (used directly by equivalence tests).
void axpy_scalar(std::uint32_t* y, const std::uint32_t* x, std::uint32_t c, std::size_t n, std::uint32_t p);
void scal_scalar(std::uint32_t* y, std::uint32_t c, std::size_t n, std::uint32_t p);
void axpy_avx2(std::uint32_t* y, const std::uint32_t* x, std::uint32_t c, std::size_t n, std::uint32_t p);
void scal_avx2(std::uint32_t* y, std::uint32_t c, std::size_t n, std::uint32_t p);

} // namespace cdg::kern
