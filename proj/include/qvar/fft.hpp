#pragma once

// Thin RAII wrapper around FFTW plans. Planning goes through a global lock;
// executing a plan on caller-owned buffers is thread-safe.

#include <memory>
#include <span>
#include <vector>

#include "qvar/common.hpp"

namespace qvar::fft {

enum class Sign { minus = -1, plus = +1 };

/// In-place complex DFT over a row-major box with the given extents:
/// out[k] = sum_n in[n] e(sign * k.n / extent). Unnormalized.
class Plan {
 public:
  Plan(std::vector<int> extents, Sign sign);
  ~Plan();
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  Plan(Plan&&) noexcept;
  Plan& operator=(Plan&&) noexcept;

  std::size_t size() const { return size_; }
  void execute(std::span<cplx> data) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::size_t size_ = 0;
};

/// One-shot helper.
void transform(std::span<cplx> data, const std::vector<int>& extents, Sign sign);

}  // namespace qvar::fft
