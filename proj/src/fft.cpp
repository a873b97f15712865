#include "qvar/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <numeric>

namespace qvar::fft {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Plan::Impl {
  fftw_plan plan = nullptr;
  std::vector<int> extents;
  int sign = FFTW_FORWARD;
};

Plan::Plan(std::vector<int> extents, Sign sign) : impl_(std::make_unique<Impl>()) {
  require(!extents.empty(), "fft plan needs at least one dimension");
  for (int e : extents) require(e >= 1, "fft extent must be positive");
  size_ = std::accumulate(extents.begin(), extents.end(), std::size_t{1},
                          [](std::size_t a, int b) { return a * static_cast<std::size_t>(b); });
  impl_->extents = std::move(extents);
  impl_->sign = sign == Sign::minus ? FFTW_FORWARD : FFTW_BACKWARD;
  // Plan against a scratch buffer; new-array execution reuses it.
  std::vector<cplx> scratch(size_);
  std::lock_guard lock(planner_mutex());
  impl_->plan = fftw_plan_dft(static_cast<int>(impl_->extents.size()), impl_->extents.data(),
                              reinterpret_cast<fftw_complex*>(scratch.data()),
                              reinterpret_cast<fftw_complex*>(scratch.data()), impl_->sign,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (impl_->plan == nullptr) throw NumericFailure("fftw could not create a plan");
}

Plan::~Plan() {
  if (impl_ && impl_->plan != nullptr) {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(impl_->plan);
  }
}

Plan::Plan(Plan&&) noexcept = default;
Plan& Plan::operator=(Plan&&) noexcept = default;

void Plan::execute(std::span<cplx> data) const {
  require(data.size() == size_, "fft buffer size does not match the plan");
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(impl_->plan, ptr, ptr);
}

void transform(std::span<cplx> data, const std::vector<int>& extents, Sign sign) {
  Plan plan(extents, sign);
  plan.execute(data);
}

}  // namespace qvar::fft
