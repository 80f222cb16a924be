#include "fft.hpp"

#include <mutex>
#include <new>

namespace dpd::detail {
namespace {
// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Dft::Dft(std::size_t n, Direction dir) : n_(n) {
  std::lock_guard lock(planner_mutex());
  buf_ = fftw_alloc_complex(n);
  if (buf_ == nullptr) throw std::bad_alloc();
  plan_ = fftw_plan_dft_1d(static_cast<int>(n), buf_, buf_,
                           dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD,
                           FFTW_ESTIMATE);
}

Dft::~Dft() {
  std::lock_guard lock(planner_mutex());
  if (plan_ != nullptr) fftw_destroy_plan(plan_);
  fftw_free(buf_);
}

void Dft::execute() noexcept { fftw_execute(plan_); }

}  // namespace dpd::detail
