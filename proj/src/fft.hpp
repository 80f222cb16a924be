#pragma once

// Thin RAII wrapper over FFTW for the two places that need a DFT.

#include <complex>
#include <cstddef>
#include <memory>

#include <fftw3.h>

namespace dpd::detail {

class Dft {
 public:
  enum class Direction { forward, inverse };

  Dft(std::size_t n, Direction dir);
  ~Dft();
  Dft(const Dft&) = delete;
  Dft& operator=(const Dft&) = delete;

  std::size_t size() const noexcept { return n_; }
  std::complex<double>* data() noexcept { return reinterpret_cast<std::complex<double>*>(buf_); }

  /// In-place, unnormalized transform of data().
  void execute() noexcept;

 private:
  std::size_t n_;
  fftw_complex* buf_ = nullptr;
  fftw_plan plan_ = nullptr;
};

}  // namespace dpd::detail
