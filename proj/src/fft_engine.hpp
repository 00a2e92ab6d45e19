#pragma once

// RAII wrapper around a pair of in-place FFTW plans for one transform length.

#include <complex>
#include <cstddef>

#include <fftw3.h>

namespace loschmidt::detail {

class FftEngine {
 public:
  explicit FftEngine(std::size_t n);
  ~FftEngine();
  FftEngine(const FftEngine&) = delete;
  FftEngine& operator=(const FftEngine&) = delete;

  std::size_t size() const { return n_; }

  // Unnormalized transforms: forward uses exp(-2 pi i k l / N), backward
  // exp(+2 pi i k l / N). Data of any alignment is accepted; misaligned
  // input is staged through the engine's own buffer so the same plan and
  // codelets run either way.
  void forward(std::complex<double>* data) { execute(forward_, data); }
  void backward(std::complex<double>* data) { execute(backward_, data); }

 private:
  void execute(fftw_plan plan, std::complex<double>* data);

  std::size_t n_;
  fftw_complex* scratch_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace loschmidt::detail
