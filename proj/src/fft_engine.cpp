#include "fft_engine.hpp"

#include <algorithm>
#include <cstring>
#include <mutex>
#include <new>

namespace loschmidt::detail {

namespace {
// FFTW planner calls are not thread safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

FftEngine::FftEngine(std::size_t n) : n_(n) {
  std::lock_guard lock(planner_mutex());
  scratch_ = fftw_alloc_complex(n_);
  if (scratch_ == nullptr) throw std::bad_alloc();
  const int len = static_cast<int>(n_);
  forward_ = fftw_plan_dft_1d(len, scratch_, scratch_, FFTW_FORWARD, FFTW_ESTIMATE);
  backward_ = fftw_plan_dft_1d(len, scratch_, scratch_, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (forward_ == nullptr || backward_ == nullptr) {
    if (forward_) fftw_destroy_plan(forward_);
    if (backward_) fftw_destroy_plan(backward_);
    fftw_free(scratch_);
    throw std::bad_alloc();
  }
}

FftEngine::~FftEngine() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(forward_);
  fftw_destroy_plan(backward_);
  fftw_free(scratch_);
}

void FftEngine::execute(fftw_plan plan, std::complex<double>* data) {
  auto* raw = reinterpret_cast<fftw_complex*>(data);
  if (fftw_alignment_of(reinterpret_cast<double*>(raw)) ==
      fftw_alignment_of(reinterpret_cast<double*>(scratch_))) {
    fftw_execute_dft(plan, raw, raw);
    return;
  }
  std::memcpy(scratch_, raw, n_ * sizeof(fftw_complex));
  fftw_execute_dft(plan, scratch_, scratch_);
  std::memcpy(raw, scratch_, n_ * sizeof(fftw_complex));
}

}  // namespace loschmidt::detail
