#include "dbw/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dbw::fft {

namespace {

constexpr int kRealToComplex = 0;

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) {
      fftw_destroy_plan(plan);
    }
  }

  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) {
      return it->second;
    }
    // FFTW_ESTIMATE leaves the scratch array untouched; FFTW_UNALIGNED lets
    // the plan run on std::vector storage.
    std::vector<cdouble> scratch(n);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = nullptr;
    if (sign == kRealToComplex) {
      std::vector<double> in(n);
      plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), buf, FFTW_ESTIMATE | FFTW_UNALIGNED);
    } else {
      plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void execute(std::span<cdouble> data, int sign) {
  if (data.empty()) {
    return;
  }
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(cache().get(data.size(), sign), buf, buf);
}

}  // namespace

void forward(std::span<cdouble> data) { execute(data, FFTW_FORWARD); }

void backward(std::span<cdouble> data) { execute(data, FFTW_BACKWARD); }

void forward_real(std::span<const double> in, std::span<cdouble> out) {
  if (in.empty()) {
    return;
  }
  if (out.size() != in.size() / 2 + 1) {
    throw std::invalid_argument("fft::forward_real: output must hold n/2 + 1 values");
  }
  // The r2c plan leaves its input untouched.
  fftw_execute_dft_r2c(cache().get(in.size(), kRealToComplex), const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace dbw::fft
