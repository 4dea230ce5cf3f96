#include "fcs/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace fcs::fft {
namespace {

// The FFTW planner is not re-entrant; execution of distinct plans is.
std::mutex &planner_mutex() {
  static std::mutex m;
  return m;
}

class Plan {
public:
  Plan(int rank, int n, int sign) : n_(n) {
    const std::size_t count = rank == 1 ? static_cast<std::size_t>(n)
                                        : static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    count_ = count;
    std::lock_guard lock(planner_mutex());
    buffer_ = fftw_alloc_complex(count);
    if (rank == 1)
      plan_ = fftw_plan_dft_1d(n, buffer_, buffer_, sign, FFTW_ESTIMATE);
    else
      plan_ = fftw_plan_dft_2d(n, n, buffer_, buffer_, sign, FFTW_ESTIMATE);
    if (!plan_)
      throw std::runtime_error("FFTW failed to create a plan");
  }
  Plan(const Plan &) = delete;
  Plan &operator=(const Plan &) = delete;
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(buffer_);
  }

  void run(std::span<const Complex> in, std::span<Complex> out, double scale) {
    static_assert(sizeof(Complex) == sizeof(fftw_complex));
    std::memcpy(buffer_, in.data(), count_ * sizeof(fftw_complex));
    fftw_execute(plan_);
    const auto *res = reinterpret_cast<const Complex *>(buffer_);
    for (std::size_t i = 0; i < count_; ++i)
      out[i] = res[i] * scale;
  }

private:
  int n_;
  std::size_t count_ = 0;
  fftw_complex *buffer_ = nullptr;
  fftw_plan plan_ = nullptr;
};

Plan &plan_for(int rank, int n, int sign) {
  thread_local std::map<std::tuple<int, int, int>, std::unique_ptr<Plan>> cache;
  auto &slot = cache[{rank, n, sign}];
  if (!slot)
    slot = std::make_unique<Plan>(rank, n, sign);
  return *slot;
}

std::vector<Complex> transform_1d(std::span<const Complex> in, int sign) {
  std::vector<Complex> out(in.size());
  if (in.empty())
    return out;
  const int n = static_cast<int>(in.size());
  plan_for(1, n, sign).run(in, out, 1.0 / std::sqrt(static_cast<double>(n)));
  return out;
}

} // namespace

std::vector<Complex> forward_1d(std::span<const Complex> in) { return transform_1d(in, FFTW_FORWARD); }

std::vector<Complex> inverse_1d(std::span<const Complex> in) { return transform_1d(in, FFTW_BACKWARD); }

KSpace forward_2d(const Image &image) {
  KSpace out(image.geometry());
  const int n = image.size();
  plan_for(2, n, FFTW_FORWARD).run(image.values(), out.values(), 1.0 / n);
  return out;
}

Image inverse_2d(const KSpace &kspace) {
  Image out(kspace.geometry());
  const int n = kspace.size();
  plan_for(2, n, FFTW_BACKWARD).run(kspace.values(), out.values(), 1.0 / n);
  return out;
}

} // namespace fcs::fft
