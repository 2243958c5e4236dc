#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace pkam::detail {

namespace {

struct PlanCache {
  std::mutex mutex;
  std::map<std::pair<std::vector<int>, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

fftw_plan plan_for(const std::vector<int>& dims, int sign) {
  auto& c = cache();
  std::lock_guard lock(c.mutex);
  auto key = std::make_pair(dims, sign);
  if (auto it = c.plans.find(key); it != c.plans.end()) return it->second;

  std::size_t total = 1;
  for (int g : dims) total *= static_cast<std::size_t>(g);
  std::vector<std::complex<double>> scratch(total);
  auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
  // FFTW_UNALIGNED lets the plan run on any std::vector buffer through the
  // new-array execute interface.
  fftw_plan plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), ptr, ptr, sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan == nullptr) throw std::runtime_error("fftw plan creation failed");
  c.plans.emplace(std::move(key), plan);
  return plan;
}

}  // namespace

void fft(std::vector<std::complex<double>>& data, const std::vector<int>& dims,
         FftDirection direction) {
  const int sign = direction == FftDirection::forward ? FFTW_FORWARD : FFTW_BACKWARD;
  fftw_plan plan = plan_for(dims, sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace pkam::detail
