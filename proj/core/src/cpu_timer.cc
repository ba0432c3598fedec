#include "rfscreen/cpu_timer.h"

#include <chrono>
#include <ctime>

namespace rfscreen {
namespace {

double wall_now() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace

double process_cpu_seconds() {
  timespec ts{};
  if (clock_gettime(CLOCK_PROCESS_CPUTIME_ID, &ts) != 0) {
    return static_cast<double>(std::clock()) / CLOCKS_PER_SEC;
  }
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

CpuTimer::CpuTimer() : cpu_start_(process_cpu_seconds()), wall_start_(wall_now()) {}

double CpuTimer::cpu_seconds() const {
  const double elapsed = process_cpu_seconds() - cpu_start_;
  return elapsed > 0.0 ? elapsed : 0.0;
}

double CpuTimer::wall_seconds() const {
  const double elapsed = wall_now() - wall_start_;
  return elapsed > 0.0 ? elapsed : 0.0;
}

}  // namespace rfscreen
