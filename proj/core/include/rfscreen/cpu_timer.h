#pragma once

namespace rfscreen {

// Process CPU time (all threads) and wall time since construction.
class CpuTimer {
 public:
  CpuTimer();

  double cpu_seconds() const;
  double wall_seconds() const;

 private:
  double cpu_start_;
  double wall_start_;
};

double process_cpu_seconds();

}  // namespace rfscreen
