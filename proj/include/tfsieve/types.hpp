#pragma once

#include <complex>

namespace tfsieve {

using cplx = std::complex<double>;

// A point of the time-frequency plane.
struct PhasePoint {
  double time = 0.0;
  double freq = 0.0;
};

inline PhasePoint operator+(PhasePoint a, PhasePoint b) { return {a.time + b.time, a.freq + b.freq}; }
inline PhasePoint operator-(PhasePoint a, PhasePoint b) { return {a.time - b.time, a.freq - b.freq}; }
inline double norm2(PhasePoint a) { return a.time * a.time + a.freq * a.freq; }

}  // namespace tfsieve
