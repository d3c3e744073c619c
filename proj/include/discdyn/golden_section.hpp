#pragma once

#include <cmath>
#include <utility>

namespace discdyn {

struct GoldenSectionResult {
  double argmin = 0.0;
  double value = 0.0;
};

/// Minimize a unimodal function on [lo, hi] by golden-section search.
///
/// One function evaluation per iteration after the initial two. Stops when
/// the bracket shrinks below `tol` (absolute) or after `max_iter` iterations.
template <class F>
GoldenSectionResult golden_section_minimize(F&& f, double lo, double hi,
                                            double tol, int max_iter = 200) {
  constexpr double inv_phi = 0.6180339887498949;  // (sqrt(5) - 1) / 2

  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);

  for (int i = 0; i < max_iter && (b - a) > tol; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }

  if (fc < fd) return {c, fc};
  return {d, fd};
}

}  // namespace discdyn
