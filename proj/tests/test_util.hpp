#pragma once

#include <functional>
#include <stdexcept>

#include "screening/types.hpp"

namespace screening::test {

// Runs f expecting a ModelError and hands back its code for exact matching.
inline Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ModelError& e) {
    return e.code();
  }
  throw std::runtime_error("expected a ModelError, none was thrown");
}

// Benchmark economy used across the test suite: two surplus levels one gap
// apart, a screening-friendly prior, and light symmetric wage observability.
inline ModelParams p0() {
  ModelParams p;
  p.s_low = 1.0;
  p.s_high = 2.0;
  p.p = 0.6;
  p.beta = 0.4;
  p.delta = 0.5;
  p.d = 0.5;
  p.n_workers = 4;
  p.variant = Variant::Simple;
  return p;
}

// Same economy under alternating offers, with the prior inside the
// intermediate-beliefs range.
inline ModelParams p0_alt() {
  ModelParams p = p0();
  p.p = 0.45;
  p.variant = Variant::AlternatingOffers;
  return p;
}

}  // namespace screening::test
