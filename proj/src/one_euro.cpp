// Copyright 2026 The Mentum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mentum/one_euro.h"

#include <cmath>
#include <numbers>

namespace mentum {

OneEuroFilter::OneEuroFilter(double min_cutoff_hz, double beta, double derivative_cutoff_hz)
    : min_cutoff_(min_cutoff_hz), beta_(beta), d_cutoff_(derivative_cutoff_hz) {}

double OneEuroFilter::alpha(double cutoff_hz, double dt_s) {
  const double tau = 1.0 / (2.0 * std::numbers::pi * cutoff_hz);
  return 1.0 / (1.0 + tau / dt_s);
}

double OneEuroFilter::filter(double value, double dt_s) {
  if (!primed_) {
    primed_ = true;
    x_ = value;
    dx_ = 0.0;
    return x_;
  }
  if (dt_s <= 0.0) return x_;

  const double raw_dx = (value - x_) / dt_s;
  dx_ += alpha(d_cutoff_, dt_s) * (raw_dx - dx_);
  const double cutoff = min_cutoff_ + beta_ * std::abs(dx_);
  x_ += alpha(cutoff, dt_s) * (value - x_);
  return x_;
}

void OneEuroFilter::set_parameters(double min_cutoff_hz, double beta) {
  min_cutoff_ = min_cutoff_hz;
  beta_ = beta;
}

void OneEuroFilter::reset() {
  primed_ = false;
  x_ = dx_ = 0.0;
}

}  // namespace mentum
