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

#ifndef MENTUM_ONE_EURO_H_
#define MENTUM_ONE_EURO_H_

namespace mentum {

// Adaptive first-order low-pass (one-euro filter). The cutoff rises with the
// smoothed speed of the signal: cutoff = min_cutoff + beta * |dx/dt|.
class OneEuroFilter {
 public:
  explicit OneEuroFilter(double min_cutoff_hz = 1.0, double beta = 0.0, double derivative_cutoff_hz = 1.0);

  // dt_s <= 0 returns the previous output unchanged (or value when unprimed).
  double filter(double value, double dt_s);

  void set_parameters(double min_cutoff_hz, double beta);
  void reset();

  double min_cutoff() const { return min_cutoff_; }
  double beta() const { return beta_; }
  bool primed() const { return primed_; }
  double last_output() const { return x_; }

  // Smoothing factor of a first-order low-pass with the given cutoff.
  static double alpha(double cutoff_hz, double dt_s);

 private:
  double min_cutoff_;
  double beta_;
  double d_cutoff_;
  bool primed_ = false;
  double x_ = 0.0;
  double dx_ = 0.0;
};

}  // namespace mentum

#endif  // MENTUM_ONE_EURO_H_
