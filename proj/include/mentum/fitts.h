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

// Pointing-performance analytics: index of difficulty, effective index of
// difficulty, Fitts regression with its F-test, throughput, error rate and
// the selection-time exclusion filter.

#ifndef MENTUM_FITTS_H_
#define MENTUM_FITTS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mentum/session_log.h"
#include "mentum/task_engine.h"

namespace mentum {

// sqrt(2 * pi * e): the width of a uniform distribution with the same entropy
// as a normal distribution of unit standard deviation. Rounds to 4.133.
extern const double kEntropyWidthFactor;

// log2(D / W + 1). Throws AnalysisError unless D >= 0 and W > 0.
double nominal_id(double distance, double width);

// log2(De / (sqrt(2 pi e) * SD) + 1). Throws AnalysisError when SD <= 0
// (degenerate endpoint spread) or De < 0.
double effective_id(double effective_distance, double endpoint_sd);

struct ConditionStats {
  double distance = 0.0;  // nominal D, px
  double width = 0.0;     // nominal W, px
  double id = 0.0;        // bits
  double effective_distance = 0.0;  // De: mean |end - start|, px
  double endpoint_sd = 0.0;         // SD of |end - target center|, px
  double effective_id = 0.0;        // bits
  double mean_selection_time = 0.0; // STe, s
  std::size_t trial_count = 0;
};

struct GroupingOptions {
  // Whether reaches back to the center count alongside outbound reaches.
  bool include_returns = true;
};

// Collapses orientation into the 6 (W, D) cells, ordered by width then
// distance. Throws AnalysisError for an empty cell or degenerate spread.
std::vector<ConditionStats> condition_stats(const std::vector<TrialRecord2D>& trials,
                                            const GroupingOptions& options = {});

struct FittsPoint {
  double id = 0.0;  // predictor, bits
  double st = 0.0;  // selection time, s
};

struct FittsFit {
  double a = 0.0;  // intercept, s
  double b = 0.0;  // slope, s/bit
  double a_se = 0.0;
  double b_se = 0.0;
  double r_squared = 0.0;
  double f_stat = 0.0;
  int df1 = 1;
  int df2 = 0;
  double p_value = 1.0;
  std::size_t n = 0;
};

// Ordinary least squares ST = a + b * ID, tested against the constant model:
// F = R^2 / (1 - R^2) * (N - 2) on (1, N - 2) degrees of freedom. Throws
// AnalysisError for N < 3 or a constant predictor.
FittsFit fit_fitts(std::span<const FittsPoint> points);

// Mean over participants of the mean over conditions of IDe / STe. Rows are
// participants, columns conditions. Throws AnalysisError for ragged or empty
// grids and non-positive times.
double throughput(const std::vector<std::vector<FittsPoint>>& grid);

// Percentage of trials with at least one click outside the target.
double error_rate(const std::vector<TrialRecord2D>& trials);

struct ExclusionResult {
  std::vector<TrialRecord2D> kept;
  double excluded_percent = 0.0;
};

// Drops trials with selection time strictly greater than limit_s.
ExclusionResult exclusion_filter(const std::vector<TrialRecord2D>& trials, double limit_s = 25.0);

// --- Reports ---------------------------------------------------------------

enum class Regressor {
  kEffective,  // regress STe on IDe
  kNominal,    // regress STe on the nominal ID of each cell
};

struct ReportOptions {
  std::optional<double> exclude_over_s;
  GroupingOptions grouping;
  Regressor regressor = Regressor::kEffective;
};

struct ParticipantSummary {
  std::string participant;
  std::vector<ConditionStats> conditions;
  double throughput = 0.0;
  double error_rate = 0.0;
  double excluded_percent = 0.0;
  std::size_t trials = 0;
};

struct CohortReport {
  std::string cohort;
  FittsFit fit;
  double throughput = 0.0;
  double throughput_sem = 0.0;
  double error_rate = 0.0;
  double error_rate_sem = 0.0;
  double excluded_percent = 0.0;
  double excluded_sem = 0.0;
  std::vector<ParticipantSummary> participants;
};

struct ArmCohortSummary {
  std::string cohort;
  double mean_completion_s = 0.0;
  double sem_s = 0.0;
  double success_percent = 0.0;
  std::size_t participants = 0;
};

struct Report {
  ReportOptions options;
  std::vector<CohortReport> cohorts;
  std::vector<ArmCohortSummary> arm;
  std::vector<std::string> warnings;
};

// Pointing sessions are grouped by header cohort, one participant per
// session; arm sessions are summarized separately. Throws AnalysisError when
// no session is given or participants in a cohort cover different cells.
Report build_report(const std::vector<SessionLog>& sessions, const ReportOptions& options = {});

// Columns: cohort,a,a_se,b,b_se,r_squared,f_stat,n,df1,df2,p_value,
// throughput,throughput_sem,error_rate,error_rate_sem,excluded_percent,
// excluded_sem
std::string report_csv(const Report& report);

struct CsvRow {
  std::string cohort;
  std::vector<double> values;  // the numeric columns in order
};
std::vector<CsvRow> parse_report_csv(const std::string& text);
const std::vector<std::string>& report_csv_columns();

// Metrics as rows, cohorts as columns, followed by the arm summary and
// published reference values for context.
std::string report_text(const Report& report);

}  // namespace mentum

#endif  // MENTUM_FITTS_H_
