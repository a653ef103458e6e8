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

#include "mentum/fitts.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "mentum/error.h"
#include "mentum/stats.h"
#include "mentum/text.h"

namespace mentum {

const double kEntropyWidthFactor = std::sqrt(2.0 * std::numbers::pi * std::numbers::e);

double nominal_id(double distance, double width) {
  if (!(width > 0.0)) throw AnalysisError("target width must be positive");
  if (!(distance >= 0.0)) throw AnalysisError("target distance must be non-negative");
  return std::log2(distance / width + 1.0);
}

double effective_id(double effective_distance, double endpoint_sd) {
  if (!(endpoint_sd > 0.0)) throw AnalysisError("degenerate endpoint spread: SD must be positive");
  if (!(effective_distance >= 0.0)) throw AnalysisError("effective distance must be non-negative");
  return std::log2(effective_distance / (kEntropyWidthFactor * endpoint_sd) + 1.0);
}

std::vector<ConditionStats> condition_stats(const std::vector<TrialRecord2D>& trials, const GroupingOptions& options) {
  std::map<std::pair<double, double>, std::vector<const TrialRecord2D*>> cells;
  for (const auto& t : trials) {
    if (t.target.is_center && !options.include_returns) continue;
    cells[{t.target.width, t.target.distance}].push_back(&t);
  }
  if (cells.empty()) throw AnalysisError("no trials to group into conditions");

  std::vector<ConditionStats> out;
  for (const auto& [key, members] : cells) {
    const auto [width, dist] = key;
    ConditionStats c;
    c.width = width;
    c.distance = dist;
    c.id = nominal_id(dist, width);
    c.trial_count = members.size();

    std::vector<double> travel, spread, times;
    for (const TrialRecord2D* t : members) {
      travel.push_back(distance(t->end_pos, t->start_pos));
      spread.push_back(distance(t->end_pos, t->target_pos));
      times.push_back(t->selection_time_s());
    }
    c.effective_distance = mean(travel);
    if (spread.size() < 2) {
      throw AnalysisError("condition W=" + format_double(width) + " D=" + format_double(dist) +
                          " has a single trial; endpoint spread is undefined");
    }
    c.endpoint_sd = sample_sd(spread);
    if (!(c.endpoint_sd > 0.0)) {
      throw AnalysisError("condition W=" + format_double(width) + " D=" + format_double(dist) +
                          ": degenerate endpoint spread (SD = 0)");
    }
    c.effective_id = effective_id(c.effective_distance, c.endpoint_sd);
    c.mean_selection_time = mean(times);
    out.push_back(c);
  }
  return out;
}

FittsFit fit_fitts(std::span<const FittsPoint> points) {
  const std::size_t n = points.size();
  if (n < 3) throw AnalysisError("Fitts regression needs at least 3 points");
  double mx = 0.0, my = 0.0;
  for (const auto& p : points) {
    mx += p.id;
    my += p.st;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : points) {
    sxx += (p.id - mx) * (p.id - mx);
    sxy += (p.id - mx) * (p.st - my);
    syy += (p.st - my) * (p.st - my);
  }
  if (!(sxx > 1e-12 * std::max(1.0, mx * mx) * static_cast<double>(n))) {
    throw AnalysisError("Fitts regression is rank deficient: index of difficulty is constant");
  }

  FittsFit fit;
  fit.n = n;
  fit.df1 = 1;
  fit.df2 = static_cast<int>(n) - 2;
  fit.b = sxy / sxx;
  fit.a = my - fit.b * mx;
  double ss_res = 0.0;
  for (const auto& p : points) {
    const double r = p.st - (fit.a + fit.b * p.id);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 0.0;
  if (fit.r_squared >= 1.0) {
    fit.f_stat = std::numeric_limits<double>::infinity();
    fit.p_value = 0.0;
  } else {
    fit.f_stat = fit.r_squared / (1.0 - fit.r_squared) * fit.df2;
    fit.p_value = f_distribution_sf(fit.f_stat, fit.df1, fit.df2);
  }
  const double s2 = ss_res / fit.df2;
  fit.b_se = std::sqrt(s2 / sxx);
  fit.a_se = std::sqrt(s2 * (1.0 / static_cast<double>(n) + mx * mx / sxx));
  return fit;
}

double throughput(const std::vector<std::vector<FittsPoint>>& grid) {
  if (grid.empty() || grid.front().empty()) throw AnalysisError("throughput needs a non-empty grid");
  const std::size_t m = grid.front().size();
  double total = 0.0;
  for (const auto& row : grid) {
    if (row.size() != m) throw AnalysisError("throughput grid is ragged");
    double row_sum = 0.0;
    for (const auto& cell : row) {
      if (!(cell.st > 0.0)) throw AnalysisError("selection time must be positive");
      row_sum += cell.id / cell.st;
    }
    total += row_sum / static_cast<double>(m);
  }
  return total / static_cast<double>(grid.size());
}

double error_rate(const std::vector<TrialRecord2D>& trials) {
  if (trials.empty()) throw AnalysisError("error rate of zero trials");
  const auto with_misclicks =
      std::count_if(trials.begin(), trials.end(), [](const auto& t) { return !t.misclicks.empty(); });
  return 100.0 * static_cast<double>(with_misclicks) / static_cast<double>(trials.size());
}

ExclusionResult exclusion_filter(const std::vector<TrialRecord2D>& trials, double limit_s) {
  ExclusionResult result;
  for (const auto& t : trials) {
    if (!(t.selection_time_s() > limit_s)) result.kept.push_back(t);
  }
  if (!trials.empty()) {
    result.excluded_percent =
        100.0 * static_cast<double>(trials.size() - result.kept.size()) / static_cast<double>(trials.size());
  }
  return result;
}

Report build_report(const std::vector<SessionLog>& sessions, const ReportOptions& options) {
  if (sessions.empty()) throw AnalysisError("report needs at least one session");
  Report report;
  report.options = options;

  std::map<std::string, std::vector<const SessionLog*>> pointing, arm;
  for (const auto& s : sessions) {
    const std::string label = s.header.participant.empty() ? s.header.session_id : s.header.participant;
    if (!s.complete) report.warnings.push_back("session " + label + " is partial");
    if (s.header.mode == SessionMode::kPointing) pointing[s.header.cohort].push_back(&s);
    if (s.header.mode == SessionMode::kArm3D) arm[s.header.cohort].push_back(&s);
  }

  for (const auto& [cohort, members] : pointing) {
    CohortReport c;
    c.cohort = cohort;
    std::vector<std::vector<FittsPoint>> tp_grid;
    std::vector<FittsPoint> fit_points;
    std::vector<double> tps, errors, excluded;
    for (const SessionLog* s : members) {
      ParticipantSummary p;
      p.participant = s->header.participant.empty() ? s->header.session_id : s->header.participant;
      std::vector<TrialRecord2D> trials = s->pointing_trials;
      if (options.exclude_over_s) {
        ExclusionResult ex = exclusion_filter(trials, *options.exclude_over_s);
        p.excluded_percent = ex.excluded_percent;
        trials = std::move(ex.kept);
      }
      p.trials = trials.size();
      p.error_rate = error_rate(trials);
      p.conditions = condition_stats(trials, options.grouping);

      if (!c.participants.empty()) {
        const auto& ref = c.participants.front().conditions;
        const bool same = ref.size() == p.conditions.size() &&
                          std::equal(ref.begin(), ref.end(), p.conditions.begin(), [](const auto& l, const auto& r) {
                            return l.width == r.width && l.distance == r.distance;
                          });
        if (!same) throw AnalysisError("cohort " + cohort + ": participants cover different condition grids");
      }
      std::vector<FittsPoint> row;
      for (const auto& cell : p.conditions) {
        row.push_back({cell.effective_id, cell.mean_selection_time});
        const double x = options.regressor == Regressor::kEffective ? cell.effective_id : cell.id;
        fit_points.push_back({x, cell.mean_selection_time});
      }
      p.throughput = throughput({row});
      tp_grid.push_back(std::move(row));
      tps.push_back(p.throughput);
      errors.push_back(p.error_rate);
      excluded.push_back(p.excluded_percent);
      c.participants.push_back(std::move(p));
    }
    c.fit = fit_fitts(fit_points);
    c.throughput = throughput(tp_grid);
    c.throughput_sem = sem(tps);
    c.error_rate = mean(errors);
    c.error_rate_sem = sem(errors);
    c.excluded_percent = mean(excluded);
    c.excluded_sem = sem(excluded);
    report.cohorts.push_back(std::move(c));
  }

  for (const auto& [cohort, members] : arm) {
    ArmCohortSummary a;
    a.cohort = cohort;
    std::vector<double> means;
    double completed = 0.0, expected = 0.0;
    for (const SessionLog* s : members) {
      completed += static_cast<double>(s->arm_trials.size());
      expected += s->header.arm.trials;
      if (static_cast<int>(s->arm_trials.size()) < s->header.arm.trials) continue;
      means.push_back(mean_completion_time(s->arm_trials, s->header.arm.trials));
    }
    a.participants = means.size();
    if (!means.empty()) {
      a.mean_completion_s = mean(means);
      a.sem_s = sem(means);
    }
    a.success_percent = expected > 0 ? 100.0 * completed / expected : 0.0;
    report.arm.push_back(a);
  }
  return report;
}

const std::vector<std::string>& report_csv_columns() {
  static const std::vector<std::string> columns = {
      "cohort",     "a",          "a_se",           "b",          "b_se",           "r_squared",
      "f_stat",     "n",          "df1",            "df2",        "p_value",        "throughput",
      "throughput_sem", "error_rate", "error_rate_sem", "excluded_percent", "excluded_sem"};
  return columns;
}

std::string report_csv(const Report& report) {
  std::string out;
  const auto& cols = report_csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += '\n';
  for (const auto& c : report.cohorts) {
    std::string name = c.cohort;
    std::replace(name.begin(), name.end(), ',', ';');
    const double values[] = {c.fit.a,          c.fit.a_se,         c.fit.b,           c.fit.b_se,
                             c.fit.r_squared,  c.fit.f_stat,       double(c.fit.n),   double(c.fit.df1),
                             double(c.fit.df2), c.fit.p_value,     c.throughput,      c.throughput_sem,
                             c.error_rate,     c.error_rate_sem,   c.excluded_percent, c.excluded_sem};
    out += name;
    for (double v : values) out += "," + format_double(v);
    out += '\n';
  }
  return out;
}

std::vector<CsvRow> parse_report_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty report CSV");
  const auto header = split(trim(line), ',');
  const auto& cols = report_csv_columns();
  if (header.size() != cols.size() || !std::equal(header.begin(), header.end(), cols.begin())) {
    throw IoError("report CSV header does not match the expected columns");
  }
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto fields = split(trim(line), ',');
    if (fields.size() != cols.size()) throw IoError("report CSV row has the wrong number of fields");
    CsvRow row;
    row.cohort = std::string(fields[0]);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      std::optional<double> v;
      if (fields[i] == "inf") v = std::numeric_limits<double>::infinity();
      else v = parse_double(fields[i]);
      if (!v) throw IoError("report CSV field '" + std::string(fields[i]) + "' is not a number");
      row.values.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pm(double v, double e, int digits) { return fixed(v, digits) + " ± " + fixed(e, digits); }

std::string p_text(double p) {
  char buf[64];
  if (p < 1e-4) {
    std::snprintf(buf, sizeof buf, "%.2e", p);
  } else {
    std::snprintf(buf, sizeof buf, "%.4f", p);
  }
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  // Count code points so "±" pads like one column.
  std::size_t visible = 0;
  for (unsigned char ch : s) visible += (ch & 0xC0) != 0x80;
  return s + std::string(width > visible ? width - visible : 1, ' ');
}

}  // namespace

std::string report_text(const Report& report) {
  constexpr std::size_t kLabel = 34;
  constexpr std::size_t kColumn = 24;
  std::ostringstream out;
  if (!report.cohorts.empty()) {
    out << "Fitts regression and pointing performance";
    if (report.options.exclude_over_s) {
      out << " (trials over " << format_double(*report.options.exclude_over_s) << " s excluded)";
    }
    out << "\nregressor: " << (report.options.regressor == Regressor::kEffective ? "effective ID" : "nominal ID")
        << ", reaches: " << (report.options.grouping.include_returns ? "outbound and return" : "outbound only")
        << "\n\n";

    out << pad("", kLabel);
    for (const auto& c : report.cohorts) out << pad(c.cohort, kColumn);
    out << '\n';
    auto row = [&](const std::string& label, auto cell) {
      out << pad(label, kLabel);
      for (const auto& c : report.cohorts) out << pad(cell(c), kColumn);
      out << '\n';
    };
    row("Intercept, a (s)", [](const CohortReport& c) { return pm(c.fit.a, c.fit.a_se, 2); });
    row("Slope, b (s/bits)", [](const CohortReport& c) { return pm(c.fit.b, c.fit.b_se, 2); });
    row("R-squared", [](const CohortReport& c) { return fixed(c.fit.r_squared, 2); });
    row("F-statistic vs. constant model", [](const CohortReport& c) { return fixed(c.fit.f_stat, 1); });
    row("N", [](const CohortReport& c) { return std::to_string(c.fit.n); });
    row("d.f", [](const CohortReport& c) { return std::to_string(c.fit.df2); });
    row("p-value", [](const CohortReport& c) { return p_text(c.fit.p_value); });
    row("Throughput, TP (bits/s)", [](const CohortReport& c) { return pm(c.throughput, c.throughput_sem, 2); });
    row("Error rate (%)", [](const CohortReport& c) { return pm(c.error_rate, c.error_rate_sem, 2); });
    row("Excluded trials (%)", [](const CohortReport& c) { return pm(c.excluded_percent, c.excluded_sem, 1); });
  }
  if (!report.arm.empty()) {
    if (!report.cohorts.empty()) out << '\n';
    out << "3D reach-and-hold (trial 1 excluded as practice)\n";
    for (const auto& a : report.arm) {
      out << "  " << pad(a.cohort, kColumn) << "completion " << pm(a.mean_completion_s, a.sem_s, 1)
          << " s, success " << fixed(a.success_percent, 0) << "%, n=" << a.participants << '\n';
    }
  }
  for (const auto& w : report.warnings) out << "warning: " << w << '\n';

  out << "\nReference values from published evaluations (not recomputed):\n"
         "  hand-operated TP (bits/s): isometric joystick 1.6-2.55, touchpad 0.99-2.9, mouse 3.7-4.9\n"
         "  Tongue Drive System, tetraplegia: TP 0.29 ± 0.21 (day 1), 0.72 ± 0.41 (day 6); "
         "error 64.68 ± 25.2% (day 1), 41.48 ± 26.0% (day 6)\n"
         "  BrainGate (trials over 25 s excluded): a = 0.8 s, b = 3.3 s/bit, false clicks 41%, time-outs 8.1%\n";
  return out.str();
}

}  // namespace mentum
