#pragma once

#include <cmath>
#include <string>

#include "rcmsim/simulation.hpp"

namespace rcmsim {

/// Headline statistics of one run. Everything except runtime_seconds is a
/// pure function of the log and is reproducible from the CSV.
struct RunSummary {
  std::string scenario;
  double terminal_e_rcm = 0.0;        // m
  double max_e_rcm = 0.0;             // m
  double terminal_f_rcm_norm = 0.0;   // N
  double rms_e_ins = 0.0;             // m
  double classification_accuracy = 0.0;  // % of steps matching truth loads
  double runtime_seconds = 0.0;
};

/// Ground-truth loading case of one record: the instrument schedule decides
/// whether a second force was present.
inline LoadCase true_load_case(const SimRecord& r) {
  return r.f_ins_true.isZero() ? LoadCase::SingleRcm
                               : LoadCase::RcmPlusInstrument;
}

inline RunSummary summarize(const SimLog& log, const std::string& scenario,
                            double runtime_seconds = 0.0) {
  RunSummary s;
  s.scenario = scenario;
  s.runtime_seconds = runtime_seconds;
  if (log.records.empty()) return s;

  double sum_sq_e_ins = 0.0;
  std::size_t matches = 0;
  for (const SimRecord& r : log.records) {
    s.max_e_rcm = std::max(s.max_e_rcm, r.e_rcm);
    sum_sq_e_ins += r.e_ins * r.e_ins;
    if (r.load_case == true_load_case(r)) ++matches;
  }
  const SimRecord& last = log.records.back();
  s.terminal_e_rcm = last.e_rcm;
  s.terminal_f_rcm_norm = last.f_rcm_true.norm();
  s.rms_e_ins =
      std::sqrt(sum_sq_e_ins / static_cast<double>(log.records.size()));
  s.classification_accuracy = 100.0 * static_cast<double>(matches) /
                              static_cast<double>(log.records.size());
  return s;
}

/// Field-wise equality of the reproducible statistics (runtime excluded).
inline bool statistics_equal(const RunSummary& a, const RunSummary& b) {
  auto same = [](double x, double y) {
    return x == y || (std::isnan(x) && std::isnan(y));
  };
  return a.scenario == b.scenario && same(a.terminal_e_rcm, b.terminal_e_rcm) &&
         same(a.max_e_rcm, b.max_e_rcm) &&
         same(a.terminal_f_rcm_norm, b.terminal_f_rcm_norm) &&
         same(a.rms_e_ins, b.rms_e_ins) &&
         same(a.classification_accuracy, b.classification_accuracy);
}

}  // namespace rcmsim
