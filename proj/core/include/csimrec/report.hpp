#pragma once

#include <optional>
#include <string>

#include "csimrec/metrics.hpp"

namespace csimrec {

struct RecoveryReport {
  int iterations = 0;
  bool converged = false;  // stopped on the relative-change test
  double seconds = 0.0;
  double final_alpha = 0.0;
  double feasibility = 0.0;  // |x - D s| at the last iterate
  std::string config;        // effective solver configuration, key=value form
  std::optional<QualityReport> quality;  // filled when a reference is known
};

}  // namespace csimrec
