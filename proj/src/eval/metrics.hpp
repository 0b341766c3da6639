#pragma once

#include <cstdint>
#include <vector>

namespace sliceguard::eval {

struct MetricsRecord {
  double accuracy = 0, precision = 0, recall = 0, f1 = 0, auc = 0;
  uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
  double fpr = 0, fnr = 0;
};

struct ROCCurve {
  std::vector<std::pair<double, double>> points;  // (fpr, tpr)
  double auc = 0;
};

struct TTestResult {
  std::vector<double> differences;
  double t_statistic = 0;
  int degrees_of_freedom = 0;
  double p_value = 1.0;
  double alpha = 0.05;
  bool significant = false;
  bool zero_variance = false;
};

// Confusion-matrix metrics; zero-denominator cases are defined as 0.
// Throws std::invalid_argument on length mismatch or empty input.
MetricsRecord compute_metrics(const std::vector<int>& predictions,
                              const std::vector<int>& labels);

// Threshold sweep over sorted unique scores with tie grouping; AUC by
// trapezoid. Throws if only one class is present.
ROCCurve roc_auc(const std::vector<double>& confidences,
                 const std::vector<int>& labels);

// Two-tailed paired t-test on a - b. Zero-variance differences yield
// p = 1.0 with the zero_variance flag set. Throws on n < 2.
TTestResult paired_t_test(const std::vector<double>& scores_a,
                          const std::vector<double>& scores_b,
                          double alpha = 0.05);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

// Two-tailed Student-t p-value for |t| with df degrees of freedom.
double student_t_two_tailed_p(double t, int df);

double f1_score(const std::vector<int>& predictions, const std::vector<int>& labels);

}  // namespace sliceguard::eval
