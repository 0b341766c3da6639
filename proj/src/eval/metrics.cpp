#include "eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sliceguard::eval {

MetricsRecord compute_metrics(const std::vector<int>& predictions,
                              const std::vector<int>& labels) {
  if (predictions.size() != labels.size())
    throw std::invalid_argument("compute_metrics: length mismatch");
  if (predictions.empty())
    throw std::invalid_argument("compute_metrics: empty input");

  MetricsRecord m;
  for (size_t i = 0; i < predictions.size(); ++i) {
    bool p = predictions[i] != 0;
    bool y = labels[i] != 0;
    if (p && y) ++m.tp;
    else if (p && !y) ++m.fp;
    else if (!p && y) ++m.fn;
    else ++m.tn;
  }
  double total = static_cast<double>(predictions.size());
  m.accuracy = static_cast<double>(m.tp + m.tn) / total;
  m.precision = (m.tp + m.fp) > 0
                    ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp)
                    : 0.0;
  m.recall = (m.tp + m.fn) > 0
                 ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn)
                 : 0.0;
  m.f1 = (m.precision + m.recall) > 0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  m.fpr = (m.fp + m.tn) > 0
              ? static_cast<double>(m.fp) / static_cast<double>(m.fp + m.tn)
              : 0.0;
  m.fnr = (m.tp + m.fn) > 0
              ? static_cast<double>(m.fn) / static_cast<double>(m.tp + m.fn)
              : 0.0;
  return m;
}

double f1_score(const std::vector<int>& predictions, const std::vector<int>& labels) {
  return compute_metrics(predictions, labels).f1;
}

ROCCurve roc_auc(const std::vector<double>& confidences,
                 const std::vector<int>& labels) {
  if (confidences.size() != labels.size())
    throw std::invalid_argument("roc_auc: length mismatch");
  uint64_t n_pos = 0, n_neg = 0;
  for (int y : labels) (y != 0 ? n_pos : n_neg) += 1;
  if (n_pos == 0 || n_neg == 0)
    throw std::invalid_argument("roc_auc: both classes required");

  std::vector<size_t> order(confidences.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return confidences[a] > confidences[b];
  });

  ROCCurve curve;
  curve.points.push_back({0.0, 0.0});
  uint64_t tp = 0, fp = 0;
  size_t i = 0;
  while (i < order.size()) {
    // Group equal scores into one step.
    double score = confidences[order[i]];
    while (i < order.size() && confidences[order[i]] == score) {
      if (labels[order[i]] != 0) ++tp;
      else ++fp;
      ++i;
    }
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                            static_cast<double>(tp) / static_cast<double>(n_pos)});
  }

  double auc = 0.0;
  for (size_t k = 1; k < curve.points.size(); ++k) {
    auto [x0, y0] = curve.points[k - 1];
    auto [x1, y1] = curve.points[k];
    auc += (x1 - x0) * (y0 + y1) * 0.5;
  }
  curve.auc = auc;
  return curve;
}

namespace {

// Lentz continued fraction for the incomplete beta.
double beta_cf(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-15;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    a * std::log(x) + b * std::log(1.0 - x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0))
    return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_tailed_p(double t, int df) {
  double x = static_cast<double>(df) / (static_cast<double>(df) + t * t);
  return incomplete_beta(static_cast<double>(df) / 2.0, 0.5, x);
}

TTestResult paired_t_test(const std::vector<double>& scores_a,
                          const std::vector<double>& scores_b, double alpha) {
  if (scores_a.size() != scores_b.size())
    throw std::invalid_argument("paired_t_test: length mismatch");
  size_t n = scores_a.size();
  if (n < 2) throw std::invalid_argument("paired_t_test: need n >= 2");

  TTestResult r;
  r.alpha = alpha;
  r.degrees_of_freedom = static_cast<int>(n) - 1;
  r.differences.resize(n);
  double mean = 0.0;
  for (size_t i = 0; i < n; ++i) {
    r.differences[i] = scores_a[i] - scores_b[i];
    mean += r.differences[i];
  }
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double d : r.differences) ss += (d - mean) * (d - mean);
  double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd == 0.0) {
    r.zero_variance = true;
    r.p_value = 1.0;
    r.t_statistic = 0.0;
    r.significant = false;
    return r;
  }
  r.t_statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
  r.p_value = student_t_two_tailed_p(r.t_statistic, r.degrees_of_freedom);
  r.significant = r.p_value < alpha;
  return r;
}

}  // namespace sliceguard::eval
