#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "core/rng.hpp"
#include "eval/metrics.hpp"

using namespace sliceguard;
using namespace sliceguard::eval;

namespace {

double simpson(const std::function<double(double)>& f, double a, double b,
               int n) {
  // n even
  double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Two-tailed p via direct numeric integration of the Student-t density.
double t_pvalue_by_integration(double t, int df) {
  double v = df;
  double logc = std::lgamma((v + 1) / 2) - std::lgamma(v / 2) -
                0.5 * std::log(v * M_PI);
  auto density = [&](double x) {
    return std::exp(logc - (v + 1) / 2 * std::log1p(x * x / v));
  };
  double at = std::fabs(t);
  // Tail mass from |t| out to a far cutoff; the t density decays
  // polynomially so push the cutoff well out and refine near |t|.
  double tail = simpson(density, at, at + 50.0, 200'000) +
                simpson(density, at + 50.0, at + 5000.0, 200'000);
  return 2.0 * tail;
}

// AUC by counting concordant pairs, ties worth 1/2.
double auc_by_pairs(const std::vector<double>& scores,
                    const std::vector<int>& labels) {
  double num = 0;
  uint64_t pairs = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j])
        num += 1.0;
      else if (scores[i] == scores[j])
        num += 0.5;
    }
  }
  return num / pairs;
}

}  // namespace

TEST_CASE("confusion-matrix metrics on a hand-checked table") {
  // tp=4 fp=1 tn=3 fn=2
  std::vector<int> pred = {1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
  std::vector<int> gold = {1, 1, 1, 1, 0, 0, 0, 0, 1, 1};
  auto m = compute_metrics(pred, gold);
  CHECK(m.tp == 4);
  CHECK(m.fp == 1);
  CHECK(m.tn == 3);
  CHECK(m.fn == 2);
  CHECK(m.accuracy == doctest::Approx(0.7));
  CHECK(m.precision == doctest::Approx(4.0 / 5));
  CHECK(m.recall == doctest::Approx(4.0 / 6));
  CHECK(m.f1 == doctest::Approx(2 * 0.8 * (4.0 / 6) / (0.8 + 4.0 / 6)));
  CHECK(m.fpr == doctest::Approx(0.25));
  CHECK(m.fnr == doctest::Approx(2.0 / 6));

  CHECK_THROWS_AS(compute_metrics({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(compute_metrics({1}, {1, 0}), std::invalid_argument);
}

TEST_CASE("zero-denominator conventions") {
  // No positives predicted, no positives present: precision/recall/f1 = 0.
  auto m = compute_metrics({0, 0, 0}, {0, 0, 0});
  CHECK(m.precision == 0.0);
  CHECK(m.recall == 0.0);
  CHECK(m.f1 == 0.0);
  CHECK(m.fnr == 0.0);
  CHECK(m.accuracy == doctest::Approx(1.0));
  auto all_pos = compute_metrics({1, 1}, {1, 1});
  CHECK(all_pos.fpr == 0.0);
  CHECK(all_pos.f1 == doctest::Approx(1.0));
}

TEST_CASE("incomplete beta sanity identities") {
  CHECK(incomplete_beta(2.0, 3.0, 0.0) == doctest::Approx(0.0));
  CHECK(incomplete_beta(2.0, 3.0, 1.0) == doctest::Approx(1.0));
  // I_x(1,1) = x.
  for (double x : {0.1, 0.37, 0.5, 0.9})
    CHECK(incomplete_beta(1.0, 1.0, x) == doctest::Approx(x).epsilon(1e-12));
  // Symmetry I_x(a,b) = 1 - I_{1-x}(b,a).
  CHECK(incomplete_beta(2.5, 4.0, 0.3) ==
        doctest::Approx(1.0 - incomplete_beta(4.0, 2.5, 0.7)).epsilon(1e-12));
  // I_x(1,b) = 1-(1-x)^b.
  CHECK(incomplete_beta(1.0, 5.0, 0.2) ==
        doctest::Approx(1.0 - std::pow(0.8, 5.0)).epsilon(1e-12));
}

TEST_CASE("t-test p-values agree with direct density integration") {
  struct Case {
    double t;
    int df;
  };
  for (auto [t, df] : {Case{6.9282, 2}, Case{2.5, 4}, Case{1.0, 8},
                       Case{0.3, 2}, Case{4.2, 30}}) {
    double expect = t_pvalue_by_integration(t, df);
    CHECK(student_t_two_tailed_p(t, df) ==
          doctest::Approx(expect).epsilon(1e-6));
  }
}

TEST_CASE("paired t-test on the worked example") {
  // d = {0.03, 0.04, 0.05}: mean 0.04, sd 0.01, t = 0.04/(0.01/sqrt 3).
  std::vector<double> a = {0.93, 0.94, 0.95}, b = {0.90, 0.90, 0.90};
  auto r = paired_t_test(a, b);
  CHECK(r.t_statistic == doctest::Approx(6.9282).epsilon(1e-4));
  CHECK(r.degrees_of_freedom == 2);
  CHECK(r.p_value == doctest::Approx(0.0202).epsilon(2e-2));
  CHECK(r.significant);

  SUBCASE("zero variance in differences") {
    std::vector<double> c = {0.5, 0.6, 0.7}, d = {0.4, 0.5, 0.6};
    auto z = paired_t_test(c, d);
    CHECK(z.zero_variance);
    CHECK(z.p_value == doctest::Approx(1.0));
    CHECK(!z.significant);
  }
  SUBCASE("n < 2 rejected") {
    CHECK_THROWS_AS(paired_t_test({0.5}, {0.4}), std::invalid_argument);
  }
}

TEST_CASE("ROC endpoints, perfect and reversed rankers") {
  std::vector<double> s = {0.9, 0.8, 0.3, 0.1};
  std::vector<int> y = {1, 1, 0, 0};
  auto roc = roc_auc(s, y);
  CHECK(roc.auc == doctest::Approx(1.0));
  CHECK(roc.points.front() == std::make_pair(0.0, 0.0));
  CHECK(roc.points.back() == std::make_pair(1.0, 1.0));

  std::vector<int> flipped = {0, 0, 1, 1};
  CHECK(roc_auc(s, flipped).auc == doctest::Approx(0.0));

  CHECK_THROWS_AS(roc_auc({0.5, 0.6}, {1, 1}), std::invalid_argument);
}

TEST_CASE("trapezoid AUC equals concordant-pair AUC, ties included") {
  Rng rng(77);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> scores;
    std::vector<int> labels;
    for (int i = 0; i < 300; ++i) {
      int y = rng.bernoulli(0.4) ? 1 : 0;
      // Coarse quantization forces score ties across classes.
      double s = std::round((rng.uniform() * 0.6 + 0.3 * y) * 20.0) / 20.0;
      scores.push_back(s);
      labels.push_back(y);
    }
    auto roc = roc_auc(scores, labels);
    CHECK(roc.auc == doctest::Approx(auc_by_pairs(scores, labels)).epsilon(1e-10));
    // Monotone non-decreasing sweep.
    for (size_t i = 1; i < roc.points.size(); ++i) {
      CHECK(roc.points[i].first >= roc.points[i - 1].first);
      CHECK(roc.points[i].second >= roc.points[i - 1].second);
    }
  }
}
