#pragma once

#include <vector>

namespace npplab {

// Median of a non-empty sample (mean of the middle pair for even sizes).
double median(std::vector<double> v);
double mean(const std::vector<double>& v);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;      // standard error, 0 with two points
  double intercept_se = 0.0;
  double r = 0.0;             // Pearson correlation
};
// Ordinary least squares y = slope x + intercept; needs two distinct x.
LinearFit ols(const std::vector<double>& x, const std::vector<double>& y);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

// Area under the ROC curve of a score where larger means "positive"; ties
// count one half. Both samples must be non-empty.
double auc(const std::vector<double>& positives, const std::vector<double>& negatives);

// Best accuracy over single-threshold rules "positive iff score >= t" and
// "positive iff score <= t", on the pooled sample.
double best_threshold_accuracy(const std::vector<double>& positives, const std::vector<double>& negatives);

}  // namespace npplab
