#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "evolearn/rng.hpp"

namespace evolearn::stats {

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

double mean(std::span<const double> s);

// Population standard deviation (divides by n).
double population_sd(std::span<const double> s);

double median(std::span<const double> s);

// 1-based ranks with ties sharing their average rank.
std::vector<double> mid_ranks(std::span<const double> s);

// Largest combined size handled by exact enumeration.
inline constexpr std::size_t kExactMannWhitneyLimit = 12;

// Two-sided Mann-Whitney U test. statistic = U of sample a. Uses the exact
// permutation distribution when |a| + |b| <= 12, otherwise the normal
// approximation with tie and continuity corrections. Throws on empty input.
TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

TestResult mann_whitney_u_exact(std::span<const double> a, std::span<const double> b);
TestResult mann_whitney_u_normal(std::span<const double> a, std::span<const double> b);

// min(1, p * m) for every p. Requires m >= p_values.size().
std::vector<double> bonferroni(std::span<const double> p_values, std::size_t m);
double bonferroni(double p_value, std::size_t m);

// Spearman rank correlation on mid-ranks; two-sided p from Student's t with
// n - 2 degrees of freedom. Throws on length mismatch, n < 3 or a constant
// sample.
TestResult spearman(std::span<const double> x, std::span<const double> y);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

inline constexpr std::size_t kDefaultBootstrapResamples = 5000;

// Percentile bootstrap interval for the mean.
Interval bootstrap_ci(std::span<const double> s, double level, std::size_t n_resamples, Rng& rng);

}  // namespace evolearn::stats
