#include "evolearn/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace evolearn::stats {

namespace {

std::vector<double> pooled(std::span<const double> a, std::span<const double> b) {
    std::vector<double> all(a.begin(), a.end());
    all.insert(all.end(), b.begin(), b.end());
    return all;
}

void require_nonempty(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("mann_whitney_u: empty sample");
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    if (i + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(i);
    return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

}  // namespace

double mean(std::span<const double> s) {
    if (s.empty()) throw std::invalid_argument("mean: empty sample");
    return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
}

double population_sd(std::span<const double> s) {
    const double m = mean(s);
    double ss = 0.0;
    for (double v : s) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(s.size()));
}

double median(std::span<const double> s) {
    if (s.empty()) throw std::invalid_argument("median: empty sample");
    std::vector<double> v(s.begin(), s.end());
    std::sort(v.begin(), v.end());
    return quantile_sorted(v, 0.5);
}

std::vector<double> mid_ranks(std::span<const double> s) {
    std::vector<std::size_t> idx(s.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return s[i] < s[j]; });
    std::vector<double> ranks(s.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && s[idx[j + 1]] == s[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

TestResult mann_whitney_u_exact(std::span<const double> a, std::span<const double> b) {
    require_nonempty(a, b);
    const std::size_t na = a.size();
    const std::size_t n = na + b.size();
    if (n > kExactMannWhitneyLimit) throw std::invalid_argument("mann_whitney_u_exact: samples too large");
    const std::vector<double> ranks = mid_ranks(pooled(a, b));
    const double offset = static_cast<double>(na * (na + 1)) / 2.0;
    const double u = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(na), 0.0) - offset;

    // Every assignment of na of the pooled ranks to sample a is equally likely under H0.
    constexpr double eps = 1e-9;
    std::size_t total = 0, le = 0, ge = 0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) != na) continue;
        double r = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            if (mask & (1u << k)) r += ranks[k];
        const double uu = r - offset;
        ++total;
        if (uu <= u + eps) ++le;
        if (uu >= u - eps) ++ge;
    }
    const double p = 2.0 * static_cast<double>(std::min(le, ge)) / static_cast<double>(total);
    return {u, std::min(1.0, p)};
}

TestResult mann_whitney_u_normal(std::span<const double> a, std::span<const double> b) {
    require_nonempty(a, b);
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double n = na + nb;
    const std::vector<double> all = pooled(a, b);
    const std::vector<double> ranks = mid_ranks(all);
    const double u =
        std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(a.size()), 0.0) - na * (na + 1) / 2;

    // Tie correction: sum of t^3 - t over tie groups.
    std::vector<double> sorted = all;
    std::sort(sorted.begin(), sorted.end());
    double ties = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        ties += t * t * t - t;
        i = j + 1;
    }
    const double var = na * nb / 12.0 * ((n + 1) - ties / (n * (n - 1)));
    if (!(var > 0.0)) return {u, 1.0};
    const double z = std::max(0.0, std::abs(u - na * nb / 2) - 0.5) / std::sqrt(var);
    return {u, std::min(1.0, std::erfc(z / std::sqrt(2.0)))};
}

TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    require_nonempty(a, b);
    if (a.size() + b.size() <= kExactMannWhitneyLimit) return mann_whitney_u_exact(a, b);
    return mann_whitney_u_normal(a, b);
}

double bonferroni(double p_value, std::size_t m) {
    if (m == 0) throw std::invalid_argument("bonferroni: m must be >= 1");
    return std::min(1.0, p_value * static_cast<double>(m));
}

std::vector<double> bonferroni(std::span<const double> p_values, std::size_t m) {
    if (m < p_values.size()) throw std::invalid_argument("bonferroni: m smaller than number of p-values");
    std::vector<double> out;
    out.reserve(p_values.size());
    for (double p : p_values) out.push_back(bonferroni(p, m));
    return out;
}

TestResult spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
    if (x.size() < 3) throw std::invalid_argument("spearman: need at least 3 pairs");
    const std::vector<double> rx = mid_ranks(x);
    const std::vector<double> ry = mid_ranks(y);
    const double mx = mean(rx);
    const double my = mean(ry);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("spearman: constant sample");
    const double rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);

    const double dof = static_cast<double>(x.size()) - 2.0;
    if (std::abs(rho) >= 1.0) return {rho, 0.0};
    const double t = rho * std::sqrt(dof / (1.0 - rho * rho));
    const boost::math::students_t dist(dof);
    const double p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
    return {rho, std::clamp(p, 0.0, 1.0)};
}

Interval bootstrap_ci(std::span<const double> s, double level, std::size_t n_resamples, Rng& rng) {
    if (s.empty()) throw std::invalid_argument("bootstrap_ci: empty sample");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("bootstrap_ci: level outside (0, 1)");
    if (n_resamples < 100) throw std::invalid_argument("bootstrap_ci: need at least 100 resamples");
    if (std::all_of(s.begin(), s.end(), [&](double v) { return v == s.front(); })) return {s.front(), s.front()};
    const auto n = static_cast<std::int64_t>(s.size());
    std::vector<double> means(n_resamples);
    for (double& m : means) {
        double sum = 0.0;
        for (std::int64_t k = 0; k < n; ++k) sum += s[static_cast<std::size_t>(rng.uniform_int(0, n - 1))];
        m = sum / static_cast<double>(n);
    }
    std::sort(means.begin(), means.end());
    return {quantile_sorted(means, (1.0 - level) / 2.0), quantile_sorted(means, (1.0 + level) / 2.0)};
}

}  // namespace evolearn::stats
