#ifndef DER_TESTS_SUPPORT_STATS_HPP_
#define DER_TESTS_SUPPORT_STATS_HPP_

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

// Test-only statistical oracles, independent of the library under test.
namespace testsupport {

inline double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p domain");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) {
        // series representation
        double ap = a, sum = 1.0 / a, del = sum;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-14) break;
        }
        return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    // continued fraction for the upper tail
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-14) break;
    }
    double q = std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    return 1.0 - q;
}

/// P-value of a chi-square statistic with df degrees of freedom.
inline double chi2_pvalue(double stat, int df) {
    return 1.0 - gamma_p(df / 2.0, stat / 2.0);
}

/// Chi-square goodness-of-fit p-value: observed counts vs expected probabilities.
inline double chi2_gof_pvalue(const std::vector<long>& counts, const std::vector<double>& probs) {
    if (counts.size() != probs.size()) throw std::invalid_argument("chi2: size mismatch");
    long total = 0;
    for (long c : counts) total += c;
    double stat = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        double expect = probs[i] * total;
        if (expect <= 0.0) throw std::invalid_argument("chi2: zero expected count");
        double d = counts[i] - expect;
        stat += d * d / expect;
    }
    return chi2_pvalue(stat, static_cast<int>(counts.size()) - 1);
}

/// Kolmogorov-Smirnov p-value for a sample against U(lo, hi).
inline double ks_uniform_pvalue(std::vector<double> sample, double lo, double hi) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        double cdf = (sample[i] - lo) / (hi - lo);
        d = std::max(d, std::abs((i + 1) / n - cdf));
        d = std::max(d, std::abs(cdf - i / n));
    }
    double lam = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
    double p = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        p += sign * 2.0 * std::exp(-2.0 * j * j * lam * lam);
        sign = -sign;
    }
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace testsupport

#endif  // DER_TESTS_SUPPORT_STATS_HPP_
