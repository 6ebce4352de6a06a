#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace collabscope::stats {

enum class Tails { one, two };
enum class Alternative { greater, less, two_sided };

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    Tails tails = Tails::two;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    std::string method;
    bool exact = false;        // exact enumeration vs. asymptotic approximation
    bool degenerate = false;   // statistic undefined (e.g. zero variance)
    std::optional<double> median1;
    std::optional<double> median2;
};

inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double median_sorted(std::span<const double> sorted) {
    const std::size_t n = sorted.size();
    if (n == 0) throw std::invalid_argument("median: empty sample");
    return n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

inline double median(std::span<const double> sample) {
    std::vector<double> s(sample.begin(), sample.end());
    std::sort(s.begin(), s.end());
    return median_sorted(s);
}

// Linear-interpolation quantile of a sorted sample (position q*(n-1)).
inline double quantile_sorted(std::span<const double> sorted, double q) {
    const std::size_t n = sorted.size();
    if (n == 0) throw std::invalid_argument("quantile: empty sample");
    if (n == 1) return sorted[0];
    const double pos = q * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

// Pooled two-proportion z-test. One-tailed p is the upper tail, i.e. the
// alternative that group 1's proportion exceeds group 2's; swapping the
// groups negates z. A pooled proportion of 0 or 1 leaves z undefined and is
// flagged degenerate instead.
inline TestResult two_proportion_z(std::uint64_t x1, std::uint64_t n1, std::uint64_t x2,
                                   std::uint64_t n2, Tails tails) {
    if (n1 == 0 || n2 == 0)
        throw std::invalid_argument("two_proportion_z: sample sizes must be positive");
    if (x1 > n1 || x2 > n2)
        throw std::invalid_argument("two_proportion_z: successes exceed trials");
    TestResult r;
    r.tails = tails;
    r.n1 = n1;
    r.n2 = n2;
    r.method = "two-proportion-z";
    const double p1 = static_cast<double>(x1) / static_cast<double>(n1);
    const double p2 = static_cast<double>(x2) / static_cast<double>(n2);
    const double pooled = static_cast<double>(x1 + x2) / static_cast<double>(n1 + n2);
    if (pooled == 0.0 || pooled == 1.0) {
        r.degenerate = true;
        r.statistic = std::numeric_limits<double>::quiet_NaN();
        r.p_value = 1.0;
        return r;
    }
    const double se = std::sqrt(pooled * (1.0 - pooled) *
                                (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
    r.statistic = (p1 - p2) / se;
    r.p_value = tails == Tails::two ? 2.0 * (1.0 - std_normal_cdf(std::abs(r.statistic)))
                                    : 1.0 - std_normal_cdf(r.statistic);
    r.p_value = std::clamp(r.p_value, 0.0, 1.0);
    return r;
}

namespace detail {

// Null distribution of the Mann-Whitney U statistic for untied samples:
// counts[u] = number of rank arrangements with U = u, u in [0, n1*n2].
inline std::vector<double> mwu_exact_counts(std::size_t n1, std::size_t n2) {
    const std::size_t umax = n1 * n2;
    // f(i, j, u): arrangements of i sample-1 and j sample-2 ranks with U = u.
    // Recurrence f(i, j, u) = f(i-1, j, u-j) + f(i, j-1, u).
    std::vector<std::vector<double>> f(n1 + 1, std::vector<double>(umax + 1, 0.0));
    for (std::size_t i = 0; i <= n1; ++i) f[i][0] = 1.0;  // j = 0 column start
    for (std::size_t j = 1; j <= n2; ++j) {
        std::vector<std::vector<double>> nf(n1 + 1, std::vector<double>(umax + 1, 0.0));
        for (std::size_t u = 0; u <= umax; ++u) nf[0][u] = (u == 0) ? 1.0 : 0.0;
        for (std::size_t i = 1; i <= n1; ++i)
            for (std::size_t u = 0; u <= umax; ++u)
                nf[i][u] = (u >= j ? nf[i - 1][u - j] : 0.0) + f[i][u];
        f = std::move(nf);
    }
    return f[n1];
}

}  // namespace detail

struct MwuOptions {
    std::size_t exact_max_total = 12;  // exact enumeration up to n1+n2 <= this, ties absent
    bool continuity_correction = true;
};

// Mann-Whitney U test with midrank tie handling. The statistic is U for
// sample 1 (number of (x, y) pairs with x > y, ties counting 1/2). Small
// untied samples take the exact enumeration path; otherwise the normal
// approximation with tie-corrected variance is used. Sample medians are
// reported alongside the test.
inline TestResult mann_whitney_u(std::span<const double> s1, std::span<const double> s2,
                                 Alternative alt, const MwuOptions& opt = {}) {
    const std::size_t n1 = s1.size(), n2 = s2.size();
    if (n1 == 0 || n2 == 0)
        throw std::invalid_argument("mann_whitney_u: samples must be non-empty");

    struct Entry {
        double value;
        bool first;
    };
    std::vector<Entry> all;
    all.reserve(n1 + n2);
    for (double v : s1) all.push_back({v, true});
    for (double v : s2) all.push_back({v, false});
    std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) {
        return a.value < b.value;
    });

    const std::size_t n = n1 + n2;
    double rank_sum1 = 0.0;
    double tie_term = 0.0;  // sum of t^3 - t over tie groups
    bool has_ties = false;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && all[j].value == all[i].value) ++j;
        const double t = static_cast<double>(j - i);
        if (j - i > 1) {
            has_ties = true;
            tie_term += t * t * t - t;
        }
        const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t k = i; k < j; ++k)
            if (all[k].first) rank_sum1 += midrank;
        i = j;
    }
    const double u1 =
        rank_sum1 - static_cast<double>(n1) * (static_cast<double>(n1) + 1.0) / 2.0;
    const double nn = static_cast<double>(n1) * static_cast<double>(n2);

    TestResult r;
    r.statistic = u1;
    r.tails = alt == Alternative::two_sided ? Tails::two : Tails::one;
    r.n1 = n1;
    r.n2 = n2;
    {
        std::vector<double> c1(s1.begin(), s1.end()), c2(s2.begin(), s2.end());
        std::sort(c1.begin(), c1.end());
        std::sort(c2.begin(), c2.end());
        r.median1 = median_sorted(c1);
        r.median2 = median_sorted(c2);
    }

    if (!has_ties && n <= opt.exact_max_total) {
        const auto counts = detail::mwu_exact_counts(n1, n2);
        double total = 0.0;
        for (double c : counts) total += c;
        const auto iu = static_cast<std::size_t>(std::llround(u1));  // integer when untied
        double ge = 0.0, le = 0.0;
        for (std::size_t u = 0; u < counts.size(); ++u) {
            if (u >= iu) ge += counts[u];
            if (u <= iu) le += counts[u];
        }
        double p;
        switch (alt) {
            case Alternative::greater: p = ge / total; break;
            case Alternative::less: p = le / total; break;
            default: p = std::min(1.0, 2.0 * std::min(ge, le) / total); break;
        }
        r.p_value = p;
        r.exact = true;
        r.method = "mann-whitney-u-exact";
        return r;
    }

    const double mean = nn / 2.0;
    const double nd = static_cast<double>(n);
    const double var = nn / 12.0 * ((nd + 1.0) - tie_term / (nd * (nd - 1.0)));
    r.exact = false;
    if (var <= 0.0) {
        // All observations identical; U is constant at its mean.
        r.degenerate = true;
        r.p_value = 1.0;
        r.method = "mann-whitney-u-normal-degenerate";
        return r;
    }
    const double sd = std::sqrt(var);
    const double cc = opt.continuity_correction ? 0.5 : 0.0;
    double p;
    switch (alt) {
        case Alternative::greater: p = 1.0 - std_normal_cdf((u1 - mean - cc) / sd); break;
        case Alternative::less: p = std_normal_cdf((u1 - mean + cc) / sd); break;
        default: p = 2.0 * (1.0 - std_normal_cdf((std::abs(u1 - mean) - cc) / sd)); break;
    }
    r.p_value = std::clamp(p, 0.0, 1.0);
    r.method = opt.continuity_correction ? "mann-whitney-u-normal-cc" : "mann-whitney-u-normal";
    return r;
}

// Survival function of the Kolmogorov distribution, Q(lambda). Below 0.2 the
// value is 1 to within 1e-13 and the alternating series converges too slowly
// to bother with.
inline double kolmogorov_q(double lambda) {
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1) ? term : -term;
        if (term < 1e-12) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

// Two-sample Kolmogorov-Smirnov test. D is the supremum ECDF distance found
// by a sorted merge; the p-value uses the asymptotic Kolmogorov distribution
// at effective sample size n1*n2/(n1+n2).
inline TestResult ks_two_sample(std::span<const double> s1, std::span<const double> s2) {
    const std::size_t n1 = s1.size(), n2 = s2.size();
    if (n1 == 0 || n2 == 0)
        throw std::invalid_argument("ks_two_sample: samples must be non-empty");
    std::vector<double> a(s1.begin(), s1.end()), b(s2.begin(), s2.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < n1 && j < n2) {
        const double v = std::min(a[i], b[j]);
        while (i < n1 && a[i] == v) ++i;
        while (j < n2 && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / static_cast<double>(n1) -
                                 static_cast<double>(j) / static_cast<double>(n2)));
    }
    TestResult r;
    r.statistic = d;
    r.tails = Tails::two;
    r.n1 = n1;
    r.n2 = n2;
    r.method = "kolmogorov-smirnov-asymptotic";
    const double ne = static_cast<double>(n1) * static_cast<double>(n2) /
                      static_cast<double>(n1 + n2);
    r.p_value = kolmogorov_q(std::sqrt(ne) * d);
    return r;
}

struct DensityCurve {
    std::vector<double> grid;
    std::vector<double> density;
    double bandwidth = 0.0;
    std::size_t n = 0;  // sample size
};

// Silverman's rule of thumb: 0.9 * min(sd, IQR/1.34) * n^(-1/5), falling back
// to sd when the IQR collapses. Rejects all-identical samples (zero spread).
inline double silverman_bandwidth(std::span<const double> sample) {
    const std::size_t n = sample.size();
    if (n < 2) throw std::invalid_argument("silverman_bandwidth: need at least 2 observations");
    std::vector<double> s(sample.begin(), sample.end());
    std::sort(s.begin(), s.end());
    double mean = 0.0;
    for (double v : s) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : s) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const double iqr = quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (spread <= 0.0) spread = sd;
    if (spread <= 0.0)
        throw std::invalid_argument(
            "silverman_bandwidth: sample has zero spread; supply a bandwidth explicitly");
    return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

// Gaussian kernel density estimate evaluated on a uniform grid spanning
// [min - 3h, max + 3h]. Kernel contributions beyond 8 bandwidths are below
// double precision and are skipped via a sorted-window scan. The curve is
// normalized to unit trapezoidal mass on the grid.
inline DensityCurve kde(std::span<const double> sample,
                        std::optional<double> bandwidth = std::nullopt,
                        std::size_t grid_size = 512) {
    const std::size_t n = sample.size();
    if (n < 2) throw std::invalid_argument("kde: need at least 2 observations");
    if (grid_size < 2) throw std::invalid_argument("kde: grid_size must be at least 2");
    const double h = bandwidth ? *bandwidth : silverman_bandwidth(sample);
    if (!(h > 0.0)) throw std::invalid_argument("kde: bandwidth must be positive");

    std::vector<double> s(sample.begin(), sample.end());
    std::sort(s.begin(), s.end());
    const double lo = s.front() - 3.0 * h;
    const double hi = s.back() + 3.0 * h;
    const double step = (hi - lo) / static_cast<double>(grid_size - 1);

    DensityCurve c;
    c.bandwidth = h;
    c.n = n;
    c.grid.resize(grid_size);
    c.density.resize(grid_size);
    constexpr double two_pi = 6.283185307179586476925286766559;
    const double scale = 1.0 / (static_cast<double>(n) * h * std::sqrt(two_pi));
    for (std::size_t g = 0; g < grid_size; ++g) {
        const double x = lo + step * static_cast<double>(g);
        c.grid[g] = x;
        auto first = std::lower_bound(s.begin(), s.end(), x - 8.0 * h);
        auto last = std::upper_bound(first, s.end(), x + 8.0 * h);
        double acc = 0.0;
        for (auto it = first; it != last; ++it) {
            const double t = (x - *it) / h;
            acc += std::exp(-0.5 * t * t);
        }
        c.density[g] = acc * scale;
    }
    double mass = 0.0;
    for (std::size_t g = 0; g + 1 < grid_size; ++g)
        mass += 0.5 * (c.density[g] + c.density[g + 1]) * step;
    if (mass > 0.0)
        for (double& v : c.density) v /= mass;
    return c;
}

inline double trapezoid_integral(const DensityCurve& c) {
    double acc = 0.0;
    for (std::size_t g = 0; g + 1 < c.grid.size(); ++g)
        acc += 0.5 * (c.density[g] + c.density[g + 1]) * (c.grid[g + 1] - c.grid[g]);
    return acc;
}

inline double curve_mean(const DensityCurve& c) {
    double acc = 0.0;
    for (std::size_t g = 0; g + 1 < c.grid.size(); ++g) {
        const double dx = c.grid[g + 1] - c.grid[g];
        acc += 0.5 * (c.grid[g] * c.density[g] + c.grid[g + 1] * c.density[g + 1]) * dx;
    }
    return acc;
}

}  // namespace collabscope::stats
