// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
#include "conewalk/stats.hpp"

#include <algorithm>
#include <cmath>

#include "conewalk/rng.hpp"
#include "conewalk/specfun.hpp"

namespace conewalk::stats {

KsOneResult ks_one_sample(std::vector<double> samples,
                          std::function<double(double)> const& cdf)
{
    if (samples.empty())
        throw ValidationError("KS test needs at least one sample");
    std::sort(samples.begin(), samples.end());
    std::size_t const n = samples.size();
    double d = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double const f = cdf(samples[i]);
        if (f < -1e-12 || f > 1 + 1e-12)
            throw ValidationError("cdf value outside [0, 1]");
        d = std::max(d, f - static_cast<double>(i) / static_cast<double>(n));
        d = std::max(d, static_cast<double>(i + 1) / static_cast<double>(n) - f);
    }
    KsOneResult out;
    out.statistic = d;
    out.n = n;
    out.p_value = sf::kolmogorov_q(std::sqrt(static_cast<double>(n)) * d);
    return out;
}

KsTwoResult ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha)
{
    if (a.empty() || b.empty())
        throw ValidationError("KS test needs nonempty samples");
    if (!(alpha > 0 && alpha < 1))
        throw ValidationError("alpha must lie in (0, 1)");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double const m = static_cast<double>(a.size());
    double const n = static_cast<double>(b.size());
    double d = 0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        double const x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x)
            ++i;
        while (j < b.size() && b[j] <= x)
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / m -
                                 static_cast<double>(j) / n));
    }
    KsTwoResult out;
    out.statistic = d;
    out.alpha = alpha;
    out.n1 = a.size();
    out.n2 = b.size();
    double const c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
    out.threshold = c * std::sqrt((m + n) / (m * n));
    out.p_value = sf::kolmogorov_q(std::sqrt(m * n / (m + n)) * d);
    out.pass = out.statistic <= out.threshold;
    return out;
}

double tv_distance(std::vector<double> const& p, std::vector<double> const& q)
{
    if (p.size() != q.size())
        throw ValidationError("TV distance needs a shared support universe");
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < 0 || q[i] < 0)
            throw ValidationError("negative mass in TV distance");
        s += std::abs(p[i] - q[i]);
    }
    return 0.5 * s;
}

double tv_distance(std::map<std::vector<long>, double> const& p,
                   std::map<std::vector<long>, double> const& q)
{
    double s = 0;
    for (auto const& [k, v] : p) {
        if (v < 0)
            throw ValidationError("negative mass in TV distance");
        auto it = q.find(k);
        double const w = it == q.end() ? 0.0 : it->second;
        if (w < 0)
            throw ValidationError("negative mass in TV distance");
        s += std::abs(v - w);
    }
    for (auto const& [k, w] : q) {
        if (w < 0)
            throw ValidationError("negative mass in TV distance");
        if (p.find(k) == p.end())
            s += w;
    }
    return 0.5 * s;
}

ExponentFit exponent_fit(std::vector<std::pair<double, double>> const& survivals)
{
    if (survivals.size() < 5)
        throw ValidationError("exponent fit needs at least 5 horizons");
    auto pts = survivals;
    std::sort(pts.begin(), pts.end());
    double const nmin = pts.front().first;
    double const nmax = pts.back().first;
    if (!(nmin > 0) || std::log10(nmax / nmin) < 1.5)
        throw ValidationError("exponent fit needs horizons spanning 1.5 decades");
    double const mid = std::sqrt(nmin * nmax);  // geometric midpoint
    std::vector<std::pair<double, double>> tail;
    for (auto const& [n, p] : pts) {
        if (n < mid)
            continue;
        if (!(p > 0))
            throw ValidationError("nonpositive survival value in the fit range");
        tail.emplace_back(std::log(n), std::log(p));
    }
    if (tail.size() < 2)
        throw ValidationError("exponent fit tail has too few points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto const& [lx, ly] : tail) {
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double const k = static_cast<double>(tail.size());
    double const denom = k * sxx - sx * sx;
    if (!(denom > 0))
        throw ValidationError("degenerate horizon grid");
    ExponentFit fit;
    fit.slope = (k * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / k;
    fit.points_used = tail.size();
    if (tail.size() > 2) {
        double ss = 0;
        for (auto const& [lx, ly] : tail) {
            double const r = ly - (fit.intercept + fit.slope * lx);
            ss += r * r;
        }
        fit.slope_stderr = std::sqrt(ss / (k - 2.0) * k / denom);
    }
    return fit;
}

double chi_square_stat(std::vector<double> const& observed,
                       std::vector<double> const& expected)
{
    if (observed.size() != expected.size() || observed.empty())
        throw ValidationError("chi-square needs aligned nonempty cells");
    double s = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (!(expected[i] > 0))
            throw ValidationError("chi-square expected counts must be positive");
        double const d = observed[i] - expected[i];
        s += d * d / expected[i];
    }
    return s;
}

double chi_square_pvalue(double stat, double dof)
{
    return sf::chisq_tail(dof, stat);
}

namespace {

Band percentile_band(std::vector<double>& stats, double alpha, double point)
{
    std::sort(stats.begin(), stats.end());
    auto quantile = [&](double q) {
        double const pos = q * static_cast<double>(stats.size() - 1);
        std::size_t const lo = static_cast<std::size_t>(std::floor(pos));
        std::size_t const hi = std::min(lo + 1, stats.size() - 1);
        double const w = pos - static_cast<double>(lo);
        return (1 - w) * stats[lo] + w * stats[hi];
    };
    Band band;
    band.lo = quantile(alpha / 2.0);
    band.hi = quantile(1.0 - alpha / 2.0);
    band.point = point;
    return band;
}

}  // namespace

Band bootstrap_mean(std::vector<double> const& samples, double alpha,
                    std::uint64_t seed, int resamples)
{
    if (samples.empty())
        throw ValidationError("bootstrap needs samples");
    if (resamples < 2 || !(alpha > 0 && alpha < 1))
        throw ValidationError("bad bootstrap parameters");
    RngStream rs(make_key(seed), stream_id(StreamTag::Bootstrap, 0));
    std::size_t const n = samples.size();
    double point = 0;
    for (double v : samples)
        point += v;
    point /= static_cast<double>(n);
    std::vector<double> stats(static_cast<std::size_t>(resamples));
    for (int r = 0; r < resamples; ++r) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) {
            auto idx = static_cast<std::size_t>(rs.next_unit() * static_cast<double>(n));
            if (idx >= n)
                idx = n - 1;
            s += samples[idx];
        }
        stats[static_cast<std::size_t>(r)] = s / static_cast<double>(n);
    }
    return percentile_band(stats, alpha, point);
}

Band bootstrap_weighted_mean(std::vector<double> const& values,
                             std::vector<double> const& weights, double alpha,
                             std::uint64_t seed, int resamples)
{
    if (values.empty() || values.size() != weights.size())
        throw ValidationError("bootstrap needs aligned values and weights");
    if (resamples < 2 || !(alpha > 0 && alpha < 1))
        throw ValidationError("bad bootstrap parameters");
    RngStream rs(make_key(seed), stream_id(StreamTag::Bootstrap, 1));
    std::size_t const n = values.size();
    double vsum = 0, wsum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (weights[i] < 0)
            throw ValidationError("bootstrap weights must be nonnegative");
        vsum += weights[i] * values[i];
        wsum += weights[i];
    }
    if (!(wsum > 0))
        throw ValidationError("bootstrap weights sum to zero");
    std::vector<double> stats(static_cast<std::size_t>(resamples));
    for (int r = 0; r < resamples; ++r) {
        double sv = 0, sw = 0;
        for (std::size_t i = 0; i < n; ++i) {
            auto idx = static_cast<std::size_t>(rs.next_unit() * static_cast<double>(n));
            if (idx >= n)
                idx = n - 1;
            sv += weights[idx] * values[idx];
            sw += weights[idx];
        }
        stats[static_cast<std::size_t>(r)] = sw > 0 ? sv / sw : 0.0;
    }
    return percentile_band(stats, alpha, vsum / wsum);
}

std::vector<double> jittered_radii(std::vector<double> const& rows, int d,
                                   Vec const& cell_widths, std::uint64_t seed)
{
    if (d < 1 || rows.size() % static_cast<std::size_t>(d) != 0)
        throw ValidationError("jitter rows must be a multiple of the dimension");
    if (cell_widths.size() != static_cast<std::size_t>(d))
        throw ValidationError("jitter needs one cell width per coordinate");
    RngStream rs(make_key(seed), stream_id(StreamTag::Jitter, 0));
    std::size_t const nrows = rows.size() / static_cast<std::size_t>(d);
    std::vector<double> radii(nrows);
    for (std::size_t r = 0; r < nrows; ++r) {
        double s = 0;
        for (int j = 0; j < d; ++j) {
            double const w = cell_widths[static_cast<std::size_t>(j)];
            double const v = rows[r * static_cast<std::size_t>(d) +
                                  static_cast<std::size_t>(j)] +
                             (rs.next_unit() - 0.5) * w;
            s += v * v;
        }
        radii[r] = std::sqrt(s);
    }
    return radii;
}

}  // namespace conewalk::stats
