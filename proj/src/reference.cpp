// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
#include "conewalk/reference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <string>

#include "conewalk/rng.hpp"
#include "conewalk/specfun.hpp"
#include "conewalk/threading.hpp"

namespace conewalk::ref {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// Per-sample attempt budget; stream index = (sample * d + coord) * kAttemptCap
// + attempt, so every attempt has its own counter stream and the accepted
// ensemble is independent of thread count.
constexpr std::int64_t kAttemptCap = std::int64_t{1} << 20;
constexpr std::int64_t kSamplesPerChunk = 64;

void validate_grid(std::int64_t m, std::int64_t count)
{
    if (m < 2 || m % 2 != 0)
        throw ValidationError("grid step count must be even and >= 2");
    if (count < 1 || count > 10'000'000)
        throw ValidationError("sample count must be in [1, 1e7]");
}

// One grid path of a 1D Brownian motion on (0, inf); fills path[0..m-1] with
// the positions after each step and reports whether all of them stayed
// positive (scans the whole grid only as far as the first exit).
bool try_line(RngStream& rs, double start, double sigma, std::int64_t m, double* path)
{
    double pos = start;
    for (std::int64_t k = 0; k < m; ++k) {
        pos += sigma * rs.next_gaussian();
        if (!(pos > 0))
            return false;
        path[k] = pos;
    }
    return true;
}

// Unconstrained 1D grid path.
void free_line(RngStream& rs, double start, double sigma, std::int64_t m, double* path)
{
    double pos = start;
    for (std::int64_t k = 0; k < m; ++k) {
        pos += sigma * rs.next_gaussian();
        path[k] = pos;
    }
}

// One grid path of a d-dimensional Brownian motion killed outside the cone;
// fills flat[k*d + j] row-major on survival.
bool try_cone_path(RngStream& rs, Cone const& cone, Vec const& start, double sigma,
                   std::int64_t m, double* flat)
{
    int const d = cone.dimension();
    Vec pos = start;
    for (std::int64_t k = 0; k < m; ++k) {
        for (int j = 0; j < d; ++j)
            pos[j] += sigma * rs.next_gaussian();
        if (!cone.contains(pos))
            return false;
        for (int j = 0; j < d; ++j)
            flat[k * d + j] = pos[j];
    }
    return true;
}

enum class Strategy { Generic, Product, HalfSpaceMix };

Strategy pick_strategy(Cone const& cone)
{
    switch (cone.kind()) {
        case ConeKind::HalfLine:
        case ConeKind::Orthant:
            return Strategy::Product;
        case ConeKind::HalfSpace:
            return Strategy::HalfSpaceMix;
        default:
            return Strategy::Generic;
    }
}

// Shared engine for the meander and h-BM ensembles: rejection-sample grid
// paths started at `start`, kill at the cone boundary. For orthants the
// killed law is the product of per-coordinate killed laws, so coordinates are
// sampled independently and glued; for half-spaces only the last coordinate
// is constrained. `weighted` attaches u(end)/u(start) importance weights.
GridEnsemble run_ensemble(Cone const& cone, Vec const& start, double T, std::int64_t m,
                          std::int64_t count, PhiloxKey key, bool weighted, int threads)
{
    int const d = cone.dimension();
    double const sigma = std::sqrt(T / static_cast<double>(m));
    Strategy const strat = pick_strategy(cone);

    GridEnsemble out;
    out.d = d;
    out.m = m;
    out.T = T;
    out.endpoints.assign(static_cast<std::size_t>(count) * d, 0.0);
    out.mid.assign(static_cast<std::size_t>(count) * d, 0.0);
    out.max_norms.assign(static_cast<std::size_t>(count), 0.0);
    if (weighted)
        out.weights.assign(static_cast<std::size_t>(count), 0.0);

    double const u_start = weighted ? cone.u_value(start) : 1.0;
    if (weighted && !(u_start > 0))
        throw ValidationError("start point must have u > 0");

    std::size_t const nchunks =
        static_cast<std::size_t>((count + kSamplesPerChunk - 1) / kSamplesPerChunk);
    // Per-chunk, per-coordinate attempt counters, reduced in fixed order.
    std::vector<std::int64_t> chunk_attempts(nchunks * static_cast<std::size_t>(d), 0);
    std::mutex failure_mutex;
    std::string failure;  // first underflow message, if any

    parallel_chunks(nchunks, threads, [&](std::size_t c) {
        std::int64_t const lo = static_cast<std::int64_t>(c) * kSamplesPerChunk;
        std::int64_t const hi = std::min<std::int64_t>(count, lo + kSamplesPerChunk);
        std::vector<double> flat(static_cast<std::size_t>(m) * d);
        std::vector<double> line(static_cast<std::size_t>(m));
        std::int64_t* att = chunk_attempts.data() + c * static_cast<std::size_t>(d);
        for (std::int64_t i = lo; i < hi; ++i) {
            bool ok = true;
            if (strat == Strategy::Generic) {
                std::int64_t a = 0;
                for (; a < kAttemptCap; ++a) {
                    RngStream rs(key, StreamTag::BmAttempt,
                                 static_cast<std::uint64_t>(i * d * kAttemptCap + a));
                    if (try_cone_path(rs, cone, start, sigma, m, flat.data()))
                        break;
                }
                att[0] += std::min(a + 1, kAttemptCap);
                ok = a < kAttemptCap;
            } else {
                for (int j = 0; j < d && ok; ++j) {
                    bool const constrained =
                        strat == Strategy::Product || j == d - 1;
                    std::int64_t a = 0;
                    if (constrained) {
                        for (; a < kAttemptCap; ++a) {
                            RngStream rs(key, StreamTag::BmAttempt,
                                         static_cast<std::uint64_t>(
                                             (i * d + j) * kAttemptCap + a));
                            if (try_line(rs, start[j], sigma, m, line.data()))
                                break;
                        }
                        ok = a < kAttemptCap;
                    } else {
                        RngStream rs(key, StreamTag::BmAttempt,
                                     static_cast<std::uint64_t>((i * d + j) *
                                                                kAttemptCap));
                        free_line(rs, start[j], sigma, m, line.data());
                    }
                    att[j] += std::min(a + 1, kAttemptCap);
                    if (ok)
                        for (std::int64_t k = 0; k < m; ++k)
                            flat[static_cast<std::size_t>(k) * d + j] = line[k];
                }
            }
            if (!ok) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (failure.empty())
                    failure = "acceptance underflow: no surviving grid path in " +
                              std::to_string(kAttemptCap) + " attempts (sample " +
                              std::to_string(i) + ")";
                return;
            }
            double mx = sqnorm(start);
            for (std::int64_t k = 0; k < m; ++k) {
                double s = 0;
                for (int j = 0; j < d; ++j) {
                    double const v = flat[static_cast<std::size_t>(k) * d + j];
                    s += v * v;
                }
                mx = std::max(mx, s);
            }
            out.max_norms[static_cast<std::size_t>(i)] = std::sqrt(mx);
            std::int64_t const mid_row = m / 2 - 1;
            for (int j = 0; j < d; ++j) {
                out.endpoints[static_cast<std::size_t>(i) * d + j] =
                    flat[static_cast<std::size_t>(m - 1) * d + j];
                out.mid[static_cast<std::size_t>(i) * d + j] =
                    flat[static_cast<std::size_t>(mid_row) * d + j];
            }
            if (weighted) {
                Vec end(flat.end() - d, flat.end());
                out.weights[static_cast<std::size_t>(i)] = cone.u_value(end) / u_start;
            }
        }
    });
    if (!failure.empty())
        throw SimulationError(failure);

    double accept = 1.0;
    std::int64_t total = 0;
    for (int j = 0; j < d; ++j) {
        std::int64_t aj = 0;
        for (std::size_t c = 0; c < nchunks; ++c)
            aj += chunk_attempts[c * static_cast<std::size_t>(d) + j];
        if (strat == Strategy::Generic && j > 0)
            continue;
        total += aj;
        if (aj > 0)
            accept *= static_cast<double>(count) / static_cast<double>(aj);
    }
    out.attempts = total;
    out.acceptance = accept;
    return out;
}

}  // namespace

RadialLaw RadialLaw::for_cone(Cone const& cone)
{
    RadialLaw law;
    law.degrees = 2 * cone.exponent() + cone.dimension();
    law.index = cone.exponent() + cone.dimension() / 2.0 - 1.0;
    return law;
}

GridEnsemble sample_bm_meander(Cone const& cone, std::int64_t m, double eps,
                               std::int64_t count, std::uint64_t seed, int threads)
{
    validate_grid(m, count);
    if (!(eps > 0))
        throw ValidationError("meander start scale eps must be positive");
    Vec start = cone.interior_direction();
    for (double& v : start)
        v *= eps;
    if (!cone.contains(start))
        throw ValidationError("meander start eps*x0 is not inside the cone");
    GridEnsemble out = run_ensemble(cone, start, 1.0, m, count,
                                    make_key(seed, "bm-meander"), false, threads);
    out.eps = eps;
    return out;
}

GridEnsemble sample_h_bm(Cone const& cone, Vec const& x, double T, std::int64_t m,
                         std::int64_t count, std::uint64_t seed, int threads)
{
    validate_grid(m, count);
    if (static_cast<int>(x.size()) != cone.dimension())
        throw ValidationError("start point dimension mismatch");
    if (!(T > 0))
        throw ValidationError("horizon T must be positive");
    if (!cone.contains(x))
        throw ValidationError("start point must lie inside the open cone");
    return run_ensemble(cone, x, T, m, count, make_key(seed, "h-bm"), true, threads);
}

double entrance_law_density(Cone const& cone, double t, double r)
{
    if (!(t > 0))
        throw ValidationError("entrance law requires t > 0");
    if (!(r > 0))
        return 0;
    double const k = 2 * cone.exponent() + cone.dimension();
    double const s = std::sqrt(t);
    return sf::chi_pdf(k, r / s) / s;
}

double entrance_law_cdf(Cone const& cone, double t, double r)
{
    if (!(t > 0))
        throw ValidationError("entrance law requires t > 0");
    if (!(r > 0))
        return 0;
    double const k = 2 * cone.exponent() + cone.dimension();
    return sf::chi_cdf(k, r / std::sqrt(t));
}

double radial_transition_density(RadialLaw const& law, double h, double r1, double r2)
{
    if (!(h > 0))
        throw ValidationError("transition density requires h > 0");
    if (r1 < 0 || r2 < 0)
        throw ValidationError("radii must be nonnegative");
    if (!(r2 > 0))
        return 0;
    if (!(r1 > 0)) {
        // Entrance limit r1 -> 0: the chi(delta) density scaled to time h.
        double const s = std::sqrt(h);
        return sf::chi_pdf(law.degrees, r2 / s) / s;
    }
    double const a1 = law.index;
    double const z = r1 * r2 / h;
    double const log_q = a1 * (std::log(r2) - std::log(r1)) + std::log(r2 / h) -
                         (r1 * r1 + r2 * r2) / (2 * h) + sf::log_bessel_i(a1, z);
    return std::exp(log_q);
}

RadialPaths sample_bessel(RadialLaw const& law, double r0, std::vector<double> times,
                          std::int64_t count, std::uint64_t seed)
{
    if (!(law.degrees > 1))
        throw ValidationError("radial law requires degrees > 1");
    if (r0 < 0)
        throw ValidationError("initial radius must be nonnegative");
    if (count < 1 || count > 10'000'000)
        throw ValidationError("sample count must be in [1, 1e7]");
    if (times.empty() || times[0] != 0)
        throw ValidationError("time grid must start at 0");
    for (std::size_t t = 1; t < times.size(); ++t)
        if (!(times[t] > times[t - 1]))
            throw ValidationError("time grid must be strictly increasing");

    PhiloxKey const key = make_key(seed, "bessel");
    std::size_t const nt = times.size();
    RadialPaths out;
    out.times = std::move(times);
    out.radii.assign(static_cast<std::size_t>(count) * nt, 0.0);
    std::size_t const nchunks =
        static_cast<std::size_t>((count + kSamplesPerChunk - 1) / kSamplesPerChunk);
    parallel_chunks(nchunks, 0, [&](std::size_t c) {
        std::int64_t const lo = static_cast<std::int64_t>(c) * kSamplesPerChunk;
        std::int64_t const hi = std::min<std::int64_t>(count, lo + kSamplesPerChunk);
        for (std::int64_t i = lo; i < hi; ++i) {
            RngStream rs(key, StreamTag::Bessel, static_cast<std::uint64_t>(i));
            double r = r0;
            double* row = out.radii.data() + static_cast<std::size_t>(i) * nt;
            row[0] = r0;
            for (std::size_t t = 1; t < nt; ++t) {
                double const h = out.times[t] - out.times[t - 1];
                double const lambda = r * r / (2 * h);
                std::int64_t const jumps = lambda > 0 ? rs.next_poisson(lambda) : 0;
                double const shape = law.degrees / 2.0 + static_cast<double>(jumps);
                r = std::sqrt(2 * h * rs.next_gamma(shape));
                row[t] = r;
            }
        }
    });
    return out;
}

double bridge_weight(Cone const& cone, double t, Vec const& w)
{
    if (!(t > 0) || !(t < 1))
        throw ValidationError("bridge weight requires t in (0, 1)");
    if (static_cast<int>(w.size()) != cone.dimension())
        throw ValidationError("bridge weight dimension mismatch");
    if (!cone.contains(w))
        return 0;
    double const p = cone.exponent();
    double const d = cone.dimension();
    return std::pow(t, -p / 2) * std::pow(1 - t, -p / 2 - d / 2) * cone.u_value(w) *
           std::exp(-sqnorm(w) / (2 * (1 - t)));
}

double wedge_kernel(Cone const& wedge, double h, Vec const& x, Vec const& z)
{
    if (wedge.kind() != ConeKind::Wedge2D)
        throw ValidationError("wedge_kernel requires a planar wedge cone");
    if (!(h > 0))
        throw ValidationError("wedge_kernel requires h > 0");
    if (x.size() != 2 || z.size() != 2)
        throw ValidationError("wedge_kernel points must be 2D");
    if (!wedge.contains(x) || !wedge.contains(z))
        return 0;
    double const alpha = wedge.alpha();
    double const rx = std::hypot(x[0], x[1]);
    double const rz = std::hypot(z[0], z[1]);
    auto angle = [](Vec const& v) {
        double t = std::atan2(v[1], v[0]);
        if (t < 0)
            t += 2 * kPi;
        return t;
    };
    double const tx = angle(x);
    double const tz = angle(z);
    double const arg = rx * rz / h;
    // k_h = (1/h) e^{-(rx^2+rz^2)/2h} (2/alpha) sum_j I_{j pi/alpha}(arg)
    //       sin(j pi tx / alpha) sin(j pi tz / alpha); pull e^{arg} out of the
    //       scaled Bessel terms so the prefactor stays in range.
    double sum = 0;
    for (int j = 1; j <= 20000; ++j) {
        double const nu = j * kPi / alpha;
        double const term = sf::bessel_i_scaled(nu, arg);
        sum += term * std::sin(nu * tx) * std::sin(nu * tz);
        if (term < 1e-18 && nu > arg)
            break;
    }
    double const log_pref = -(rx - rz) * (rx - rz) / (2 * h) - std::log(h);
    return std::exp(log_pref) * (2 / alpha) * sum;
}

stats::TestReport htransform_limit_identity_check(Cone const& cone, double eps,
                                                  std::int64_t samples,
                                                  std::uint64_t seed)
{
    if (!(eps > 0))
        throw ValidationError("eps must be positive");
    std::int64_t const m = 4096;
    Vec start = cone.interior_direction();
    for (double& v : start)
        v *= eps;
    GridEnsemble const hbm = sample_h_bm(cone, start, 1.0, m, samples, seed);
    GridEnsemble const mea = sample_bm_meander(cone, m, eps, samples, seed);

    int const d = cone.dimension();
    std::vector<double> mea_w(static_cast<std::size_t>(samples));
    for (std::int64_t i = 0; i < samples; ++i) {
        Vec end(mea.endpoints.begin() + i * d, mea.endpoints.begin() + (i + 1) * d);
        mea_w[static_cast<std::size_t>(i)] = cone.u_value(end);
    }

    stats::TestReport rep;
    rep.experiment = "htransform-limit-identity";
    rep.metadata["cone"] = cone.name();
    rep.metadata["eps"] = std::to_string(eps);
    rep.metadata["samples"] = std::to_string(samples);
    rep.metadata["grid_steps"] = std::to_string(m);
    rep.metadata["seed"] = std::to_string(seed);

    auto functional_name = [&](int f) -> std::string {
        if (f < d)
            return "end_coord_" + std::to_string(f + 1);
        return f == d ? "end_norm" : "max_norm";
    };
    auto functional_value = [&](GridEnsemble const& ens, int f,
                                std::int64_t i) -> double {
        if (f < d)
            return ens.endpoints[static_cast<std::size_t>(i) * d + f];
        if (f == d) {
            Vec end(ens.endpoints.begin() + i * d, ens.endpoints.begin() + (i + 1) * d);
            return norm(end);
        }
        return ens.max_norms[static_cast<std::size_t>(i)];
    };

    double worst = 0;
    for (int f = 0; f < d + 2; ++f) {
        std::vector<double> lv(static_cast<std::size_t>(samples));
        std::vector<double> rv(static_cast<std::size_t>(samples));
        for (std::int64_t i = 0; i < samples; ++i) {
            lv[static_cast<std::size_t>(i)] = functional_value(hbm, f, i);
            rv[static_cast<std::size_t>(i)] = functional_value(mea, f, i);
        }
        stats::Band const lb =
            stats::bootstrap_weighted_mean(lv, hbm.weights, 0.01, seed + 2 * f);
        stats::Band const rb =
            stats::bootstrap_weighted_mean(rv, mea_w, 0.01, seed + 2 * f + 1);
        double const width = (lb.hi - lb.lo) / 2 + (rb.hi - rb.lo) / 2;
        double const ratio = std::abs(lb.point - rb.point) / width;
        rep.details.emplace_back(functional_name(f) + "_hbm", lb.point);
        rep.details.emplace_back(functional_name(f) + "_meander", rb.point);
        rep.details.emplace_back(functional_name(f) + "_ratio", ratio);
        worst = std::max(worst, ratio);
    }
    rep.statistic = worst;
    rep.threshold = 1.0;
    rep.finalize();
    return rep;
}

}  // namespace conewalk::ref
