// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
#include "conewalk/harmonic.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "conewalk/kernels.hpp"
#include "conewalk/lattice_dp.hpp"
#include "conewalk/threading.hpp"

namespace conewalk {

namespace {

std::vector<long> lattice_point(Vec const& x)
{
    std::vector<long> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        double r = std::round(x[j]);
        if (std::abs(x[j] - r) > 1e-9)
            throw ValidationError("harmonic table lookups need integer lattice points");
        out[j] = static_cast<long>(r);
    }
    return out;
}

Vec to_vec(std::vector<long> const& p)
{
    Vec out(p.size());
    for (std::size_t j = 0; j < p.size(); ++j)
        out[j] = static_cast<double>(p[j]);
    return out;
}

}  // namespace

double HarmonicTable::value(Vec const& x) const
{
    if (!cone_.contains(x))
        return 0;
    auto key = lattice_point(x);
    auto it = index_.find(key);
    if (it != index_.end())
        return values_[it->second];
    // Beyond the window: the far-field anchor.
    return anchor_scale_ * cone_.u_value(x);
}

double HarmonicTable::v_ratio(Vec const& from, Vec const& to) const
{
    double vf = value(from);
    if (!(vf > 0))
        throw ValidationError("v_ratio needs a source point with positive V");
    return value(to) / vf;
}

std::vector<std::pair<std::vector<long>, double>> HarmonicTable::entries() const
{
    std::vector<std::pair<std::vector<long>, double>> out;
    out.reserve(index_.size());
    for (auto const& [pt, idx] : index_)
        out.emplace_back(pt, values_[idx]);
    return out;
}

HarmonicTable build_v_exact(Cone const& cone, StepDistribution const& dist,
                            double window_radius, HarmonicBuildOptions const& opts)
{
    if (window_radius < 10)
        throw ValidationError("harmonic window radius must be at least 10");
    if (!(opts.tol > 0) || opts.damping <= 0 || opts.damping > 1)
        throw ValidationError("bad harmonic build options");
    dp::IntLaw law = dp::int_law(dist);  // throws for non-lattice laws
    int const d = law.d;

    HarmonicTable table;
    table.cone_ = cone;
    table.radius_ = window_radius;
    table.anchor_scale_ = opts.anchor_scale;

    // Enumerate interior unknowns: integer points in K with |x| <= R.
    long const box = static_cast<long>(std::floor(window_radius));
    double const r2 = window_radius * window_radius;
    std::vector<std::vector<long>> points;
    std::vector<long> pt(static_cast<std::size_t>(d), -box);
    Vec probe(static_cast<std::size_t>(d));
    while (true) {
        double s = 0;
        for (int j = 0; j < d; ++j) {
            probe[static_cast<std::size_t>(j)] = static_cast<double>(pt[static_cast<std::size_t>(j)]);
            s += probe[static_cast<std::size_t>(j)] * probe[static_cast<std::size_t>(j)];
        }
        if (s <= r2 && cone.contains(probe))
            points.push_back(pt);
        int j = 0;
        for (; j < d; ++j) {
            if (++pt[static_cast<std::size_t>(j)] <= box)
                break;
            pt[static_cast<std::size_t>(j)] = -box;
        }
        if (j == d)
            break;
    }
    if (points.empty())
        throw ValidationError("harmonic window contains no interior lattice points");
    std::sort(points.begin(), points.end());
    for (std::size_t i = 0; i < points.size(); ++i)
        table.index_.emplace(points[i], i);

    // Precompute neighbour links: interior index, or a constant contribution
    // from the anchor (u outside the window) and zero outside the cone.
    std::size_t const natoms = law.moves.size();
    std::vector<std::ptrdiff_t> nbr(points.size() * natoms, -1);
    std::vector<double> anchor_const(points.size(), 0.0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t a = 0; a < natoms; ++a) {
            std::vector<long> q = points[i];
            for (int j = 0; j < d; ++j)
                q[static_cast<std::size_t>(j)] += law.moves[a][static_cast<std::size_t>(j)];
            auto it = table.index_.find(q);
            if (it != table.index_.end()) {
                nbr[i * natoms + a] = static_cast<std::ptrdiff_t>(it->second);
                continue;
            }
            Vec qv = to_vec(q);
            if (cone.contains(qv))  // beyond the window: Dirichlet data u
                anchor_const[i] += law.probs[a] * opts.anchor_scale * cone.u_value(qv);
            // outside the cone: killed, contributes zero
        }
    }

    // Damped Jacobi iteration from the initial guess u (clipped at zero).
    std::vector<double> cur(points.size()), nxt(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        cur[i] = std::max(0.0, opts.anchor_scale * cone.u_value(to_vec(points[i])));
    int const threads = resolve_threads(opts.threads);
    std::int64_t const chunk = 2048;
    std::int64_t const nchunks =
        (static_cast<std::int64_t>(points.size()) + chunk - 1) / chunk;
    std::vector<double> chunk_delta(static_cast<std::size_t>(nchunks), 0.0);
    double delta = 0;
    std::int64_t sweep = 0;
    for (; sweep < opts.max_sweeps; ++sweep) {
        parallel_chunks(nchunks, threads, [&](std::int64_t c) {
            std::size_t const lo = static_cast<std::size_t>(c * chunk);
            std::size_t const hi =
                std::min(points.size(), static_cast<std::size_t>((c + 1) * chunk));
            double dmax = 0;
            for (std::size_t i = lo; i < hi; ++i) {
                double v = anchor_const[i];
                for (std::size_t a = 0; a < natoms; ++a) {
                    std::ptrdiff_t k = nbr[i * natoms + a];
                    if (k >= 0)
                        v += law.probs[a] * cur[static_cast<std::size_t>(k)];
                }
                double updated = cur[i] + opts.damping * (v - cur[i]);
                dmax = std::max(dmax,
                                std::abs(updated - cur[i]) / std::max(1.0, std::abs(cur[i])));
                nxt[i] = updated;
            }
            chunk_delta[static_cast<std::size_t>(c)] = dmax;
        });
        cur.swap(nxt);
        delta = 0;
        for (double dm : chunk_delta)
            delta = std::max(delta, dm);
        if (delta < opts.tol)
            break;
    }
    if (delta >= opts.tol)
        throw SimulationError("harmonic iteration did not converge: residual " +
                              std::to_string(delta) + " after " +
                              std::to_string(opts.max_sweeps) + " sweeps");
    table.values_ = std::move(cur);
    table.sweeps_ = sweep + 1;
    // Fixed-point residual of the converged table (relative).
    double res = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        double v = anchor_const[i];
        for (std::size_t a = 0; a < natoms; ++a) {
            std::ptrdiff_t k = nbr[i * natoms + a];
            if (k >= 0)
                v += law.probs[a] * table.values_[static_cast<std::size_t>(k)];
        }
        res = std::max(res, std::abs(v - table.values_[i]) /
                                std::max(1.0, std::abs(table.values_[i])));
    }
    table.residual_ = res;
    return table;
}

namespace {

// Kernel-accelerated estimate for +/-1 product laws on supported cones;
// mirrors the fast path of survival_probability_mc.
struct UPlan {
    int cone_code;
    int d;
    std::vector<std::int32_t> start;
    bool half_space;  // u = last coordinate of the original point
};

std::optional<UPlan> u_plan(Cone const& cone, StepDistribution const& dist, Vec const& x,
                            std::int64_t n)
{
    if (!dist.is_lattice())
        return std::nullopt;
    dp::IntLaw law;
    try {
        law = dp::int_law(dist);
    } catch (ValidationError const&) {
        return std::nullopt;
    }
    if (!dp::is_pm1_product(law))
        return std::nullopt;
    UPlan plan;
    plan.half_space = false;
    Vec reduced = x;
    switch (cone.kind()) {
        case ConeKind::HalfLine:
            plan.cone_code = 0;
            break;
        case ConeKind::HalfSpace:
            plan.cone_code = 0;
            plan.half_space = true;
            reduced = {x.back()};
            break;
        case ConeKind::Orthant:
            plan.cone_code = 1;
            break;
        case ConeKind::WeylA:
            plan.cone_code = 2;
            break;
        default:
            return std::nullopt;
    }
    plan.d = static_cast<int>(reduced.size());
    plan.start.resize(reduced.size());
    for (std::size_t j = 0; j < reduced.size(); ++j) {
        double r = std::round(reduced[j]);
        if (std::abs(reduced[j] - r) > 1e-9 || std::abs(r) + static_cast<double>(n) > 2e9)
            return std::nullopt;
        plan.start[j] = static_cast<std::int32_t>(r);
    }
    return plan;
}

}  // namespace

VEstimate estimate_v_mc(Cone const& cone, StepDistribution const& dist, Vec const& x,
                        std::int64_t n, std::int64_t replicas, std::uint64_t seed,
                        int threads)
{
    if (!cone.contains(x))
        throw ValidationError("start point is not inside the cone");
    if (dist.dimension() != cone.dimension())
        throw ValidationError("step dimension does not match the cone");
    if (replicas < 1)
        throw ValidationError("need at least one replica");
    VEstimate est;
    est.replicas = replicas;
    if (n == 0) {
        est.value = cone.u_value(x);
        return est;
    }
    PhiloxKey const key = make_key(seed);
    double sum = 0, sumsq = 0;
    if (auto plan = u_plan(cone, dist, x, n)) {
        std::int64_t const nblocks = (replicas + 7) / 8;
        std::int64_t const kBlocksPerChunk = 512;
        std::int64_t const nchunks = (nblocks + kBlocksPerChunk - 1) / kBlocksPerChunk;
        std::vector<double> sums(static_cast<std::size_t>(nchunks), 0.0);
        std::vector<double> sqs(static_cast<std::size_t>(nchunks), 0.0);
        parallel_chunks(nchunks, resolve_threads(threads), [&](std::int64_t c) {
            double lsum = 0, lsq = 0;
            std::array<std::uint64_t, 8> streams{};
            std::vector<std::int32_t> start(8 * static_cast<std::size_t>(plan->d));
            std::vector<std::int32_t> final_pos(8 * static_cast<std::size_t>(plan->d));
            for (int lane = 0; lane < 8; ++lane)
                for (int j = 0; j < plan->d; ++j)
                    start[static_cast<std::size_t>(lane * plan->d + j)] = plan->start[j];
            kern::RademacherSpec spec;
            spec.key = key;
            spec.streams = streams.data();
            spec.cone_code = plan->cone_code;
            spec.d = plan->d;
            spec.start = start.data();
            spec.nsteps = n;
            kern::RademacherOut out;
            out.final_pos = final_pos.data();
            Vec endpoint(static_cast<std::size_t>(plan->d));
            std::int64_t const blo = c * kBlocksPerChunk;
            std::int64_t const bhi = std::min(nblocks, blo + kBlocksPerChunk);
            for (std::int64_t b = blo; b < bhi; ++b) {
                for (int lane = 0; lane < 8; ++lane)
                    streams[static_cast<std::size_t>(lane)] =
                        stream_id(StreamTag::VMc, static_cast<std::uint64_t>(b * 8 + lane));
                kern::ops().rademacher_block(spec, out);
                std::int64_t const lanes = std::min<std::int64_t>(8, replicas - b * 8);
                for (std::int64_t lane = 0; lane < lanes; ++lane) {
                    if (out.survived[lane] != n)
                        continue;
                    for (int j = 0; j < plan->d; ++j)
                        endpoint[static_cast<std::size_t>(j)] = static_cast<double>(
                            final_pos[static_cast<std::size_t>(lane * plan->d + j)]);
                    double u = plan->half_space ? endpoint[0] : cone.u_value(endpoint);
                    lsum += u;
                    lsq += u * u;
                }
            }
            sums[static_cast<std::size_t>(c)] = lsum;
            sqs[static_cast<std::size_t>(c)] = lsq;
        });
        for (std::int64_t c = 0; c < nchunks; ++c) {
            sum += sums[static_cast<std::size_t>(c)];
            sumsq += sqs[static_cast<std::size_t>(c)];
        }
    } else {
        std::int64_t const kChunk = 4096;
        std::int64_t const nchunks = (replicas + kChunk - 1) / kChunk;
        std::vector<double> sums(static_cast<std::size_t>(nchunks), 0.0);
        std::vector<double> sqs(static_cast<std::size_t>(nchunks), 0.0);
        parallel_chunks(nchunks, resolve_threads(threads), [&](std::int64_t c) {
            double lsum = 0, lsq = 0;
            Vec pos(x.size());
            std::int64_t const rlo = c * kChunk;
            std::int64_t const rhi = std::min(replicas, rlo + kChunk);
            for (std::int64_t r = rlo; r < rhi; ++r) {
                RngStream rs(key,
                             stream_id(StreamTag::VMc, static_cast<std::uint64_t>(r)));
                pos = x;
                bool alive = true;
                for (std::int64_t k = 0; k < n && alive; ++k) {
                    Vec step = dist.sample_step(rs);
                    for (std::size_t j = 0; j < pos.size(); ++j)
                        pos[j] += step[j];
                    alive = cone.contains(pos);
                }
                if (alive) {
                    double u = cone.u_value(pos);
                    lsum += u;
                    lsq += u * u;
                }
            }
            sums[static_cast<std::size_t>(c)] = lsum;
            sqs[static_cast<std::size_t>(c)] = lsq;
        });
        for (std::int64_t c = 0; c < nchunks; ++c) {
            sum += sums[static_cast<std::size_t>(c)];
            sumsq += sqs[static_cast<std::size_t>(c)];
        }
    }
    double const N = static_cast<double>(replicas);
    est.value = sum / N;
    if (replicas > 1) {
        double var = std::max(0.0, (sumsq - sum * sum / N) / (N - 1.0));
        est.std_error = std::sqrt(var / N);
    }
    return est;
}

HarmonicTable make_v_table(
    Cone const& cone, double window_radius,
    std::vector<std::pair<std::vector<long>, double>> const& entries,
    double residual, double anchor_scale)
{
    if (!(window_radius > 0))
        throw ValidationError("harmonic window radius must be positive");
    if (!(anchor_scale > 0))
        throw ValidationError("harmonic anchor scale must be positive");
    HarmonicTable table;
    table.cone_ = cone;
    table.radius_ = window_radius;
    table.residual_ = residual;
    table.anchor_scale_ = anchor_scale;
    table.values_.reserve(entries.size());
    for (auto const& [pt, v] : entries) {
        if (static_cast<int>(pt.size()) != cone.dimension())
            throw ValidationError("harmonic table entry has the wrong dimension");
        if (!(v >= 0) || !std::isfinite(v))
            throw ValidationError("harmonic table entry has a non-finite value");
        if (!table.index_.emplace(pt, table.values_.size()).second)
            throw ValidationError("harmonic table has a duplicate entry");
        table.values_.push_back(v);
    }
    return table;
}

std::optional<double> closed_form_v(Cone const& cone, StepDistribution const& dist,
                                    Vec const& x)
{
    if (!dist.is_lattice())
        return std::nullopt;
    dp::IntLaw law;
    try {
        law = dp::int_law(dist);
    } catch (ValidationError const&) {
        return std::nullopt;
    }
    if (!dp::is_pm1_product(law))
        return std::nullopt;
    if (cone.kind() != ConeKind::HalfLine && cone.kind() != ConeKind::HalfSpace &&
        cone.kind() != ConeKind::Orthant)
        return std::nullopt;
    if (!cone.contains(x))
        return std::nullopt;
    for (double v : x)
        if (std::abs(v - std::round(v)) > 1e-9)
            return std::nullopt;
    return cone.u_value(x);
}

}  // namespace conewalk
