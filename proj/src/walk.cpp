// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
#include "conewalk/walk.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "conewalk/kernels.hpp"
#include "conewalk/lattice_dp.hpp"
#include "conewalk/specfun.hpp"
#include "conewalk/threading.hpp"

namespace conewalk {

PathSample simulate_path(Cone const& cone, StepDistribution const& dist, Vec const& x,
                         std::int64_t n, RngStream& rs, bool full_path)
{
    if (!cone.contains(x))
        throw ValidationError("start point is not inside the cone");
    if (n < 0)
        throw ValidationError("horizon must be nonnegative");
    if (dist.dimension() != cone.dimension())
        throw ValidationError("step dimension does not match the cone");
    PathSample out;
    out.start = x;
    out.positions.reserve(static_cast<std::size_t>(n));
    Vec pos = x;
    for (std::int64_t k = 1; k <= n; ++k) {
        Vec step = dist.sample_step(rs);
        for (std::size_t j = 0; j < pos.size(); ++j)
            pos[j] += step[j];
        out.positions.push_back(pos);
        if (!out.exit_index && !cone.contains(pos)) {
            out.exit_index = k;
            if (!full_path)
                break;
        }
    }
    return out;
}

ScaledPath::ScaledPath(PathSample path, std::int64_t n) : path_(std::move(path)), n_(n)
{
    if (n_ < 1)
        throw ValidationError("scaled path needs n >= 1");
    if (!path_.exit_index &&
        static_cast<std::int64_t>(path_.positions.size()) < n_)
        throw ValidationError("path is shorter than the requested horizon");
    scale_ = 1.0 / std::sqrt(static_cast<double>(n_));
}

Vec ScaledPath::operator()(double t) const
{
    if (!(t >= 0.0 && t <= 1.0))
        throw ValidationError("scaled path time must lie in [0, 1]");
    auto idx = static_cast<std::int64_t>(std::floor(static_cast<double>(n_) * t));
    idx = std::min(idx, n_);
    Vec out;
    if (idx == 0) {
        out = path_.start;
    } else {
        std::size_t i = std::min(static_cast<std::size_t>(idx), path_.positions.size());
        out = path_.positions[i - 1];
    }
    for (double& v : out)
        v *= scale_;
    return out;
}

double max_norm(PathSample const& path)
{
    double best = 0;
    for (auto const& pos : path.positions) {
        double s = 0;
        for (std::size_t j = 0; j < pos.size(); ++j) {
            double dj = pos[j] - path.start[j];
            s += dj * dj;
        }
        best = std::max(best, s);
    }
    return std::sqrt(best);
}

namespace {

struct KernelPlan {
    int cone_code = 0;
    int d = 0;
    std::vector<std::int32_t> start;  // one lane's worth; replicated across lanes
};

std::optional<KernelPlan> kernel_plan(Cone const& cone, StepDistribution const& dist,
                                      Vec const& x, std::int64_t n)
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
    KernelPlan plan;
    Vec reduced;
    switch (cone.kind()) {
        case ConeKind::HalfLine:
            plan.cone_code = 0;
            reduced = x;
            break;
        case ConeKind::HalfSpace:
            // Exit depends only on the last coordinate, itself a +/-1 walk.
            plan.cone_code = 0;
            reduced = {x.back()};
            break;
        case ConeKind::Orthant:
            plan.cone_code = 1;
            reduced = x;
            break;
        case ConeKind::WeylA:
            plan.cone_code = 2;
            reduced = x;
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

std::int64_t kernel_successes(KernelPlan const& plan, std::uint64_t seed,
                              std::int64_t n, std::int64_t replicas, int threads)
{
    PhiloxKey const key = make_key(seed);
    std::int64_t const nblocks = (replicas + 7) / 8;
    std::int64_t const kBlocksPerChunk = 512;  // 4096 replicas
    std::int64_t const nchunks = (nblocks + kBlocksPerChunk - 1) / kBlocksPerChunk;
    std::vector<std::int64_t> counts(static_cast<std::size_t>(nchunks), 0);
    auto const& o = kern::ops();
    parallel_chunks(nchunks, threads, [&](std::int64_t c) {
        std::int64_t local = 0;
        std::array<std::uint64_t, 8> streams{};
        std::vector<std::int32_t> start(8 * static_cast<std::size_t>(plan.d));
        std::vector<std::int32_t> final_pos(8 * static_cast<std::size_t>(plan.d));
        for (int lane = 0; lane < 8; ++lane)
            for (int j = 0; j < plan.d; ++j)
                start[static_cast<std::size_t>(lane * plan.d + j)] = plan.start[j];
        kern::RademacherSpec spec;
        spec.key = key;
        spec.streams = streams.data();
        spec.cone_code = plan.cone_code;
        spec.d = plan.d;
        spec.start = start.data();
        spec.nsteps = n;
        kern::RademacherOut out;
        out.final_pos = final_pos.data();
        std::int64_t const blo = c * kBlocksPerChunk;
        std::int64_t const bhi = std::min(nblocks, blo + kBlocksPerChunk);
        for (std::int64_t b = blo; b < bhi; ++b) {
            for (int lane = 0; lane < 8; ++lane)
                streams[static_cast<std::size_t>(lane)] =
                    stream_id(StreamTag::SurvivalMc,
                              static_cast<std::uint64_t>(b * 8 + lane));
            o.rademacher_block(spec, out);
            std::int64_t const lanes = std::min<std::int64_t>(8, replicas - b * 8);
            for (std::int64_t lane = 0; lane < lanes; ++lane)
                if (out.survived[lane] == n)
                    ++local;
        }
        counts[static_cast<std::size_t>(c)] = local;
    });
    std::int64_t total = 0;
    for (std::int64_t c : counts)
        total += c;
    return total;
}

std::int64_t generic_successes(Cone const& cone, StepDistribution const& dist,
                               Vec const& x, std::uint64_t seed, std::int64_t n,
                               std::int64_t replicas, int threads)
{
    PhiloxKey const key = make_key(seed);
    std::int64_t const kChunk = 4096;
    std::int64_t const nchunks = (replicas + kChunk - 1) / kChunk;
    std::vector<std::int64_t> counts(static_cast<std::size_t>(nchunks), 0);
    parallel_chunks(nchunks, threads, [&](std::int64_t c) {
        std::int64_t local = 0;
        Vec pos(x.size());
        std::int64_t const rlo = c * kChunk;
        std::int64_t const rhi = std::min(replicas, rlo + kChunk);
        for (std::int64_t r = rlo; r < rhi; ++r) {
            RngStream rs(key, stream_id(StreamTag::SurvivalMc,
                                        static_cast<std::uint64_t>(r)));
            pos = x;
            bool alive = true;
            for (std::int64_t k = 0; k < n && alive; ++k) {
                Vec step = dist.sample_step(rs);
                for (std::size_t j = 0; j < pos.size(); ++j)
                    pos[j] += step[j];
                alive = cone.contains(pos);
            }
            if (alive)
                ++local;
        }
        counts[static_cast<std::size_t>(c)] = local;
    });
    std::int64_t total = 0;
    for (std::int64_t c : counts)
        total += c;
    return total;
}

}  // namespace

SurvivalEstimate survival_probability_mc(Cone const& cone, StepDistribution const& dist,
                                         Vec const& x, std::int64_t n,
                                         std::int64_t replicas, std::uint64_t seed,
                                         int threads)
{
    if (!cone.contains(x))
        throw ValidationError("start point is not inside the cone");
    if (dist.dimension() != cone.dimension())
        throw ValidationError("step dimension does not match the cone");
    if (replicas < 1)
        throw ValidationError("need at least one replica");
    SurvivalEstimate est;
    est.n = n;
    est.x = x;
    est.replicas = replicas;
    est.method = "monte-carlo";
    if (n == 0) {  // tau_x >= 1 always
        est.probability = 1.0;
        return est;
    }
    std::int64_t successes;
    if (auto plan = kernel_plan(cone, dist, x, n))
        successes = kernel_successes(*plan, seed, n, replicas, threads);
    else
        successes = generic_successes(cone, dist, x, seed, n, replicas, threads);
    double const p = static_cast<double>(successes) / static_cast<double>(replicas);
    est.probability = p;
    est.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(replicas));
    return est;
}

SurvivalEstimate survival_probability_exact(Cone const& cone,
                                            StepDistribution const& dist, Vec const& x,
                                            std::int64_t n)
{
    if (!cone.contains(x))
        throw ValidationError("start point is not inside the cone");
    SurvivalEstimate est;
    est.n = n;
    est.x = x;
    est.method = "exact-dp";
    if (n == 0) {
        est.probability = 1.0;
        return est;
    }
    auto curve = dp::survival_curve(cone, dist, x, n);
    est.probability = curve.back();
    return est;
}

double fuk_nagaev_bound(std::int64_t n, double x_level, double y_level, int d)
{
    if (!(x_level > 0) || !(y_level > 0))
        throw ValidationError("levels must be positive");
    if (n < 1 || d < 1)
        throw ValidationError("need n >= 1 and d >= 1");
    double const sd = std::sqrt(static_cast<double>(d));
    double const r = x_level / (sd * y_level);
    double const base = sd * static_cast<double>(n) / (x_level * y_level);
    return 2.0 * d * std::exp(r) * std::pow(base, r);
}

double fuk_nagaev_bound_with_tail(std::int64_t n, double x_level, double y_level,
                                  StepDistribution const& dist)
{
    double const head = fuk_nagaev_bound(n, x_level, y_level, dist.dimension());
    double tail = 0;
    switch (dist.kind()) {
        case StepKind::GaussianIsotropic:
            // |X|^2 is chi-square with d degrees of freedom.
            tail = sf::chisq_tail(dist.dimension(), y_level * y_level);
            break;
        case StepKind::SphereUniformScaled:
            tail = y_level < std::sqrt(static_cast<double>(dist.dimension())) ? 1.0 : 0.0;
            break;
        default:
            for (auto const& atom : dist.atoms())
                if (norm(atom.x) > y_level)
                    tail += atom.p;
            break;
    }
    return head + static_cast<double>(n) * tail;
}

}  // namespace conewalk
