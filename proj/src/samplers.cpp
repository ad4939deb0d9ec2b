// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
#include "conewalk/samplers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "conewalk/kernels.hpp"
#include "conewalk/lattice_dp.hpp"
#include "conewalk/rng.hpp"
#include "conewalk/threading.hpp"

namespace conewalk::smp {

namespace {

// Per-replica attempt budget; stream index = replica * kAttemptCap + attempt.
// Exhausting it means the acceptance rate sits below the 1e-6 floor.
constexpr std::int64_t kAttemptCap = std::int64_t{1} << 20;
constexpr std::int64_t kReplicasPerChunk = 64;
// Upper bound on count * max(n,1) * d for full-path ensembles.
constexpr std::int64_t kEnsembleCells = 200'000'000;
constexpr std::int64_t kKplusBudget = 50'000;

void validate_start(Cone const& cone, StepDistribution const& dist, Vec const& x,
                    std::int64_t n, std::int64_t count)
{
    if (dist.dimension() != cone.dimension())
        throw ValidationError("step distribution dimension mismatch");
    if (static_cast<int>(x.size()) != cone.dimension())
        throw ValidationError("start point dimension mismatch");
    if (!cone.contains(x))
        throw ValidationError("start point must lie inside the open cone");
    if (n < 0)
        throw ValidationError("horizon n must be nonnegative");
    if (count < 1 || count > 100'000'000)
        throw ValidationError("sample count must be in [1, 1e8]");
}

void guard_ensemble_size(std::int64_t count, std::int64_t n, int d)
{
    if (count * std::max<std::int64_t>(n, 1) * d > kEnsembleCells)
        throw ValidationError(
            "ensemble too large to store full paths; reduce count or n "
            "(summary collectors avoid per-step storage)");
}

double acceptance_estimate(std::int64_t count, std::int64_t attempts)
{
    if (count >= 2 && attempts > 1)
        return static_cast<double>(count - 1) / static_cast<double>(attempts - 1);
    return attempts > 0 ? 1.0 / static_cast<double>(attempts) : 1.0;
}

std::string kplus_note(Cone const& cone, StepDistribution const& dist, Vec const& x,
                       std::string const& label, std::uint64_t seed)
{
    bool const ok = check_kplus(cone, dist, x, kKplusBudget, seed);
    return "kplus(" + label + "): " + (ok ? "confirmed" : "not confirmed") +
           " (heuristic probe)";
}

// One rejection attempt: walk n steps, calling on_step after each surviving
// step; false as soon as the path leaves the open cone.
template <class OnStep>
bool run_attempt(Cone const& cone, StepDistribution const& dist, Vec const& x,
                 std::int64_t n, RngStream& rs, Vec& pos, OnStep&& on_step)
{
    int const d = cone.dimension();
    pos = x;
    for (std::int64_t k = 1; k <= n; ++k) {
        Vec const st = dist.sample_step(rs);
        for (int j = 0; j < d; ++j)
            pos[j] += st[j];
        if (!cone.contains(pos))
            return false;
        on_step(k, pos);
    }
    return true;
}

[[noreturn]] void throw_floor(std::string const& what)
{
    throw SimulationError("acceptance rate for " + what +
                          " fell below the 1e-6 floor; reduce n, move the start "
                          "deeper into the cone, or use sample_meander_split");
}

void verify_conditioning(Cone const& cone, ConditionedEnsemble const& ens)
{
    for (auto const& p : ens.paths) {
        if (p.exit_index.has_value() ||
            p.positions.size() != static_cast<std::size_t>(ens.n))
            throw SimulationError("internal error: stored path violates its law");
        for (auto const& row : p.positions)
            if (!cone.contains(row))
                throw SimulationError("internal error: stored path leaves the cone");
        if (ens.law == LawKind::Bridge) {
            for (std::size_t j = 0; j < ens.y.size(); ++j)
                if (std::abs((p.positions.empty() ? p.start[j]
                                                  : p.positions.back()[j]) -
                             ens.y[j]) > 1e-9)
                    throw SimulationError("internal error: bridge path misses y");
        }
    }
}

// Rejection over full paths, shared by the meander and the bridge; `accept`
// inspects the endpoint of a surviving path.
template <class AcceptEnd>
void reject_full_paths(Cone const& cone, StepDistribution const& dist, Vec const& x,
                       std::int64_t n, std::int64_t count, PhiloxKey key,
                       StreamTag tag, int threads, AcceptEnd&& accept_end,
                       std::string const& what, std::vector<PathSample>& paths,
                       std::int64_t& attempts_out)
{
    paths.assign(static_cast<std::size_t>(count), PathSample{});
    std::size_t const nchunks = static_cast<std::size_t>(
        (count + kReplicasPerChunk - 1) / kReplicasPerChunk);
    std::vector<std::int64_t> chunk_attempts(nchunks, 0);
    std::mutex fail_mutex;
    std::string failure;
    parallel_chunks(nchunks, threads, [&](std::size_t c) {
        std::int64_t const lo = static_cast<std::int64_t>(c) * kReplicasPerChunk;
        std::int64_t const hi = std::min<std::int64_t>(count, lo + kReplicasPerChunk);
        Vec pos(static_cast<std::size_t>(cone.dimension()));
        for (std::int64_t i = lo; i < hi; ++i) {
            bool ok = false;
            std::int64_t a = 0;
            for (; a < kAttemptCap; ++a) {
                RngStream rs(key, tag,
                             static_cast<std::uint64_t>(i) * kAttemptCap +
                                 static_cast<std::uint64_t>(a));
                std::vector<Vec> rows;
                rows.reserve(static_cast<std::size_t>(n));
                if (run_attempt(cone, dist, x, n, rs, pos,
                                [&](std::int64_t, Vec const& p) {
                                    rows.push_back(p);
                                }) &&
                    accept_end(pos)) {
                    auto& out = paths[static_cast<std::size_t>(i)];
                    out.start = x;
                    out.positions = std::move(rows);
                    out.exit_index.reset();
                    ok = true;
                    break;
                }
            }
            chunk_attempts[c] += std::min(a + 1, kAttemptCap);
            if (!ok) {
                std::lock_guard<std::mutex> lock(fail_mutex);
                if (failure.empty())
                    failure = what;
                return;
            }
        }
    });
    if (!failure.empty())
        throw_floor(failure);
    attempts_out = 0;
    for (std::int64_t a : chunk_attempts)
        attempts_out += a;
}

// --- kernel fast path for the meander summary -------------------------------

struct KernelPlan {
    int cone_code = 0;
    int d = 1;
    std::vector<std::int32_t> start;
};

std::optional<KernelPlan> meander_kernel_plan(Cone const& cone,
                                              StepDistribution const& dist,
                                              Vec const& x, std::int64_t n)
{
    dp::IntLaw law;
    try {
        law = dp::int_law(dist);
    } catch (ValidationError const&) {
        return std::nullopt;
    }
    if (!dp::is_pm1_product(law))
        return std::nullopt;
    KernelPlan plan;
    switch (cone.kind()) {
        case ConeKind::HalfLine:
            plan.cone_code = 0;
            break;
        case ConeKind::Orthant:
            plan.cone_code = 1;
            break;
        case ConeKind::WeylA:
            plan.cone_code = 2;
            break;
        default:
            return std::nullopt;  // half-space needs the free coordinates too
    }
    plan.d = cone.dimension();
    plan.start.resize(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        double const r = std::round(x[j]);
        if (std::abs(x[j] - r) > 1e-9 ||
            std::abs(r) + static_cast<double>(n) > 2e9)
            return std::nullopt;
        plan.start[j] = static_cast<std::int32_t>(r);
    }
    return plan;
}

MeanderSummary meander_summary_kernel(KernelPlan const& plan, std::int64_t n,
                                      std::int64_t count, PhiloxKey key)
{
    int const d = plan.d;
    MeanderSummary out;
    out.d = d;
    out.n = n;
    out.endpoints.assign(static_cast<std::size_t>(count) * d, 0.0);
    out.mids.assign(static_cast<std::size_t>(count) * d, 0.0);
    out.max_norms.assign(static_cast<std::size_t>(count), 0.0);

    std::array<std::uint64_t, 8> streams{};
    std::vector<std::int32_t> start(8 * static_cast<std::size_t>(d));
    std::vector<std::int32_t> final_pos(8 * static_cast<std::size_t>(d));
    std::vector<std::int32_t> check_pos(8 * static_cast<std::size_t>(d));
    for (int lane = 0; lane < 8; ++lane)
        for (int j = 0; j < d; ++j)
            start[static_cast<std::size_t>(lane * d + j)] = plan.start[j];
    std::int64_t const mid_step = std::max<std::int64_t>(1, n / 2);

    kern::RademacherSpec spec;
    spec.key = key;
    spec.streams = streams.data();
    spec.cone_code = plan.cone_code;
    spec.d = d;
    spec.start = start.data();
    spec.nsteps = n;
    spec.checkpoints = &mid_step;
    spec.ncheck = 1;
    spec.want_max = true;
    kern::RademacherOut kout;
    kout.final_pos = final_pos.data();
    kout.checkpoint_pos = check_pos.data();

    auto const& o = kern::ops();
    std::int64_t accepted = 0;
    for (std::int64_t b = 0; accepted < count; ++b) {
        for (int lane = 0; lane < 8; ++lane)
            streams[static_cast<std::size_t>(lane)] = stream_id(
                StreamTag::MeanderAttempt, static_cast<std::uint64_t>(b * 8 + lane));
        o.rademacher_block(spec, kout);
        for (int lane = 0; lane < 8 && accepted < count; ++lane) {
            if (kout.survived[lane] != n)
                continue;
            std::size_t const row = static_cast<std::size_t>(accepted);
            for (int j = 0; j < d; ++j) {
                out.endpoints[row * d + j] = final_pos[static_cast<std::size_t>(
                    lane * d + j)];
                out.mids[row * d + j] =
                    check_pos[static_cast<std::size_t>(lane * d + j)];
            }
            out.max_norms[row] =
                std::sqrt(static_cast<double>(kout.max_sqnorm[lane]));
            ++accepted;
            out.attempts = b * 8 + lane + 1;
        }
        std::int64_t const tried = (b + 1) * 8;
        if (tried >= 10'000'000 &&
            accepted * 1'000'000 < tried)
            throw_floor("the meander sampler");
    }
    out.acceptance = acceptance_estimate(count, out.attempts);
    return out;
}

// --- h-transform core -------------------------------------------------------

// Draws one h-transform step from `pos` given atom list and V functor;
// returns the chosen atom index.
template <class VFn>
int htransform_step(Cone const& cone, std::vector<LatticeAtom> const& atoms,
                    Vec const& pos, Vec& cand, std::vector<double>& cum,
                    VFn&& value_of, RngStream& rs)
{
    int const d = cone.dimension();
    double total = 0;
    for (std::size_t a = 0; a < atoms.size(); ++a) {
        double w = 0;
        for (int j = 0; j < d; ++j)
            cand[j] = pos[j] + atoms[a].x[j];
        if (cone.contains(cand))
            w = atoms[a].p * value_of(cand);
        total += w;
        cum[a] = total;
    }
    if (!(total > 0))
        throw SimulationError("h-transform chain has no admissible transition");
    double const u = rs.next_unit() * total;
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    if (it == cum.end())
        --it;
    return static_cast<int>(it - cum.begin());
}

template <class VFn>
ConditionedEnsemble htransform_full(Cone const& cone, StepDistribution const& dist,
                                    Vec const& x, std::int64_t n, std::int64_t count,
                                    std::uint64_t seed, int threads, VFn&& value_of)
{
    guard_ensemble_size(count, n, cone.dimension());
    ConditionedEnsemble ens;
    ens.law = LawKind::HTransform;
    ens.n = n;
    ens.start = x;
    ens.cone_name = cone.name();
    ens.dist_name = dist.name();
    ens.seed = seed;
    ens.attempts = count;
    ens.acceptance = 1.0;
    ens.paths.assign(static_cast<std::size_t>(count), PathSample{});
    PhiloxKey const key = make_key(seed, "htransform");
    auto const& atoms = dist.atoms();
    std::size_t const nchunks = static_cast<std::size_t>(
        (count + kReplicasPerChunk - 1) / kReplicasPerChunk);
    parallel_chunks(nchunks, threads, [&](std::size_t c) {
        std::int64_t const lo = static_cast<std::int64_t>(c) * kReplicasPerChunk;
        std::int64_t const hi = std::min<std::int64_t>(count, lo + kReplicasPerChunk);
        int const d = cone.dimension();
        Vec pos(static_cast<std::size_t>(d)), cand(static_cast<std::size_t>(d));
        std::vector<double> cum(atoms.size());
        for (std::int64_t i = lo; i < hi; ++i) {
            RngStream rs(key, StreamTag::HTransform, static_cast<std::uint64_t>(i));
            pos = x;
            auto& out = ens.paths[static_cast<std::size_t>(i)];
            out.start = x;
            out.positions.clear();
            out.positions.reserve(static_cast<std::size_t>(n));
            for (std::int64_t k = 0; k < n; ++k) {
                int const a = htransform_step(cone, atoms, pos, cand, cum,
                                              value_of, rs);
                for (int j = 0; j < d; ++j)
                    pos[j] += atoms[static_cast<std::size_t>(a)].x[j];
                out.positions.push_back(pos);
            }
            out.exit_index.reset();
        }
    });
    verify_conditioning(cone, ens);
    return ens;
}

void require_lattice(StepDistribution const& dist)
{
    dp::int_law(dist);  // throws ValidationError for non-integer supports
}

// --- bridge reachability ----------------------------------------------------

std::vector<long> integral_point(Vec const& v, char const* what)
{
    std::vector<long> out(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
        double const r = std::round(v[j]);
        if (std::abs(v[j] - r) > 1e-9 || std::abs(r) > 2e9)
            throw ValidationError(std::string(what) +
                                  " must be an integer lattice point");
        out[j] = static_cast<long>(r);
    }
    return out;
}

// Reachable sums of exactly n draws from integer `moves`, as a bitset over
// [n*min, n*max]; true iff `target` is attainable.
bool reachable_1d(std::vector<long> const& moves, std::int64_t n, long target)
{
    long mmin = moves[0], mmax = moves[0];
    for (long m : moves) {
        mmin = std::min(mmin, m);
        mmax = std::max(mmax, m);
    }
    if (target < n * mmin || target > n * mmax)
        return false;
    std::int64_t const span = n * (mmax - mmin) + 1;
    std::size_t const words = static_cast<std::size_t>((span + 63) / 64);
    if (static_cast<double>(words) * static_cast<double>(n) * moves.size() > 2e8)
        throw ValidationError("bridge reachability check too large for this n");
    // Bit index of sum s is s - n*mmin, which stays in [0, span) because
    // after k steps the sum lies in [k*mmin, k*mmax] and mmin < 0 < mmax.
    std::vector<std::uint64_t> cur(words, 0), next(words, 0);
    std::int64_t const offset = -n * mmin;
    cur[static_cast<std::size_t>(offset / 64)] =
        std::uint64_t{1} << (offset % 64);
    auto or_shift = [&](std::vector<std::uint64_t>& dst,
                        std::vector<std::uint64_t> const& src, long shift) {
        // dst |= src shifted by `shift` bits (positive = towards higher sums).
        if (shift >= 0) {
            std::size_t const w = static_cast<std::size_t>(shift / 64);
            int const b = static_cast<int>(shift % 64);
            for (std::size_t i = words; i-- > w;) {
                std::uint64_t v = src[i - w] << b;
                if (b && i - w > 0)
                    v |= src[i - w - 1] >> (64 - b);
                dst[i] |= v;
            }
        } else {
            std::size_t const w = static_cast<std::size_t>((-shift) / 64);
            int const b = static_cast<int>((-shift) % 64);
            for (std::size_t i = 0; i + w < words; ++i) {
                std::uint64_t v = src[i + w] >> b;
                if (b && i + w + 1 < words)
                    v |= src[i + w + 1] << (64 - b);
                dst[i] |= v;
            }
        }
    };
    for (std::int64_t k = 0; k < n; ++k) {
        std::fill(next.begin(), next.end(), 0);
        for (long m : moves)
            or_shift(next, cur, m);
        cur.swap(next);
    }
    std::int64_t const idx = target + offset;
    return (cur[static_cast<std::size_t>(idx / 64)] >>
            (idx % 64)) &
           1u;
}

bool reachable(StepDistribution const& dist, std::vector<long> const& from,
               std::vector<long> const& to, std::int64_t n)
{
    auto const law = dp::int_law(dist);
    if (auto marg = dp::factorize_product(law)) {
        for (std::size_t j = 0; j < from.size(); ++j)
            if (!reachable_1d((*marg)[j].first, n, to[j] - from[j]))
                return false;
        return true;
    }
    // Correlated support: exhaustive set DP with a work guard.
    std::set<std::vector<long>> cur{std::vector<long>(from.size(), 0)};
    double work = 0;
    for (std::int64_t k = 0; k < n; ++k) {
        std::set<std::vector<long>> next;
        work += static_cast<double>(cur.size()) * law.moves.size();
        if (work > 2e7)
            throw ValidationError("bridge reachability check too large for this n");
        for (auto const& s : cur) {
            for (auto const& mv : law.moves) {
                std::vector<long> t(s);
                for (std::size_t j = 0; j < t.size(); ++j)
                    t[j] += mv[j];
                next.insert(std::move(t));
            }
        }
        cur.swap(next);
    }
    std::vector<long> delta(from.size());
    for (std::size_t j = 0; j < from.size(); ++j)
        delta[j] = to[j] - from[j];
    return cur.count(delta) > 0;
}

StepDistribution reversed_steps(StepDistribution const& dist)
{
    auto atoms = dist.atoms();
    for (auto& a : atoms)
        for (double& v : a.x)
            v = -v;
    return StepDistribution::lattice(dist.dimension(), std::move(atoms));
}

}  // namespace

// --- meander ----------------------------------------------------------------

ConditionedEnsemble sample_meander(Cone const& cone, StepDistribution const& dist,
                                   Vec const& x, std::int64_t n, std::int64_t count,
                                   std::uint64_t seed, int threads)
{
    validate_start(cone, dist, x, n, count);
    guard_ensemble_size(count, n, cone.dimension());
    ConditionedEnsemble ens;
    ens.law = LawKind::Meander;
    ens.n = n;
    ens.start = x;
    ens.cone_name = cone.name();
    ens.dist_name = dist.name();
    ens.seed = seed;
    ens.notes.push_back(kplus_note(cone, dist, x, "x", seed));
    if (n == 0) {
        ens.paths.assign(static_cast<std::size_t>(count),
                         PathSample{x, {}, std::nullopt});
        ens.attempts = count;
        ens.acceptance = 1.0;
        return ens;
    }
    PhiloxKey const key = make_key(seed, "meander");
    reject_full_paths(
        cone, dist, x, n, count, key, StreamTag::MeanderAttempt, threads,
        [](Vec const&) { return true; }, "the meander sampler", ens.paths,
        ens.attempts);
    ens.acceptance = acceptance_estimate(count, ens.attempts);
    verify_conditioning(cone, ens);
    return ens;
}

MeanderSummary sample_meander_summary(Cone const& cone, StepDistribution const& dist,
                                      Vec const& x, std::int64_t n, std::int64_t count,
                                      std::uint64_t seed, int threads)
{
    validate_start(cone, dist, x, n, count);
    if (n < 1)
        throw ValidationError("summary collectors require n >= 1");
    PhiloxKey const key = make_key(seed, "meander");
    if (auto plan = meander_kernel_plan(cone, dist, x, n))
        return meander_summary_kernel(*plan, n, count, key);

    int const d = cone.dimension();
    MeanderSummary out;
    out.d = d;
    out.n = n;
    out.endpoints.assign(static_cast<std::size_t>(count) * d, 0.0);
    out.mids.assign(static_cast<std::size_t>(count) * d, 0.0);
    out.max_norms.assign(static_cast<std::size_t>(count), 0.0);
    std::int64_t const mid_step = std::max<std::int64_t>(1, n / 2);
    std::size_t const nchunks = static_cast<std::size_t>(
        (count + kReplicasPerChunk - 1) / kReplicasPerChunk);
    std::vector<std::int64_t> chunk_attempts(nchunks, 0);
    std::mutex fail_mutex;
    std::string failure;
    parallel_chunks(nchunks, threads, [&](std::size_t c) {
        std::int64_t const lo = static_cast<std::int64_t>(c) * kReplicasPerChunk;
        std::int64_t const hi = std::min<std::int64_t>(count, lo + kReplicasPerChunk);
        Vec pos(static_cast<std::size_t>(d)), mid(static_cast<std::size_t>(d));
        for (std::int64_t i = lo; i < hi; ++i) {
            bool ok = false;
            std::int64_t a = 0;
            for (; a < kAttemptCap; ++a) {
                RngStream rs(key, StreamTag::MeanderAttempt,
                             static_cast<std::uint64_t>(i) * kAttemptCap +
                                 static_cast<std::uint64_t>(a));
                double mx = sqnorm(x);
                if (run_attempt(cone, dist, x, n, rs, pos,
                                [&](std::int64_t k, Vec const& p) {
                                    mx = std::max(mx, sqnorm(p));
                                    if (k == mid_step)
                                        mid = p;
                                })) {
                    std::size_t const row = static_cast<std::size_t>(i);
                    for (int j = 0; j < d; ++j) {
                        out.endpoints[row * d + j] = pos[j];
                        out.mids[row * d + j] = mid[j];
                    }
                    out.max_norms[row] = std::sqrt(mx);
                    ok = true;
                    break;
                }
            }
            chunk_attempts[c] += std::min(a + 1, kAttemptCap);
            if (!ok) {
                std::lock_guard<std::mutex> lock(fail_mutex);
                if (failure.empty())
                    failure = "the meander sampler";
                return;
            }
        }
    });
    if (!failure.empty())
        throw_floor(failure);
    for (std::int64_t a : chunk_attempts)
        out.attempts += a;
    out.acceptance = acceptance_estimate(count, out.attempts);
    return out;
}

ConditionedEnsemble sample_meander_split(Cone const& cone, StepDistribution const& dist,
                                         Vec const& x, std::int64_t n,
                                         std::int64_t count,
                                         std::vector<std::int64_t> const& levels,
                                         std::uint64_t seed, int threads)
{
    validate_start(cone, dist, x, n, count);
    guard_ensemble_size(count, n, cone.dimension());
    if (levels.empty() || levels.back() != n)
        throw ValidationError("levels must end at n");
    for (std::size_t l = 0; l < levels.size(); ++l)
        if (levels[l] < 1 || (l > 0 && levels[l] <= levels[l - 1]))
            throw ValidationError("levels must be strictly increasing and >= 1");
    if (levels.size() == 1) {
        auto ens = sample_meander(cone, dist, x, n, count, seed, threads);
        ens.notes.push_back("splitting degenerated to exact rejection (one level)");
        return ens;
    }
    if (count < 2)
        throw ValidationError("splitting needs count >= 2");

    ConditionedEnsemble ens;
    ens.law = LawKind::Meander;
    ens.n = n;
    ens.start = x;
    ens.cone_name = cone.name();
    ens.dist_name = dist.name();
    ens.seed = seed;
    ens.approximate = true;
    ens.notes.push_back(kplus_note(cone, dist, x, "x", seed));
    ens.notes.push_back(
        "multilevel splitting: resampled output, law approximate");

    PhiloxKey const key = make_key(seed, "meander-split");
    int const d = cone.dimension();
    std::vector<PathSample> cur(static_cast<std::size_t>(count),
                                PathSample{x, {}, std::nullopt});
    std::vector<char> alive(static_cast<std::size_t>(count), 1);
    double prod = 1.0;
    std::int64_t min_survivors = count;
    std::int64_t prev = 0;
    std::size_t const nchunks = static_cast<std::size_t>(
        (count + kReplicasPerChunk - 1) / kReplicasPerChunk);
    for (std::size_t l = 0; l < levels.size(); ++l) {
        std::int64_t const seg = levels[l] - prev;
        prev = levels[l];
        parallel_chunks(nchunks, threads, [&](std::size_t c) {
            std::int64_t const lo = static_cast<std::int64_t>(c) * kReplicasPerChunk;
            std::int64_t const hi =
                std::min<std::int64_t>(count, lo + kReplicasPerChunk);
            for (std::int64_t i = lo; i < hi; ++i) {
                if (!alive[static_cast<std::size_t>(i)])
                    continue;
                RngStream rs(key, StreamTag::SplitAdvance,
                             (static_cast<std::uint64_t>(l) << 32) |
                                 static_cast<std::uint64_t>(i));
                auto& path = cur[static_cast<std::size_t>(i)];
                Vec pos = path.positions.empty() ? path.start
                                                 : path.positions.back();
                for (std::int64_t k = 0; k < seg; ++k) {
                    Vec const st = dist.sample_step(rs);
                    for (int j = 0; j < d; ++j)
                        pos[j] += st[j];
                    if (!cone.contains(pos)) {
                        alive[static_cast<std::size_t>(i)] = 0;
                        break;
                    }
                    path.positions.push_back(pos);
                }
            }
        });
        std::vector<std::int64_t> survivors;
        for (std::int64_t i = 0; i < count; ++i)
            if (alive[static_cast<std::size_t>(i)])
                survivors.push_back(i);
        if (survivors.empty())
            throw SimulationError("level extinction: no particle reached horizon " +
                                  std::to_string(levels[l]) + " (level " +
                                  std::to_string(l + 1) + ")");
        prod *= static_cast<double>(survivors.size()) / static_cast<double>(count);
        min_survivors = std::min<std::int64_t>(min_survivors,
                                               static_cast<std::int64_t>(
                                                   survivors.size()));
        // Resample the population uniformly from the survivors.
        RngStream rr(key, StreamTag::SplitResample, static_cast<std::uint64_t>(l));
        std::vector<PathSample> next(static_cast<std::size_t>(count));
        for (std::int64_t i = 0; i < count; ++i) {
            std::size_t idx = static_cast<std::size_t>(
                rr.next_unit() * static_cast<double>(survivors.size()));
            if (idx >= survivors.size())
                idx = survivors.size() - 1;
            next[static_cast<std::size_t>(i)] =
                cur[static_cast<std::size_t>(survivors[idx])];
        }
        cur = std::move(next);
        std::fill(alive.begin(), alive.end(), 1);
    }
    ens.paths = std::move(cur);
    ens.attempts = count * static_cast<std::int64_t>(levels.size());
    ens.acceptance = prod;
    ens.ess = static_cast<double>(min_survivors);
    verify_conditioning(cone, ens);
    return ens;
}

// --- h-transform ------------------------------------------------------------

ConditionedEnsemble sample_htransform(Cone const& cone, StepDistribution const& dist,
                                      HarmonicTable const& vtable, Vec const& x,
                                      std::int64_t n, std::int64_t count,
                                      std::uint64_t seed, int threads)
{
    validate_start(cone, dist, x, n, count);
    require_lattice(dist);
    if (vtable.cone().name() != cone.name())
        throw ValidationError("vtable was built for a different cone");
    if (!(vtable.value(x) > 0))
        throw ValidationError("V vanishes at the start point");
    double const window = vtable.window_radius();
    auto value_of = [&vtable, window](Vec const& z) {
        if (norm(z) > window)
            throw SimulationError(
                "h-transform walk consulted a state outside the vtable window; "
                "rebuild the table with a larger window_radius");
        return vtable.value(z);
    };
    return htransform_full(cone, dist, x, n, count, seed, threads, value_of);
}

ConditionedEnsemble sample_htransform(Cone const& cone, StepDistribution const& dist,
                                      Vec const& x, std::int64_t n, std::int64_t count,
                                      std::uint64_t seed, int threads)
{
    validate_start(cone, dist, x, n, count);
    require_lattice(dist);
    if (!closed_form_v(cone, dist, x).has_value())
        throw ValidationError(
            "no closed-form V for this cone/step law; supply a HarmonicTable");
    auto value_of = [&cone](Vec const& z) { return cone.u_value(z); };
    return htransform_full(cone, dist, x, n, count, seed, threads, value_of);
}

HTransformSummary sample_htransform_summary(Cone const& cone,
                                            StepDistribution const& dist, Vec const& x,
                                            std::int64_t n, std::int64_t count,
                                            std::uint64_t seed, int threads)
{
    validate_start(cone, dist, x, n, count);
    if (n < 1)
        throw ValidationError("summary collectors require n >= 1");
    require_lattice(dist);
    if (!closed_form_v(cone, dist, x).has_value())
        throw ValidationError(
            "no closed-form V for this cone/step law; supply a HarmonicTable "
            "and use sample_htransform instead");
    int const d = cone.dimension();
    HTransformSummary out;
    out.d = d;
    out.n = n;
    out.endpoints.assign(static_cast<std::size_t>(count) * d, 0.0);
    out.quarter.assign(static_cast<std::size_t>(count) * d, 0.0);
    out.half.assign(static_cast<std::size_t>(count) * d, 0.0);
    std::int64_t const q1 = std::max<std::int64_t>(1, n / 4);
    std::int64_t const q2 = std::max<std::int64_t>(1, n / 2);
    PhiloxKey const key = make_key(seed, "htransform");
    auto const& atoms = dist.atoms();
    std::size_t const nchunks = static_cast<std::size_t>(
        (count + kReplicasPerChunk - 1) / kReplicasPerChunk);
    parallel_chunks(nchunks, threads, [&](std::size_t c) {
        std::int64_t const lo = static_cast<std::int64_t>(c) * kReplicasPerChunk;
        std::int64_t const hi = std::min<std::int64_t>(count, lo + kReplicasPerChunk);
        Vec pos(static_cast<std::size_t>(d)), cand(static_cast<std::size_t>(d));
        std::vector<double> cum(atoms.size());
        for (std::int64_t i = lo; i < hi; ++i) {
            RngStream rs(key, StreamTag::HTransform, static_cast<std::uint64_t>(i));
            pos = x;
            std::size_t const row = static_cast<std::size_t>(i);
            for (std::int64_t k = 1; k <= n; ++k) {
                int const a = htransform_step(
                    cone, atoms, pos, cand, cum,
                    [&cone](Vec const& z) { return cone.u_value(z); }, rs);
                for (int j = 0; j < d; ++j)
                    pos[j] += atoms[static_cast<std::size_t>(a)].x[j];
                if (k == q1)
                    for (int j = 0; j < d; ++j)
                        out.quarter[row * d + j] = pos[j];
                if (k == q2)
                    for (int j = 0; j < d; ++j)
                        out.half[row * d + j] = pos[j];
            }
            for (int j = 0; j < d; ++j)
                out.endpoints[row * d + j] = pos[j];
        }
    });
    return out;
}

// --- bridge -----------------------------------------------------------------

ConditionedEnsemble sample_bridge(Cone const& cone, StepDistribution const& dist,
                                  Vec const& x, std::int64_t n, Vec const& y,
                                  std::int64_t count, std::uint64_t seed, int threads)
{
    validate_start(cone, dist, x, n, count);
    guard_ensemble_size(count, n, cone.dimension());
    require_lattice(dist);
    if (static_cast<int>(y.size()) != cone.dimension())
        throw ValidationError("bridge target dimension mismatch");
    if (!cone.contains(y))
        throw ValidationError("bridge target must lie inside the open cone");
    auto const xi = integral_point(x, "bridge start");
    auto const yi = integral_point(y, "bridge target");
    if (n == 0) {
        if (xi != yi)
            throw ValidationError("bridge target is unreachable: n = 0 but y != x");
    } else if (!reachable(dist, xi, yi, n)) {
        throw ValidationError(
            "bridge target is unreachable in n steps (parity or range)");
    }

    ConditionedEnsemble ens;
    ens.law = LawKind::Bridge;
    ens.n = n;
    ens.y = y;
    ens.start = x;
    ens.cone_name = cone.name();
    ens.dist_name = dist.name();
    ens.seed = seed;
    ens.notes.push_back(kplus_note(cone, dist, x, "x", seed));
    try {
        ens.notes.push_back(
            kplus_note(cone, reversed_steps(dist), y, "y, reversed steps", seed));
    } catch (ValidationError const&) {
        ens.notes.push_back("kplus(y, reversed steps): not evaluated");
    }
    if (n == 0) {
        ens.paths.assign(static_cast<std::size_t>(count),
                         PathSample{x, {}, std::nullopt});
        ens.attempts = count;
        ens.acceptance = 1.0;
        return ens;
    }
    PhiloxKey const key = make_key(seed, "bridge");
    auto accept_end = [&y](Vec const& pos) {
        for (std::size_t j = 0; j < y.size(); ++j)
            if (std::abs(pos[j] - y[j]) > 1e-9)
                return false;
        return true;
    };
    reject_full_paths(cone, dist, x, n, count, key, StreamTag::BridgeAttempt, threads,
                      accept_end, "the bridge sampler", ens.paths, ens.attempts);
    ens.acceptance = acceptance_estimate(count, ens.attempts);
    verify_conditioning(cone, ens);
    return ens;
}

// --- K_+ probe --------------------------------------------------------------

bool bridge_reachable(StepDistribution const& dist, Vec const& x, Vec const& y,
                      std::int64_t n)
{
    require_lattice(dist);
    if (x.size() != y.size())
        throw ValidationError("bridge endpoints must share a dimension");
    auto const xi = integral_point(x, "bridge start");
    auto const yi = integral_point(y, "bridge target");
    if (n == 0)
        return xi == yi;
    return reachable(dist, xi, yi, n);
}

bool check_kplus(Cone const& cone, StepDistribution const& dist, Vec const& x,
                 std::int64_t probe_budget, std::uint64_t seed)
{
    if (static_cast<int>(x.size()) != cone.dimension() || !cone.contains(x))
        throw ValidationError("K_+ probe start must lie inside the open cone");
    if (probe_budget <= 0)
        return false;
    constexpr std::int64_t kHorizon = 400;
    constexpr double kRadius = 10.0;
    constexpr double kGamma = 0.1;
    PhiloxKey const key = make_key(seed, "kplus");
    int const d = cone.dimension();
    std::int64_t used = 0;
    for (std::uint64_t a = 0; used < probe_budget; ++a) {
        RngStream rs(key, StreamTag::KPlusProbe, a);
        Vec pos = x;
        for (std::int64_t k = 0; k < kHorizon && used < probe_budget; ++k) {
            ++used;
            Vec const st = dist.sample_step(rs);
            for (int j = 0; j < d; ++j)
                pos[j] += st[j];
            if (!cone.contains(pos))
                break;
            double const r = norm(pos);
            if (r >= kRadius && cone.dist_to_boundary(pos) >= kGamma * r)
                return true;
        }
    }
    return false;
}

}  // namespace conewalk::smp
