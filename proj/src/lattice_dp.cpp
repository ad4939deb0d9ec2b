// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
#include "conewalk/lattice_dp.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "conewalk/kernels.hpp"

namespace conewalk::dp {

namespace {

long to_long(double v, char const* what)
{
    double r = std::round(v);
    if (std::abs(v - r) > 1e-9)
        throw ValidationError(std::string(what) + " must be an integer lattice value, got " +
                              std::to_string(v));
    return static_cast<long>(r);
}

std::vector<long> to_long_vec(Vec const& x, char const* what)
{
    std::vector<long> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j)
        out[j] = to_long(x[j], what);
    return out;
}

// Collapse a multi-dimensional law to the law of one linear functional
// (coordinate or difference), merging equal values.
std::pair<std::vector<long>, std::vector<double>> collapse(
    IntLaw const& law, std::vector<long> const& weights)
{
    std::map<long, double> m;
    for (std::size_t a = 0; a < law.moves.size(); ++a) {
        long v = 0;
        for (int j = 0; j < law.d; ++j)
            v += weights[j] * law.moves[a][j];
        m[v] += law.probs[a];
    }
    std::vector<long> vals;
    std::vector<double> probs;
    for (auto const& [v, p] : m) {
        vals.push_back(v);
        probs.push_back(p);
    }
    return {vals, probs};
}

// Dense banded DP for a 1D integer walk, optionally killed at w < barrier.
class Band1D {
  public:
    Band1D(std::vector<long> moves, std::vector<double> probs, long x0, std::int64_t n,
           bool has_barrier, long barrier)
        : moves_(std::move(moves)), probs_(std::move(probs)), has_barrier_(has_barrier),
          barrier_(barrier)
    {
        mmin_ = mmax_ = moves_.front();
        for (long a : moves_) {
            mmin_ = std::min(mmin_, a);
            mmax_ = std::max(mmax_, a);
        }
        cap_lo_ = x0 + n * mmin_;
        if (has_barrier_)
            cap_lo_ = std::max(cap_lo_, barrier_);
        cap_hi_ = x0 + n * mmax_;
        if (has_barrier_ && x0 < barrier_)
            throw ValidationError("start point is outside the cone window");
        long len = cap_hi_ - cap_lo_ + 1;
        if (len > 50'000'000)
            throw ValidationError("lattice DP window overflow");
        a_.assign(static_cast<std::size_t>(len), 0.0);
        b_.assign(static_cast<std::size_t>(len), 0.0);
        a_[static_cast<std::size_t>(x0 - cap_lo_)] = 1.0;
        wlo_ = whi_ = x0;
    }

    bool empty() const { return wlo_ > whi_; }

    void step()
    {
        if (empty())
            return;
        long nlo = wlo_ + mmin_;
        long nhi = whi_ + mmax_;
        if (has_barrier_)
            nlo = std::max(nlo, barrier_);
        nlo = std::max(nlo, cap_lo_);
        nhi = std::min(nhi, cap_hi_);
        if (nlo > nhi) {
            wlo_ = 1;
            whi_ = 0;
            return;
        }
        std::fill(b_.begin() + (nlo - cap_lo_), b_.begin() + (nhi - cap_lo_) + 1, 0.0);
        auto const& axpy = kern::ops().axpy;
        for (std::size_t m = 0; m < moves_.size(); ++m) {
            long a = moves_[m];
            long dlo = std::max(nlo, wlo_ + a);
            long dhi = std::min(nhi, whi_ + a);
            if (dlo > dhi)
                continue;
            axpy(a_.data() + (dlo - a - cap_lo_), b_.data() + (dlo - cap_lo_), probs_[m],
                 static_cast<std::size_t>(dhi - dlo + 1));
        }
        a_.swap(b_);
        wlo_ = nlo;
        whi_ = nhi;
    }

    double total() const
    {
        double s = 0;
        for (long w = wlo_; w <= whi_; ++w)
            s += a_[static_cast<std::size_t>(w - cap_lo_)];
        return s;
    }

    long lo() const { return wlo_; }
    long hi() const { return whi_; }
    double value(long w) const
    {
        if (w < wlo_ || w > whi_)
            return 0;
        return a_[static_cast<std::size_t>(w - cap_lo_)];
    }

  private:
    std::vector<long> moves_;
    std::vector<double> probs_;
    bool has_barrier_;
    long barrier_;
    long mmin_, mmax_;
    long cap_lo_, cap_hi_;
    long wlo_, whi_;
    std::vector<double> a_, b_;
};

std::vector<double> band_curve(Band1D& band, std::int64_t n)
{
    std::vector<double> curve;
    curve.reserve(static_cast<std::size_t>(n));
    for (std::int64_t k = 0; k < n; ++k) {
        band.step();
        curve.push_back(band.total());
    }
    return curve;
}

// 2D difference-walk DP for weyl-a:3 with the +/-1 product step law. In
// half-difference units c = (D - parity)/2 the increment law has seven atoms:
// (0,0) w.p. 1/4, each of (0,+-1), (+-1,0), (1,-1), (-1,1) w.p. 1/8; the
// chamber condition x1 < x2 < x3 becomes a quadrant constraint on c.
std::vector<double> weyl3_pm1_curve(long d1, long d2, std::int64_t n)
{
    struct Move {
        int di, dj;
        double p;
    };
    static constexpr Move kMoves[] = {
        {0, 0, 0.25},   {0, 1, 0.125},  {0, -1, 0.125}, {1, 0, 0.125},
        {-1, 0, 0.125}, {1, -1, 0.125}, {-1, 1, 0.125},
    };
    auto idx0 = [](long dd) {
        long par = dd & 1L;
        long c = (dd - par) / 2;
        long cmin = par == 0 ? 1 : 0;  // smallest c with D > 0 at this parity
        return c - cmin + 1;           // grid index, barrier at index 0
    };
    long i0 = idx0(d1), j0 = idx0(d2);
    std::size_t const W = static_cast<std::size_t>(std::max(i0, j0) + n + 2);
    if (W * W > 120'000'000)
        throw ValidationError("weyl-a:3 DP window overflow");
    std::vector<double> cur(W * W, 0.0), nxt(W * W, 0.0);
    cur[static_cast<std::size_t>(i0) * W + j0] = 1.0;
    long rlo = i0, rhi = i0, clo = j0, chi = j0;
    auto const& axpy = kern::ops().axpy;
    std::vector<double> curve;
    curve.reserve(static_cast<std::size_t>(n));
    for (std::int64_t k = 0; k < n; ++k) {
        long nrlo = std::max(1L, rlo - 1), nrhi = std::min<long>(W - 2, rhi + 1);
        long nclo = std::max(1L, clo - 1), nchi = std::min<long>(W - 2, chi + 1);
        for (long r = nrlo; r <= nrhi; ++r)
            std::fill(nxt.begin() + r * W + nclo, nxt.begin() + r * W + nchi + 1, 0.0);
        for (auto const& mv : kMoves) {
            long drlo = std::max(nrlo, rlo + mv.di);
            long drhi = std::min(nrhi, rhi + mv.di);
            long dclo = std::max(nclo, clo + mv.dj);
            long dchi = std::min(nchi, chi + mv.dj);
            if (drlo > drhi || dclo > dchi)
                continue;
            std::size_t len = static_cast<std::size_t>(dchi - dclo + 1);
            for (long r = drlo; r <= drhi; ++r)
                axpy(cur.data() + (r - mv.di) * W + (dclo - mv.dj),
                     nxt.data() + r * W + dclo, mv.p, len);
        }
        cur.swap(nxt);
        rlo = nrlo;
        rhi = nrhi;
        clo = nclo;
        chi = nchi;
        double s = 0;
        for (long r = rlo; r <= rhi; ++r)
            for (long c = clo; c <= chi; ++c)
                s += cur[static_cast<std::size_t>(r) * W + c];
        curve.push_back(s);
    }
    return curve;
}

// Dense window DP over an explicit point set (any cone, small n).
std::vector<double> generic_curve(Cone const& cone, IntLaw const& law,
                                  std::vector<long> const& x0, std::int64_t n,
                                  std::map<std::vector<long>, double>* final_out)
{
    std::map<std::vector<long>, double> cur;
    cur[x0] = 1.0;
    std::vector<double> curve;
    Vec probe(law.d);
    for (std::int64_t k = 0; k < n; ++k) {
        std::map<std::vector<long>, double> nxt;
        for (auto const& [pt, m] : cur) {
            for (std::size_t a = 0; a < law.moves.size(); ++a) {
                std::vector<long> q(pt);
                for (int j = 0; j < law.d; ++j)
                    q[j] += law.moves[a][j];
                for (int j = 0; j < law.d; ++j)
                    probe[j] = static_cast<double>(q[j]);
                if (!cone.contains(probe))
                    continue;
                nxt[std::move(q)] += m * law.probs[a];
            }
        }
        if (nxt.size() * law.moves.size() > 100'000'000)
            throw ValidationError("lattice DP window overflow");
        cur = std::move(nxt);
        double s = 0;
        for (auto const& [pt, m] : cur)
            s += m;
        curve.push_back(s);
    }
    if (final_out != nullptr)
        *final_out = std::move(cur);
    return curve;
}

Band1D make_halfline_band(IntLaw const& law, long x0, std::int64_t n)
{
    std::vector<long> moves(law.moves.size());
    for (std::size_t a = 0; a < law.moves.size(); ++a)
        moves[a] = law.moves[a][0];
    return Band1D(std::move(moves), law.probs, x0, n, true, 1);
}

}  // namespace

IntLaw int_law(StepDistribution const& dist)
{
    if (!dist.is_lattice())
        throw ValidationError("exact lattice DP requires a finite-support law");
    IntLaw law;
    law.d = dist.dimension();
    for (auto const& atom : dist.atoms()) {
        std::vector<long> mv(law.d);
        for (int j = 0; j < law.d; ++j)
            mv[j] = to_long(atom.x[j], "step support");
        law.moves.push_back(std::move(mv));
        law.probs.push_back(atom.p);
    }
    return law;
}

std::optional<Marginals> factorize_product(IntLaw const& law)
{
    Marginals out(law.d);
    for (int j = 0; j < law.d; ++j) {
        std::map<long, double> m;
        for (std::size_t a = 0; a < law.moves.size(); ++a)
            m[law.moves[a][j]] += law.probs[a];
        for (auto const& [v, p] : m) {
            out[j].first.push_back(v);
            out[j].second.push_back(p);
        }
    }
    std::size_t combos = 1;
    for (auto const& [vals, probs] : out) {
        combos *= vals.size();
        if (combos > law.moves.size())
            return std::nullopt;
    }
    if (combos != law.moves.size())
        return std::nullopt;
    for (std::size_t a = 0; a < law.moves.size(); ++a) {
        double expect = 1;
        for (int j = 0; j < law.d; ++j) {
            auto const& [vals, probs] = out[j];
            auto it = std::lower_bound(vals.begin(), vals.end(), law.moves[a][j]);
            expect *= probs[static_cast<std::size_t>(it - vals.begin())];
        }
        if (std::abs(expect - law.probs[a]) > 1e-12)
            return std::nullopt;
    }
    return out;
}

bool is_pm1_product(IntLaw const& law)
{
    if (law.moves.size() != (1u << law.d))
        return false;
    double const p = 1.0 / static_cast<double>(law.moves.size());
    for (std::size_t a = 0; a < law.moves.size(); ++a) {
        if (std::abs(law.probs[a] - p) > 1e-15)
            return false;
        for (int j = 0; j < law.d; ++j)
            if (std::labs(law.moves[a][j]) != 1)
                return false;
    }
    return true;
}

std::vector<double> survival_curve(Cone const& cone, StepDistribution const& dist,
                                   Vec const& x, std::int64_t n)
{
    if (n < 0)
        throw ValidationError("horizon must be nonnegative");
    if (!cone.contains(x))
        throw ValidationError("start point is not inside the cone");
    if (n == 0)
        return {};
    IntLaw law = int_law(dist);
    std::vector<long> x0 = to_long_vec(x, "start point");
    switch (cone.kind()) {
        case ConeKind::HalfLine: {
            Band1D band = make_halfline_band(law, x0[0], n);
            return band_curve(band, n);
        }
        case ConeKind::HalfSpace: {
            std::vector<long> w(law.d, 0);
            w[law.d - 1] = 1;
            auto [vals, probs] = collapse(law, w);
            Band1D band(std::move(vals), std::move(probs), x0[law.d - 1], n, true, 1);
            return band_curve(band, n);
        }
        case ConeKind::Orthant: {
            if (auto marg = factorize_product(law)) {
                std::vector<double> curve(static_cast<std::size_t>(n), 1.0);
                for (int j = 0; j < law.d; ++j) {
                    Band1D band((*marg)[j].first, (*marg)[j].second, x0[j], n, true, 1);
                    auto cj = band_curve(band, n);
                    for (std::size_t k = 0; k < curve.size(); ++k)
                        curve[k] *= cj[k];
                }
                return curve;
            }
            break;
        }
        case ConeKind::WeylA: {
            if (cone.dimension() == 2) {
                auto [vals, probs] = collapse(law, {-1, 1});
                Band1D band(std::move(vals), std::move(probs), x0[1] - x0[0], n, true, 1);
                return band_curve(band, n);
            }
            if (cone.dimension() == 3 && is_pm1_product(law))
                return weyl3_pm1_curve(x0[1] - x0[0], x0[2] - x0[1], n);
            break;
        }
        default:
            break;
    }
    return generic_curve(cone, law, x0, n, nullptr);
}

EndpointLaw1D endpoint_law_1d(Cone const& cone, StepDistribution const& dist,
                              Vec const& x, std::int64_t n)
{
    if (cone.kind() != ConeKind::HalfLine)
        throw ValidationError("1D endpoint law requires the half-line cone");
    if (!cone.contains(x))
        throw ValidationError("start point is not inside the cone");
    if (n < 1)
        throw ValidationError("endpoint law needs n >= 1");
    IntLaw law = int_law(dist);
    long x0 = to_long(x[0], "start point");
    Band1D band = make_halfline_band(law, x0, n);
    for (std::int64_t k = 0; k < n; ++k)
        band.step();
    EndpointLaw1D out;
    out.lo = band.lo();
    if (!band.empty()) {
        out.mass.resize(static_cast<std::size_t>(band.hi() - band.lo() + 1));
        for (long w = band.lo(); w <= band.hi(); ++w) {
            out.mass[static_cast<std::size_t>(w - out.lo)] = band.value(w);
            out.survival += band.value(w);
        }
    }
    return out;
}

EndpointLawND endpoint_law(Cone const& cone, StepDistribution const& dist, Vec const& x,
                           std::int64_t n)
{
    if (!cone.contains(x))
        throw ValidationError("start point is not inside the cone");
    if (n < 1)
        throw ValidationError("endpoint law needs n >= 1");
    IntLaw law = int_law(dist);
    std::vector<long> x0 = to_long_vec(x, "start point");
    std::map<std::vector<long>, double> final_map;
    generic_curve(cone, law, x0, n, &final_map);
    EndpointLawND out;
    for (auto& [pt, m] : final_map) {
        out.points.push_back(pt);
        out.mass.push_back(m);
        out.survival += m;
    }
    return out;
}

EndpointLaw1D bridge_marginal_1d(Cone const& cone, StepDistribution const& dist,
                                 Vec const& x, Vec const& y, std::int64_t n,
                                 std::int64_t k)
{
    if (cone.kind() != ConeKind::HalfLine)
        throw ValidationError("bridge marginal requires the half-line cone");
    if (!cone.contains(x) || !cone.contains(y))
        throw ValidationError("bridge endpoints must lie inside the cone");
    if (k < 1 || k >= n)
        throw ValidationError("bridge marginal time must satisfy 1 <= k < n");
    IntLaw law = int_law(dist);
    long x0 = to_long(x[0], "start point");
    long y0 = to_long(y[0], "endpoint");
    Band1D fwd = make_halfline_band(law, x0, k);
    for (std::int64_t s = 0; s < k; ++s)
        fwd.step();
    std::vector<long> rev(law.moves.size());
    for (std::size_t a = 0; a < law.moves.size(); ++a)
        rev[a] = -law.moves[a][0];
    Band1D bwd(std::move(rev), law.probs, y0, n - k, true, 1);
    for (std::int64_t s = 0; s < n - k; ++s)
        bwd.step();
    EndpointLaw1D out;
    if (fwd.empty() || bwd.empty())
        throw ValidationError("bridge endpoint is unreachable");
    long lo = std::max(fwd.lo(), bwd.lo());
    long hi = std::min(fwd.hi(), bwd.hi());
    double z = 0;
    for (long w = lo; w <= hi; ++w)
        z += fwd.value(w) * bwd.value(w);
    if (z <= 0)
        throw ValidationError("bridge endpoint is unreachable");
    out.lo = lo;
    out.mass.resize(static_cast<std::size_t>(std::max(0L, hi - lo + 1)));
    for (long w = lo; w <= hi; ++w)
        out.mass[static_cast<std::size_t>(w - lo)] = fwd.value(w) * bwd.value(w) / z;
    out.survival = z;
    return out;
}

BridgeTable1D::BridgeTable1D(Cone const& cone, StepDistribution const& dist, double x,
                             double y, std::int64_t n)
{
    if (cone.kind() != ConeKind::HalfLine)
        throw ValidationError("bridge table requires the half-line cone");
    if (n < 1)
        throw ValidationError("bridge needs n >= 1");
    if (!cone.contains({x}) || !cone.contains({y}))
        throw ValidationError("bridge endpoints must lie inside the cone");
    IntLaw law = int_law(dist);
    x_ = to_long(x, "start point");
    long y0 = to_long(y, "endpoint");
    n_ = n;
    moves_.resize(law.moves.size());
    for (std::size_t a = 0; a < law.moves.size(); ++a)
        moves_[a] = law.moves[a][0];
    probs_ = law.probs;
    long mmin = *std::min_element(moves_.begin(), moves_.end());
    long mmax = *std::max_element(moves_.begin(), moves_.end());
    level_lo_.resize(static_cast<std::size_t>(n + 1));
    levels_.resize(static_cast<std::size_t>(n + 1));
    std::size_t total = 0;
    for (std::int64_t k = n; k >= 0; --k) {
        // Intersect "can still reach y" with "reachable from x" and the cone.
        long lo = std::max(y0 - (n - k) * mmax, x_ + k * mmin);
        long hi = std::min(y0 - (n - k) * mmin, x_ + k * mmax);
        lo = std::max(lo, k == 0 ? x_ : 1L);
        if (k == 0) {
            lo = x_;
            hi = x_;
        }
        if (lo > hi) {
            level_lo_[k] = 0;
            continue;  // empty level; sampling will fail via mass 0
        }
        total += static_cast<std::size_t>(hi - lo + 1);
        if (total > 40'000'000)
            throw ValidationError("bridge table too large for this horizon");
        level_lo_[k] = lo;
        auto& lev = levels_[k];
        lev.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
        if (k == n) {
            if (y0 >= lo && y0 <= hi)
                lev[static_cast<std::size_t>(y0 - lo)] = 1.0;
            continue;
        }
        for (long w = lo; w <= hi; ++w) {
            double g = 0;
            for (std::size_t a = 0; a < moves_.size(); ++a)
                g += probs_[a] * level_value(k + 1, w + moves_[a]);
            lev[static_cast<std::size_t>(w - lo)] = g;
        }
    }
    mass_ = level_value(0, x_);
    if (mass_ <= 0)
        throw ValidationError("bridge endpoint is unreachable at this horizon");
}

double BridgeTable1D::level_value(std::int64_t k, long w) const
{
    auto const& lev = levels_[static_cast<std::size_t>(k)];
    if (lev.empty())
        return 0;
    long lo = level_lo_[static_cast<std::size_t>(k)];
    if (w < lo || w >= lo + static_cast<long>(lev.size()))
        return 0;
    return lev[static_cast<std::size_t>(w - lo)];
}

std::vector<long> BridgeTable1D::sample_path(RngStream& rs) const
{
    std::vector<long> path;
    path.reserve(static_cast<std::size_t>(n_));
    long w = x_;
    std::vector<double> cum(moves_.size());
    for (std::int64_t k = 0; k < n_; ++k) {
        double t = 0;
        for (std::size_t a = 0; a < moves_.size(); ++a) {
            t += probs_[a] * level_value(k + 1, w + moves_[a]);
            cum[a] = t;
        }
        double u = rs.next_unit() * t;
        std::size_t pick = 0;
        while (pick + 1 < cum.size() && cum[pick] < u)
            ++pick;
        w += moves_[pick];
        path.push_back(w);
    }
    return path;
}

FreeWalk1D::FreeWalk1D(std::vector<long> moves, std::vector<double> probs, std::int64_t n)
    : moves_(std::move(moves)), probs_(std::move(probs)), n_(n)
{
    long mmin = *std::min_element(moves_.begin(), moves_.end());
    long mmax = *std::max_element(moves_.begin(), moves_.end());
    if (static_cast<double>(mmax - mmin) * n * n / 2 > 80'000'000)
        throw ValidationError("free-walk table too large for this horizon");
    level_lo_.resize(static_cast<std::size_t>(n + 1));
    levels_.resize(static_cast<std::size_t>(n + 1));
    levels_[0] = {1.0};
    level_lo_[0] = 0;
    for (std::int64_t j = 1; j <= n; ++j) {
        long lo = j * mmin, hi = j * mmax;
        level_lo_[j] = lo;
        levels_[j].assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
        auto const& prev = levels_[j - 1];
        long plo = level_lo_[j - 1];
        for (std::size_t a = 0; a < moves_.size(); ++a) {
            for (std::size_t i = 0; i < prev.size(); ++i)
                levels_[j][static_cast<std::size_t>(plo + static_cast<long>(i) +
                                                    moves_[a] - lo)] +=
                    probs_[a] * prev[i];
        }
    }
}

double FreeWalk1D::level_mass(std::int64_t j, long w) const
{
    auto const& lev = levels_[static_cast<std::size_t>(j)];
    long lo = level_lo_[static_cast<std::size_t>(j)];
    if (w < lo || w >= lo + static_cast<long>(lev.size()))
        return 0;
    return lev[static_cast<std::size_t>(w - lo)];
}

double FreeWalk1D::endpoint_mass(long dx) const
{
    return level_mass(n_, dx);
}

void FreeWalk1D::sample_bridge(long dx, RngStream& rs, std::vector<long>& out) const
{
    if (endpoint_mass(dx) <= 0)
        throw ValidationError("free bridge endpoint is unreachable");
    out.clear();
    out.reserve(static_cast<std::size_t>(n_));
    long s = 0;
    std::vector<double> cum(moves_.size());
    for (std::int64_t j = 0; j < n_; ++j) {
        double t = 0;
        for (std::size_t a = 0; a < moves_.size(); ++a) {
            t += probs_[a] * level_mass(n_ - j - 1, dx - s - moves_[a]);
            cum[a] = t;
        }
        double u = rs.next_unit() * t;
        std::size_t pick = 0;
        while (pick + 1 < cum.size() && cum[pick] < u)
            ++pick;
        s += moves_[pick];
        out.push_back(s);
    }
}

namespace {
void enumerate_rec(Cone const& cone, IntLaw const& law, std::vector<long>& pos,
                   Vec& probe, double prob, std::int64_t remaining,
                   std::vector<int>& stack, PathLaw& out)
{
    if (remaining == 0) {
        out.paths.push_back(stack);
        out.probs.push_back(prob);
        out.total += prob;
        return;
    }
    for (std::size_t a = 0; a < law.moves.size(); ++a) {
        for (int j = 0; j < law.d; ++j) {
            pos[j] += law.moves[a][j];
            probe[j] = static_cast<double>(pos[j]);
        }
        if (cone.contains(probe)) {
            stack.push_back(static_cast<int>(a));
            enumerate_rec(cone, law, pos, probe, prob * law.probs[a], remaining - 1,
                          stack, out);
            stack.pop_back();
        }
        for (int j = 0; j < law.d; ++j)
            pos[j] -= law.moves[a][j];
    }
}
}  // namespace

PathLaw enumerate_paths(Cone const& cone, StepDistribution const& dist, Vec const& x,
                        std::int64_t n)
{
    if (!cone.contains(x))
        throw ValidationError("start point is not inside the cone");
    IntLaw law = int_law(dist);
    double combos = std::pow(static_cast<double>(law.moves.size()),
                             static_cast<double>(n));
    if (combos > 2e7)
        throw ValidationError("path enumeration too large");
    std::vector<long> pos = to_long_vec(x, "start point");
    Vec probe(x.size());
    std::vector<int> stack;
    PathLaw out;
    enumerate_rec(cone, law, pos, probe, 1.0, n, stack, out);
    return out;
}

}  // namespace conewalk::dp
