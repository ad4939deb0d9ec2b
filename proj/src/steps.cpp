// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
#include "conewalk/steps.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace conewalk {

namespace {

void validate_moments(int d, std::vector<LatticeAtom> const& atoms)
{
    if (atoms.empty())
        throw ValidationError("lattice law needs at least one atom");
    double mass = 0;
    Vec mean(d, 0.0);
    std::vector<Vec> cov(d, Vec(d, 0.0));
    for (auto const& a : atoms) {
        if (static_cast<int>(a.x.size()) != d)
            throw ValidationError("lattice atom dimension mismatch");
        if (!(a.p >= 0))
            throw ValidationError("lattice atom probability must be nonnegative");
        mass += a.p;
        for (int i = 0; i < d; ++i) {
            mean[i] += a.p * a.x[i];
            for (int j = 0; j < d; ++j)
                cov[i][j] += a.p * a.x[i] * a.x[j];
        }
    }
    if (std::abs(mass - 1.0) > 1e-12)
        throw ValidationError("lattice probabilities sum to " + std::to_string(mass) +
                              ", not 1");
    for (int i = 0; i < d; ++i) {
        if (std::abs(mean[i]) > 1e-12)
            throw ValidationError("lattice law violates zero mean in coordinate " +
                                  std::to_string(i));
        for (int j = 0; j < d; ++j) {
            double target = i == j ? 1.0 : 0.0;
            if (std::abs(cov[i][j] - target) > 1e-12)
                throw ValidationError("lattice law violates identity covariance at (" +
                                      std::to_string(i) + "," + std::to_string(j) + ")");
        }
    }
}

std::vector<LatticeAtom> product_law(int d, std::vector<std::pair<double, double>> const& one)
{
    // Product measure of a 1D law (value, prob) across d coordinates.
    std::vector<LatticeAtom> out;
    out.push_back({Vec{}, 1.0});
    for (int j = 0; j < d; ++j) {
        std::vector<LatticeAtom> next;
        next.reserve(out.size() * one.size());
        for (auto const& partial : out) {
            for (auto const& [v, p] : one) {
                LatticeAtom a = partial;
                a.x.push_back(v);
                a.p *= p;
                next.push_back(std::move(a));
            }
        }
        out = std::move(next);
    }
    return out;
}

double float_gcd(double a, double b)
{
    a = std::abs(a);
    b = std::abs(b);
    while (b > 1e-9) {
        double r = std::fmod(a, b);
        a = b;
        b = r;
    }
    return a;
}

}  // namespace

StepDistribution StepDistribution::gaussian(int d)
{
    if (d < 1)
        throw ValidationError("dimension must be positive");
    return StepDistribution(StepKind::GaussianIsotropic, d, "gaussian");
}

StepDistribution StepDistribution::sphere(int d)
{
    if (d < 1)
        throw ValidationError("dimension must be positive");
    return StepDistribution(StepKind::SphereUniformScaled, d, "sphere");
}

StepDistribution StepDistribution::rademacher(int d)
{
    if (d < 1)
        throw ValidationError("dimension must be positive");
    if (d > 16)
        throw ValidationError("rademacher product limited to d <= 16");
    StepDistribution dist(StepKind::RademacherProduct, d, "rademacher");
    dist.atoms_ = product_law(d, {{-1.0, 0.5}, {1.0, 0.5}});
    return dist;
}

StepDistribution StepDistribution::lattice(int d, std::vector<LatticeAtom> atoms)
{
    validate_moments(d, atoms);
    StepDistribution dist(StepKind::LatticeGeneral, d, "lattice");
    dist.atoms_ = std::move(atoms);
    dist.cum_.reserve(dist.atoms_.size());
    double acc = 0;
    for (auto const& a : dist.atoms_) {
        acc += a.p;
        dist.cum_.push_back(acc);
    }
    dist.cum_.back() = 1.0;
    return dist;
}

StepDistribution StepDistribution::parse(std::string_view name, int d)
{
    if (name == "gaussian")
        return gaussian(d);
    if (name == "rademacher")
        return rademacher(d);
    if (name == "sphere")
        return sphere(d);
    constexpr std::string_view prefix = "lattice:";
    if (name.substr(0, prefix.size()) == prefix) {
        std::string_view arg = name.substr(prefix.size());
        if (arg == "srw") {
            auto dist = lattice(d, product_law(d, {{-1.0, 0.5}, {1.0, 0.5}}));
            dist.name_ = "lattice:srw";
            return dist;
        }
        if (arg == "mix2") {
            auto dist = lattice(d, product_law(d, {{-2.0, 1.0 / 16},
                                                   {-1.0, 1.0 / 4},
                                                   {0.0, 3.0 / 8},
                                                   {1.0, 1.0 / 4},
                                                   {2.0, 1.0 / 16}}));
            dist.name_ = "lattice:mix2";
            return dist;
        }
        auto dist = lattice(d, read_support_file(std::string(arg), d));
        dist.name_ = std::string(name);
        return dist;
    }
    throw ValidationError("unknown step distribution: " + std::string(name));
}

double StepDistribution::moment_order() const
{
    return std::numeric_limits<double>::infinity();
}

bool StepDistribution::is_lattice() const
{
    return kind_ == StepKind::RademacherProduct || kind_ == StepKind::LatticeGeneral;
}

std::vector<LatticeAtom> const& StepDistribution::atoms() const
{
    if (!is_lattice())
        throw ValidationError("support enumeration requires a finite-support law");
    return atoms_;
}

Vec StepDistribution::lattice_spacing() const
{
    auto const& at = atoms();
    Vec spacing(d_, 0.0);
    for (int j = 0; j < d_; ++j) {
        double g = 0;
        for (auto const& a : at)
            g = float_gcd(g, a.x[j] - at.front().x[j]);
        spacing[j] = g;
    }
    return spacing;
}

Vec StepDistribution::sample_step(RngStream& rs) const
{
    Vec x(d_);
    switch (kind_) {
        case StepKind::GaussianIsotropic:
            for (auto& v : x)
                v = rs.next_gaussian();
            return x;
        case StepKind::SphereUniformScaled: {
            double n2 = 0;
            do {
                n2 = 0;
                for (auto& v : x) {
                    v = rs.next_gaussian();
                    n2 += v * v;
                }
            } while (n2 < 1e-30);
            double scale = std::sqrt(d_ / n2);
            for (auto& v : x)
                v *= scale;
            return x;
        }
        case StepKind::RademacherProduct: {
            std::uint64_t bits = rs.next_u64();
            for (int j = 0; j < d_; ++j) {
                x[j] = (bits & 1u) ? 1.0 : -1.0;
                bits >>= 1;
            }
            return x;
        }
        case StepKind::LatticeGeneral:
        default: {
            double u = rs.next_unit();
            std::size_t lo = 0, hi = cum_.size() - 1;
            while (lo < hi) {
                std::size_t mid = (lo + hi) / 2;
                if (cum_[mid] < u)
                    lo = mid + 1;
                else
                    hi = mid;
            }
            return atoms_[lo].x;
        }
    }
}

MomentReport check_normalisation(StepDistribution const& dist, std::uint64_t seed,
                                 std::size_t nsamples)
{
    int const d = dist.dimension();
    MomentReport rep;
    rep.mean.assign(d, 0.0);
    rep.cov.assign(d, Vec(d, 0.0));
    if (dist.is_lattice()) {
        rep.exact = true;
        double mass = 0;
        for (auto const& a : dist.atoms()) {
            mass += a.p;
            for (int i = 0; i < d; ++i) {
                rep.mean[i] += a.p * a.x[i];
                for (int j = 0; j < d; ++j)
                    rep.cov[i][j] += a.p * a.x[i] * a.x[j];
            }
        }
        rep.mass_dev = std::abs(mass - 1.0);
        for (int i = 0; i < d; ++i) {
            rep.max_mean_dev = std::max(rep.max_mean_dev, std::abs(rep.mean[i]));
            for (int j = 0; j < d; ++j)
                rep.max_cov_dev = std::max(
                    rep.max_cov_dev, std::abs(rep.cov[i][j] - (i == j ? 1.0 : 0.0)));
        }
        rep.pass = rep.mass_dev <= 1e-12 && rep.max_mean_dev <= 1e-12 &&
                   rep.max_cov_dev <= 1e-12;
        return rep;
    }
    // Monte Carlo check: flag deviations beyond 4 standard errors, where the
    // SE of each covariance entry is estimated from the sample itself.
    rep.exact = false;
    RngStream rs(make_key(seed, "moment-check"), StreamTag::MomentCheck, 0);
    std::vector<Vec> sq(d, Vec(d, 0.0));  // E[(X_i X_j)^2]
    for (std::size_t s = 0; s < nsamples; ++s) {
        Vec x = dist.sample_step(rs);
        for (int i = 0; i < d; ++i) {
            rep.mean[i] += x[i];
            for (int j = 0; j < d; ++j) {
                double prod = x[i] * x[j];
                rep.cov[i][j] += prod;
                sq[i][j] += prod * prod;
            }
        }
    }
    double const n = static_cast<double>(nsamples);
    rep.pass = true;
    for (int i = 0; i < d; ++i) {
        rep.mean[i] /= n;
        for (int j = 0; j < d; ++j) {
            rep.cov[i][j] /= n;
            sq[i][j] /= n;
        }
    }
    for (int i = 0; i < d; ++i) {
        double se_mean = std::sqrt(std::max(rep.cov[i][i] - rep.mean[i] * rep.mean[i],
                                            1e-300) / n);
        rep.max_mean_dev = std::max(rep.max_mean_dev, std::abs(rep.mean[i]));
        if (std::abs(rep.mean[i]) > 4 * se_mean)
            rep.pass = false;
        for (int j = 0; j < d; ++j) {
            double target = i == j ? 1.0 : 0.0;
            double dev = std::abs(rep.cov[i][j] - target);
            double var_entry = std::max(sq[i][j] - rep.cov[i][j] * rep.cov[i][j], 0.0);
            // The scaled sphere law has exactly constant X_i^2 sums; keep a
            // floor so a zero sample variance still tolerates rounding.
            double se = std::sqrt(var_entry / n) + 1e-12;
            rep.max_cov_dev = std::max(rep.max_cov_dev, dev);
            if (dev > 4 * se)
                rep.pass = false;
        }
    }
    return rep;
}

std::vector<LatticeAtom> read_support_file(std::string const& path, int d)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open support file: " + path);
    std::vector<LatticeAtom> atoms;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        LatticeAtom a;
        if (!(ls >> a.p))
            continue;  // blank or comment-only line
        double v;
        while (ls >> v)
            a.x.push_back(v);
        if (static_cast<int>(a.x.size()) != d)
            throw ValidationError("support file " + path + " line " +
                                  std::to_string(lineno) + ": expected " +
                                  std::to_string(d) + " coordinates, got " +
                                  std::to_string(a.x.size()));
        atoms.push_back(std::move(a));
    }
    return atoms;
}

}  // namespace conewalk
