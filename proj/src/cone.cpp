// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
#include "conewalk/cone.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace conewalk {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;

int parse_int(std::string_view s, std::string_view what)
{
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v <= 0)
        throw ValidationError("invalid " + std::string(what) + ": " + std::string(s));
    return v;
}

double parse_real(std::string_view s, std::string_view what)
{
    // std::from_chars for double is not available everywhere; go through stod.
    try {
        std::size_t used = 0;
        double v = std::stod(std::string(s), &used);
        if (used != s.size())
            throw std::invalid_argument("");
        return v;
    } catch (std::exception const&) {
        throw ValidationError("invalid " + std::string(what) + ": " + std::string(s));
    }
}

// Angle of (x, y) in [0, 2*pi).
double angle_of(double x, double y)
{
    double t = std::atan2(y, x);
    if (t < 0)
        t += 2 * kPi;
    return t;
}

// Distance from a point at radius r and angle phi >= 0 from a ray through the
// origin; the nearest boundary point is the foot of the perpendicular when it
// lies on the ray, else the vertex.
double dist_to_ray(double r, double phi)
{
    if (phi >= kPi / 2)
        return r;
    return r * std::sin(phi);
}
}  // namespace

Cone Cone::half_line()
{
    return Cone(ConeKind::HalfLine, 1, 0);
}

Cone Cone::half_space(int d)
{
    if (d < 1)
        throw ValidationError("half-space dimension must be positive");
    return Cone(ConeKind::HalfSpace, d, 0);
}

Cone Cone::orthant(int d)
{
    if (d < 1)
        throw ValidationError("orthant dimension must be positive");
    return Cone(ConeKind::Orthant, d, 0);
}

Cone Cone::wedge(double alpha)
{
    if (!(alpha > 0) || !(alpha < 2 * kPi))
        throw ValidationError("wedge opening angle must lie in (0, 2*pi)");
    return Cone(ConeKind::Wedge2D, 2, alpha);
}

Cone Cone::weyl_a(int d)
{
    if (d < 2)
        throw ValidationError("weyl-a requires dimension >= 2");
    return Cone(ConeKind::WeylA, d, 0);
}

Cone Cone::weyl_b(int d)
{
    if (d < 2)
        throw ValidationError("weyl-b requires dimension >= 2");
    return Cone(ConeKind::WeylB, d, 0);
}

Cone Cone::parse(std::string_view name)
{
    auto colon = name.find(':');
    std::string_view head = name.substr(0, colon);
    std::string_view arg =
        colon == std::string_view::npos ? std::string_view{} : name.substr(colon + 1);
    if (head == "half-line") {
        if (!arg.empty())
            throw ValidationError("half-line takes no parameter");
        return half_line();
    }
    if (head == "half-space")
        return half_space(parse_int(arg, "half-space dimension"));
    if (head == "orthant")
        return orthant(parse_int(arg, "orthant dimension"));
    if (head == "wedge")
        return wedge(parse_real(arg, "wedge angle"));
    if (head == "weyl-a")
        return weyl_a(parse_int(arg, "weyl-a dimension"));
    if (head == "weyl-b")
        return weyl_b(parse_int(arg, "weyl-b dimension"));
    throw ValidationError("unknown cone: " + std::string(name));
}

std::string Cone::name() const
{
    switch (kind_) {
        case ConeKind::HalfLine:
            return "half-line";
        case ConeKind::HalfSpace:
            return "half-space:" + std::to_string(d_);
        case ConeKind::Orthant:
            return "orthant:" + std::to_string(d_);
        case ConeKind::Wedge2D: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "wedge:%.17g", alpha_);
            return buf;
        }
        case ConeKind::WeylA:
            return "weyl-a:" + std::to_string(d_);
        case ConeKind::WeylB:
        default:
            return "weyl-b:" + std::to_string(d_);
    }
}

double Cone::exponent() const
{
    switch (kind_) {
        case ConeKind::HalfLine:
        case ConeKind::HalfSpace:
            return 1.0;
        case ConeKind::Orthant:
            return static_cast<double>(d_);
        case ConeKind::Wedge2D:
            return kPi / alpha_;
        case ConeKind::WeylA:
            return d_ * (d_ - 1) / 2.0;
        case ConeKind::WeylB:
        default:
            return static_cast<double>(d_) * d_;
    }
}

double Cone::lambda1() const
{
    if (d_ == 1)
        throw ValidationError("lambda1 is undefined in dimension 1 (S^0 is degenerate)");
    double p = exponent();
    return p * (p + d_ - 2);
}

void Cone::check_dim(Vec const& x) const
{
    if (static_cast<int>(x.size()) != d_)
        throw ValidationError("point dimension " + std::to_string(x.size()) +
                              " does not match cone dimension " + std::to_string(d_));
}

bool Cone::contains(Vec const& x) const
{
    check_dim(x);
    switch (kind_) {
        case ConeKind::HalfLine:
            return x[0] > 0;
        case ConeKind::HalfSpace:
            return x[d_ - 1] > 0;
        case ConeKind::Orthant:
            for (double v : x)
                if (!(v > 0))
                    return false;
            return true;
        case ConeKind::Wedge2D: {
            if (x[0] == 0 && x[1] == 0)
                return false;
            double t = angle_of(x[0], x[1]);
            return t > 0 && t < alpha_;
        }
        case ConeKind::WeylA:
            for (int j = 0; j + 1 < d_; ++j)
                if (!(x[j] < x[j + 1]))
                    return false;
            return true;
        case ConeKind::WeylB:
        default:
            if (!(x[0] > 0))
                return false;
            for (int j = 0; j + 1 < d_; ++j)
                if (!(x[j] < x[j + 1]))
                    return false;
            return true;
    }
}

double Cone::u_value(Vec const& x) const
{
    check_dim(x);
    switch (kind_) {
        case ConeKind::HalfLine:
            return x[0];
        case ConeKind::HalfSpace:
            return x[d_ - 1];
        case ConeKind::Orthant: {
            double u = 1;
            for (double v : x)
                u *= v;
            return u;
        }
        case ConeKind::Wedge2D: {
            double r = std::hypot(x[0], x[1]);
            if (r == 0)
                return 0;
            double p = kPi / alpha_;
            return std::pow(r, p) * std::sin(p * angle_of(x[0], x[1]));
        }
        case ConeKind::WeylA: {
            double u = 1;
            for (int i = 0; i < d_; ++i)
                for (int j = i + 1; j < d_; ++j)
                    u *= x[j] - x[i];
            return u;
        }
        case ConeKind::WeylB:
        default: {
            double u = 1;
            for (int i = 0; i < d_; ++i)
                u *= x[i];
            for (int i = 0; i < d_; ++i)
                for (int j = i + 1; j < d_; ++j)
                    u *= x[j] * x[j] - x[i] * x[i];
            return u;
        }
    }
}

double Cone::dist_to_boundary(Vec const& x) const
{
    check_dim(x);
    if (!contains(x))
        return 0;
    switch (kind_) {
        case ConeKind::HalfLine:
            return x[0];
        case ConeKind::HalfSpace:
            return x[d_ - 1];
        case ConeKind::Orthant: {
            double m = x[0];
            for (double v : x)
                m = std::min(m, v);
            return m;
        }
        case ConeKind::Wedge2D: {
            double r = std::hypot(x[0], x[1]);
            double t = angle_of(x[0], x[1]);
            return std::min(dist_to_ray(r, t), dist_to_ray(r, alpha_ - t));
        }
        case ConeKind::WeylA: {
            double m = (x[1] - x[0]);
            for (int j = 1; j + 1 < d_; ++j)
                m = std::min(m, x[j + 1] - x[j]);
            return m / std::sqrt(2.0);
        }
        case ConeKind::WeylB:
        default: {
            double m = x[0] * std::sqrt(2.0);  // wall x_1 = 0, rescaled below
            for (int j = 0; j + 1 < d_; ++j)
                m = std::min(m, x[j + 1] - x[j]);
            return m / std::sqrt(2.0);
        }
    }
}

Vec Cone::interior_direction() const
{
    Vec dir(d_, 0.0);
    switch (kind_) {
        case ConeKind::HalfLine:
            dir[0] = 1;
            break;
        case ConeKind::HalfSpace:
            dir[d_ - 1] = 1;
            break;
        case ConeKind::Orthant:
            for (auto& v : dir)
                v = 1.0 / std::sqrt(static_cast<double>(d_));
            break;
        case ConeKind::Wedge2D:
            dir[0] = std::cos(alpha_ / 2);
            dir[1] = std::sin(alpha_ / 2);
            break;
        case ConeKind::WeylA: {
            double s = 0;
            for (int j = 0; j < d_; ++j) {
                dir[j] = j - (d_ - 1) / 2.0;
                s += dir[j] * dir[j];
            }
            for (auto& v : dir)
                v /= std::sqrt(s);
            break;
        }
        case ConeKind::WeylB:
        default: {
            double s = 0;
            for (int j = 0; j < d_; ++j) {
                dir[j] = j + 1.0;
                s += dir[j] * dir[j];
            }
            for (auto& v : dir)
                v /= std::sqrt(s);
            break;
        }
    }
    return dir;
}

}  // namespace conewalk
