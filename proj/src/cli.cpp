// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
#include "conewalk/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "conewalk/common.hpp"
#include "conewalk/cone.hpp"
#include "conewalk/convergence.hpp"
#include "conewalk/harmonic.hpp"
#include "conewalk/io.hpp"
#include "conewalk/lattice_dp.hpp"
#include "conewalk/reference.hpp"
#include "conewalk/rng.hpp"
#include "conewalk/samplers.hpp"
#include "conewalk/specfun.hpp"
#include "conewalk/stats.hpp"
#include "conewalk/steps.hpp"
#include "conewalk/walk.hpp"

namespace conewalk::cli {

namespace {

Vec parse_vec(std::string const& csv, std::string const& what)
{
    Vec out;
    std::string cell;
    std::istringstream in(csv);
    while (std::getline(in, cell, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(cell, &used));
            if (used != cell.size())
                throw std::invalid_argument(cell);
        } catch (std::exception const&) {
            throw ValidationError("malformed " + what + ": '" + csv + "'");
        }
    }
    if (out.empty())
        throw ValidationError(what + " must not be empty");
    return out;
}

// "lo:hi:log10" (10 points per decade), "lo:hi:lin21", or a plain comma list.
std::vector<std::int64_t> parse_horizons(std::string const& s)
{
    std::vector<std::int64_t> out;
    if (s.find(':') == std::string::npos) {
        for (double v : parse_vec(s, "horizon list"))
            out.push_back(static_cast<std::int64_t>(std::llround(v)));
    } else {
        std::vector<std::string> parts;
        std::string tok;
        std::istringstream in(s);
        while (std::getline(in, tok, ':'))
            parts.push_back(tok);
        if (parts.size() != 3)
            throw ValidationError("horizons must be lo:hi:log<k> or lo:hi:lin<k>");
        double lo = 0, hi = 0;
        try {
            lo = std::stod(parts[0]);
            hi = std::stod(parts[1]);
        } catch (std::exception const&) {
            throw ValidationError("malformed horizon bounds: '" + s + "'");
        }
        if (!(lo >= 1) || !(hi > lo))
            throw ValidationError("horizon bounds need 1 <= lo < hi");
        auto const& spec = parts[2];
        if (spec.rfind("log", 0) == 0) {
            int per_decade = spec.size() > 3 ? std::atoi(spec.c_str() + 3) : 10;
            if (per_decade < 1)
                throw ValidationError("log horizon spec needs >= 1 point per decade");
            double const step = 1.0 / per_decade;
            for (double e = std::log10(lo); e < std::log10(hi) + step / 2; e += step)
                out.push_back(static_cast<std::int64_t>(
                    std::llround(std::pow(10.0, std::min(e, std::log10(hi))))));
        } else if (spec.rfind("lin", 0) == 0) {
            int points = spec.size() > 3 ? std::atoi(spec.c_str() + 3) : 11;
            if (points < 2)
                throw ValidationError("lin horizon spec needs >= 2 points");
            for (int i = 0; i < points; ++i)
                out.push_back(static_cast<std::int64_t>(
                    std::llround(lo + (hi - lo) * i / (points - 1))));
        } else {
            throw ValidationError("unknown horizon spec '" + spec + "'");
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (out.empty() || out.front() < 1)
        throw ValidationError("horizons must be positive integers");
    return out;
}

struct GridRange {
    double lo = 0, hi = 0;
    int steps = 0;
};

GridRange parse_grid(std::string const& s)
{
    GridRange g;
    if (std::sscanf(s.c_str(), "%lf:%lf:%d", &g.lo, &g.hi, &g.steps) != 3 ||
        !(g.hi > g.lo) || g.steps < 2)
        throw ValidationError("grid must be r_min:r_max:steps with r_min < r_max");
    return g;
}

// DP survival curves exist exactly for these cone/step combinations; the
// rest estimate by Monte Carlo.
bool dp_structural(Cone const& cone, StepDistribution const& dist)
{
    if (!dist.is_lattice())
        return false;
    dp::IntLaw law;
    try {
        law = dp::int_law(dist);
    } catch (ValidationError const&) {
        return false;
    }
    switch (cone.kind()) {
        case ConeKind::HalfLine:
        case ConeKind::HalfSpace: return true;
        case ConeKind::Orthant: return dp::factorize_product(law).has_value();
        case ConeKind::WeylA:
            return cone.dimension() == 2 ||
                   (cone.dimension() == 3 && dp::is_pm1_product(law));
        default: return false;
    }
}

struct CommonArgs {
    std::string cone, steps, start;
    int threads = 0;
};

void add_common(CLI::App* sub, CommonArgs& a, bool with_start = true)
{
    sub->add_option("--cone", a.cone, "cone spec (half-line, orthant:d, ...)")
        ->required();
    sub->add_option("--steps", a.steps, "step law (lattice:srw, gaussian, ...)")
        ->required();
    if (with_start)
        sub->add_option("--start", a.start, "start point, comma separated")
            ->required();
    sub->add_option("--threads", a.threads, "worker threads (0 = serial)")
        ->envname("CONEWALK_THREADS");
}

struct Parsed {
    Cone cone;
    StepDistribution dist;
    Vec start;
};

Parsed resolve(CommonArgs const& a, bool with_start = true)
{
    Cone cone = Cone::parse(a.cone);
    StepDistribution dist = StepDistribution::parse(a.steps, cone.dimension());
    Vec start;
    if (with_start)
        start = parse_vec(a.start, "start point");
    return {std::move(cone), std::move(dist), std::move(start)};
}

// Reference-curve overlay for a chi(k) radial law, clipped at its 99.95%
// quantile so histograms and curve share a sensible range.
io::ReferenceCurve chi_curve(double k)
{
    io::ReferenceCurve ref;
    char label[48];
    std::snprintf(label, sizeof label, "chi(%g) limit", k);
    ref.label = label;
    double const hi = sf::chi_quantile(k, 0.9995) * 1.05;
    int const pts = 200;
    for (int i = 0; i <= pts; ++i) {
        double const r = hi * i / pts;
        ref.x.push_back(r);
        ref.density.push_back(sf::chi_pdf(k, r));
        ref.cdf.push_back(sf::chi_cdf(k, r));
    }
    return ref;
}

void emit_report_outputs(stats::TestReport const& rep, cvg::SampleDump const& dump,
                         std::string const& report_path,
                         std::string const& samples_path)
{
    if (!report_path.empty())
        io::write_report_json(report_path, rep);
    if (!samples_path.empty())
        io::write_samples_csv(samples_path, dump.columns);
    std::cout << rep.experiment << " statistic=" << io::format_double(rep.statistic)
              << " threshold=" << io::format_double(rep.threshold) << ' '
              << (rep.pass ? "PASS" : "FAIL") << '\n';
}

std::vector<double> dump_column(cvg::SampleDump const& dump, std::string const& name)
{
    for (auto const& [k, v] : dump.columns)
        if (k == name)
            return v;
    return {};
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    CommonArgs common;
    std::int64_t n = 0, replicas = 0;
    std::uint64_t seed = 0;
    std::string record_paths;
};

int run_simulate(SimulateArgs const& a)
{
    auto [cone, dist, start] = resolve(a.common);
    auto est = survival_probability_mc(cone, dist, start, a.n, a.replicas, a.seed,
                                       a.common.threads);
    if (!a.record_paths.empty()) {
        // Replays the estimator's own streams, so the dump shows exactly the
        // trajectories behind the estimate.
        PhiloxKey const key = make_key(a.seed);
        std::vector<PathSample> paths;
        paths.reserve(static_cast<std::size_t>(a.replicas));
        for (std::int64_t r = 0; r < a.replicas; ++r) {
            RngStream rs(key,
                         stream_id(StreamTag::SurvivalMc, static_cast<std::uint64_t>(r)));
            paths.push_back(simulate_path(cone, dist, start, a.n, rs));
        }
        io::write_paths_csv(a.record_paths, paths, cone.dimension());
    }
    std::cout << "survival n=" << a.n << " p_hat=" << io::format_double(est.probability)
              << " se=" << io::format_double(est.std_error)
              << " replicas=" << est.replicas << " method=" << est.method << '\n';
    return 0;
}

// --------------------------------------------------------------- estimate-v

struct EstimateVArgs {
    CommonArgs common;
    double window = 0, tol = 1e-10;
    std::string out;
};

int run_estimate_v(EstimateVArgs const& a)
{
    auto [cone, dist, start] = resolve(a.common, false);
    (void)start;
    HarmonicBuildOptions opts;
    opts.tol = a.tol;
    opts.threads = a.common.threads;
    auto table = build_v_exact(cone, dist, a.window, opts);
    io::write_vtable(a.out, io::sidecar_path_for(a.out), table);
    std::cout << "vtable entries=" << table.entries().size()
              << " residual=" << io::format_double(table.residual())
              << " sweeps=" << table.sweeps() << " -> " << a.out << '\n';
    return 0;
}

// ------------------------------------------------------------------- sample

struct SampleArgs {
    CommonArgs common;
    std::string law, end, vtable, out;
    std::int64_t n = 0, count = 0;
    std::uint64_t seed = 0;
};

int run_sample(SampleArgs const& a)
{
    auto [cone, dist, start] = resolve(a.common);
    if (!a.end.empty() && a.law != "bridge")
        throw ValidationError("--end is only meaningful for --law bridge");
    if (!a.vtable.empty() && a.law != "htransform")
        throw ValidationError("--vtable is only meaningful for --law htransform");
    smp::ConditionedEnsemble ens;
    if (a.law == "meander") {
        ens = smp::sample_meander(cone, dist, start, a.n, a.count, a.seed,
                                  a.common.threads);
    } else if (a.law == "htransform") {
        if (a.vtable.empty()) {
            ens = smp::sample_htransform(cone, dist, start, a.n, a.count, a.seed,
                                         a.common.threads);
        } else {
            auto table =
                io::read_vtable(a.vtable, io::sidecar_path_for(a.vtable));
            ens = smp::sample_htransform(cone, dist, table, start, a.n, a.count,
                                         a.seed, a.common.threads);
        }
    } else {
        if (a.end.empty())
            throw ValidationError("--law bridge needs --end");
        ens = smp::sample_bridge(cone, dist, start, a.n,
                                 parse_vec(a.end, "bridge target"), a.count, a.seed,
                                 a.common.threads);
    }
    io::write_ensemble_csv(a.out, ens);
    io::write_ensemble_sidecar(io::sidecar_path_for(a.out), ens);
    std::cout << "sampled " << ens.paths.size() << ' ' << a.law
              << " paths acceptance=" << io::format_double(ens.acceptance)
              << " attempts=" << ens.attempts << " -> " << a.out << '\n';
    return 0;
}

// ---------------------------------------------------------------- reference

struct ReferenceArgs {
    CommonArgs common;  // steps unused; kept for uniform flag surface
    std::string object, out, start, times = "0,0.25,0.5,1", grid;
    std::int64_t grid_steps = 4096, count = 1000;
    std::uint64_t seed = 1;
    double eps = 0.01, horizon = 1.0, r0 = 0.0, t = 1.0, h = 0.5, r1 = 1.0;
};

void ensemble_columns(ref::GridEnsemble const& ens, std::vector<io::Column>& cols)
{
    std::size_t const count = ens.max_norms.size();
    for (int j = 0; j < ens.d; ++j) {
        io::Column c{"end_" + std::to_string(j + 1), {}};
        c.values.reserve(count);
        for (std::size_t i = 0; i < count; ++i)
            c.values.push_back(ens.endpoints[i * static_cast<std::size_t>(ens.d) +
                                             static_cast<std::size_t>(j)]);
        cols.push_back(std::move(c));
    }
    for (int j = 0; j < ens.d; ++j) {
        io::Column c{"mid_" + std::to_string(j + 1), {}};
        c.values.reserve(count);
        for (std::size_t i = 0; i < count; ++i)
            c.values.push_back(ens.mid[i * static_cast<std::size_t>(ens.d) +
                                       static_cast<std::size_t>(j)]);
        cols.push_back(std::move(c));
    }
    cols.push_back({"max_norm", ens.max_norms});
    if (!ens.weights.empty())
        cols.push_back({"weight", ens.weights});
}

int run_reference(ReferenceArgs const& a)
{
    Cone cone = Cone::parse(a.common.cone);
    std::vector<io::Column> cols;
    if (a.object == "meander") {
        auto ens = ref::sample_bm_meander(cone, a.grid_steps, a.eps, a.count, a.seed,
                                          a.common.threads);
        ensemble_columns(ens, cols);
        std::cout << "bm-meander acceptance=" << io::format_double(ens.acceptance)
                  << " attempts=" << ens.attempts << '\n';
    } else if (a.object == "h-bm") {
        if (a.start.empty())
            throw ValidationError("--object h-bm needs --start");
        auto ens = ref::sample_h_bm(cone, parse_vec(a.start, "start point"), a.horizon,
                                    a.grid_steps, a.count, a.seed, a.common.threads);
        ensemble_columns(ens, cols);
        std::cout << "h-bm acceptance=" << io::format_double(ens.acceptance)
                  << " attempts=" << ens.attempts << '\n';
    } else if (a.object == "bessel") {
        auto law = ref::RadialLaw::for_cone(cone);
        Vec times_d = parse_vec(a.times, "time grid");
        if (times_d.empty() || times_d.front() > 0.0)
            times_d.insert(times_d.begin(), 0.0);
        auto paths = ref::sample_bessel(law, a.r0, times_d, a.count, a.seed);
        for (std::size_t k = 1; k < paths.times.size(); ++k) {
            char name[40];
            std::snprintf(name, sizeof name, "r_t%g", paths.times[k]);
            io::Column c{name, {}};
            c.values.reserve(static_cast<std::size_t>(a.count));
            for (std::int64_t i = 0; i < a.count; ++i)
                c.values.push_back(
                    paths.radii[static_cast<std::size_t>(i) * paths.times.size() + k]);
            cols.push_back(std::move(c));
        }
    } else if (a.object == "entrance-density") {
        if (a.grid.empty())
            throw ValidationError("--object entrance-density needs --grid");
        auto g = parse_grid(a.grid);
        io::Column r{"r", {}}, dens{"density", {}}, cdf{"cdf", {}};
        for (int i = 0; i < g.steps; ++i) {
            double const x = g.lo + (g.hi - g.lo) * i / (g.steps - 1);
            r.values.push_back(x);
            dens.values.push_back(ref::entrance_law_density(cone, a.t, x));
            cdf.values.push_back(ref::entrance_law_cdf(cone, a.t, x));
        }
        cols = {std::move(r), std::move(dens), std::move(cdf)};
    } else {  // kernel
        if (a.grid.empty())
            throw ValidationError("--object kernel needs --grid");
        auto law = ref::RadialLaw::for_cone(cone);
        auto g = parse_grid(a.grid);
        io::Column r{"r2", {}}, dens{"density", {}};
        for (int i = 0; i < g.steps; ++i) {
            double const x = g.lo + (g.hi - g.lo) * i / (g.steps - 1);
            r.values.push_back(x);
            dens.values.push_back(ref::radial_transition_density(law, a.h, a.r1, x));
        }
        cols = {std::move(r), std::move(dens)};
    }
    io::write_columns_csv(a.out, cols);
    return 0;
}

// ------------------------------------------------------- survival-exponent

struct ExponentArgs {
    CommonArgs common;
    std::string horizons, method = "auto", out, report;
    std::int64_t replicas = 200000;
    std::uint64_t seed = 1;
    double slope_tol = 0.05;
};

int run_survival_exponent(ExponentArgs const& a)
{
    auto [cone, dist, start] = resolve(a.common);
    auto horizons = parse_horizons(a.horizons);
    bool use_dp = false;
    if (a.method == "dp")
        use_dp = true;
    else if (a.method == "auto")
        use_dp = dp_structural(cone, dist);
    else if (a.method != "mc")
        throw ValidationError("--method must be auto, dp or mc");

    std::vector<io::Column> cols{{"n", {}}, {"p_hat", {}}};
    std::vector<std::pair<double, double>> points;
    if (use_dp) {
        auto curve = dp::survival_curve(cone, dist, start, horizons.back());
        for (std::int64_t n : horizons) {
            double const p = curve[static_cast<std::size_t>(n - 1)];
            cols[0].values.push_back(static_cast<double>(n));
            cols[1].values.push_back(p);
            points.emplace_back(static_cast<double>(n), p);
        }
    } else {
        cols.push_back({"se", {}});
        for (std::size_t i = 0; i < horizons.size(); ++i) {
            auto est = survival_probability_mc(cone, dist, start, horizons[i],
                                               a.replicas,
                                               a.seed + 1000 * (i + 1),
                                               a.common.threads);
            cols[0].values.push_back(static_cast<double>(horizons[i]));
            cols[1].values.push_back(est.probability);
            cols[2].values.push_back(est.std_error);
            points.emplace_back(static_cast<double>(horizons[i]), est.probability);
        }
    }
    auto fit = stats::exponent_fit(points);
    double const expected = -cone.exponent() / 2.0;

    stats::TestReport rep;
    rep.experiment = "survival-exponent";
    rep.statistic = std::abs(fit.slope - expected);
    rep.threshold = a.slope_tol;
    rep.details = {{"slope", fit.slope},
                   {"slope_stderr", fit.slope_stderr},
                   {"expected_slope", expected},
                   {"intercept", fit.intercept},
                   {"points_used", static_cast<double>(fit.points_used)}};
    rep.metadata = {{"cone", cone.name()},
                    {"dist", dist.name()},
                    {"start", a.common.start},
                    {"horizons", a.horizons},
                    {"method", use_dp ? "exact-dp" : "monte-carlo"},
                    {"replicas", std::to_string(use_dp ? 0 : a.replicas)},
                    {"seed", std::to_string(a.seed)}};
    rep.finalize();

    if (!a.out.empty()) {
        io::write_columns_csv(a.out, cols);
    } else {
        std::cout << cols[0].name;
        for (std::size_t j = 1; j < cols.size(); ++j)
            std::cout << ',' << cols[j].name;
        std::cout << '\n';
        for (std::size_t i = 0; i < cols[0].values.size(); ++i) {
            std::cout << io::format_double(cols[0].values[i]);
            for (std::size_t j = 1; j < cols.size(); ++j)
                std::cout << ',' << io::format_double(cols[j].values[i]);
            std::cout << '\n';
        }
    }
    if (!a.report.empty())
        io::write_report_json(a.report, rep);
    std::cout << "survival-exponent slope=" << io::format_double(fit.slope)
              << " expected=" << io::format_double(expected)
              << " tol=" << io::format_double(a.slope_tol) << ' '
              << (rep.pass ? "PASS" : "FAIL") << '\n';
    return rep.pass ? 0 : 3;
}

// ------------------------------------------------------------- test-* family

struct ConvArgs {
    CommonArgs common;
    std::string end, vtable, report, samples, plot;
    std::int64_t n = 0, count = 0;
    std::uint64_t seed = 0;
    double t = 0.5;
};

int run_test_meander(ConvArgs const& a)
{
    auto [cone, dist, start] = resolve(a.common);
    cvg::SampleDump dump;
    auto rep = cvg::meander_convergence_test(cone, dist, start, a.n, a.count, a.seed,
                                             &dump);
    emit_report_outputs(rep, dump, a.report, a.samples);
    if (!a.plot.empty())
        io::write_overlay_svg(
            a.plot, "meander endpoint radius vs its limit",
            {{"walk endpoint radius", dump_column(dump, "endpoint_radius")}},
            chi_curve(cone.exponent() + cone.dimension()));
    return rep.pass ? 0 : 3;
}

int run_test_htransform(ConvArgs const& a)
{
    auto [cone, dist, start] = resolve(a.common);
    cvg::SampleDump dump;
    stats::TestReport rep;
    if (a.vtable.empty()) {
        rep = cvg::htransform_convergence_test(cone, dist, start, a.n, a.count,
                                               a.seed, &dump);
    } else {
        auto table = io::read_vtable(a.vtable, io::sidecar_path_for(a.vtable));
        rep = cvg::htransform_convergence_test(cone, dist, table, start, a.n, a.count,
                                               a.seed, &dump);
    }
    emit_report_outputs(rep, dump, a.report, a.samples);
    if (!a.plot.empty())
        io::write_overlay_svg(
            a.plot, "h-walk endpoint radius vs its limit",
            {{"h-walk endpoint radius", dump_column(dump, "endpoint_radius")}},
            chi_curve(ref::RadialLaw::for_cone(cone).degrees));
    return rep.pass ? 0 : 3;
}

int run_test_bridge(ConvArgs const& a)
{
    auto [cone, dist, start] = resolve(a.common);
    if (a.end.empty())
        throw ValidationError("test-bridge needs --end");
    cvg::SampleDump dump;
    auto rep = cvg::bridge_convergence_test(cone, dist, start,
                                            parse_vec(a.end, "bridge target"), a.n,
                                            a.t, a.count, a.seed, &dump);
    emit_report_outputs(rep, dump, a.report, a.samples);
    if (!a.plot.empty())
        io::write_overlay_svg(
            a.plot, "bridge prefix radius: walk vs BM meander (unweighted)",
            {{"walk prefix radius", dump_column(dump, "prefix_radius")},
             {"BM meander radius", dump_column(dump, "grid_radius")}});
    return rep.pass ? 0 : 3;
}

// -------------------------------------------------------------------- suite

struct SuiteArgs {
    std::string manifest, out_dir = "suite-out";
    int threads = 0;
};

double threshold_or(io::ExperimentManifest const& e, std::string const& key,
                    double fallback)
{
    auto it = e.thresholds.find(key);
    return it == e.thresholds.end() ? fallback : it->second;
}

int run_suite(SuiteArgs const& a)
{
    auto manifest = io::read_manifest(a.manifest);
    std::filesystem::create_directories(a.out_dir);
    bool all_pass = true;
    auto results = nlohmann::ordered_json::array();
    for (auto const& e : manifest.experiments) {
        Cone cone = Cone::parse(e.cone);
        StepDistribution dist = StepDistribution::parse(e.steps, cone.dimension());
        cvg::SampleDump dump;
        stats::TestReport rep;
        if (e.id.rfind("survival-exponent", 0) == 0) {
            ExponentArgs x;
            x.common = {e.cone, e.steps, "", a.threads};
            for (std::size_t i = 0; i < e.start.size(); ++i)
                x.common.start += (i ? "," : "") + io::format_double(e.start[i]);
            std::string hz;
            for (std::size_t i = 0; i < e.horizons.size(); ++i)
                hz += (i ? "," : "") + std::to_string(e.horizons[i]);
            x.horizons = hz;
            x.replicas = e.count;
            x.seed = e.seed;
            x.slope_tol = threshold_or(e, "slope_tol", 0.05);
            x.out = a.out_dir + "/" + e.out + ".csv";
            x.report = a.out_dir + "/" + e.out + ".json";
            int const code = run_survival_exponent(x);
            all_pass = all_pass && code == 0;
            auto jr = nlohmann::ordered_json::object();
            jr["id"] = e.id;
            jr["pass"] = code == 0;
            results.push_back(std::move(jr));
            continue;
        }
        if (e.id.rfind("meander", 0) == 0) {
            rep = cvg::meander_convergence_test(cone, dist, e.start, e.horizons.at(0),
                                                e.count, e.seed, &dump);
        } else if (e.id.rfind("htransform", 0) == 0) {
            rep = cvg::htransform_convergence_test(cone, dist, e.start,
                                                   e.horizons.at(0), e.count, e.seed,
                                                   &dump);
        } else if (e.id.rfind("bridge", 0) == 0) {
            if (e.end.empty())
                throw ValidationError("bridge experiment '" + e.id + "' needs end");
            rep = cvg::bridge_convergence_test(cone, dist, e.start, e.end,
                                               e.horizons.at(0),
                                               threshold_or(e, "t", 0.5), e.count,
                                               e.seed, &dump);
        } else {
            throw ValidationError("unknown experiment id prefix: '" + e.id + "'");
        }
        io::write_report_json(a.out_dir + "/" + e.out + ".json", rep);
        io::write_samples_csv(a.out_dir + "/" + e.out + ".csv", dump.columns);
        std::cout << e.id << ": statistic=" << io::format_double(rep.statistic) << ' '
                  << (rep.pass ? "PASS" : "FAIL") << '\n';
        all_pass = all_pass && rep.pass;
        auto jr = nlohmann::ordered_json::object();
        jr["id"] = e.id;
        jr["experiment"] = rep.experiment;
        jr["statistic"] = rep.statistic;
        jr["threshold"] = rep.threshold;
        jr["pass"] = rep.pass;
        results.push_back(std::move(jr));
    }
    nlohmann::ordered_json summary;
    summary["schema"] = "conewalk/suite-summary/v1";
    summary["all_pass"] = all_pass;
    summary["results"] = std::move(results);
    std::ofstream out(a.out_dir + "/suite-summary.json", std::ios::binary);
    if (!out)
        throw ValidationError("cannot write suite summary in " + a.out_dir);
    out << summary.dump(2) << '\n';
    std::cout << "suite " << (all_pass ? "PASS" : "FAIL") << '\n';
    return all_pass ? 0 : 3;
}

}  // namespace

int run(int argc, char const* const* argv)
{
    CLI::App app{"random walks conditioned to stay in cones: simulation, "
                 "harmonic functions, limit references and statistical tests"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    SimulateArgs sim;
    auto* sub_sim = app.add_subcommand("simulate", "estimate P(tau_x > n)");
    add_common(sub_sim, sim.common);
    sub_sim->add_option("--n", sim.n, "horizon")->required();
    sub_sim->add_option("--replicas", sim.replicas, "Monte Carlo replicas")
        ->required();
    sub_sim->add_option("--seed", sim.seed, "RNG seed")->required();
    sub_sim->add_option("--record-paths", sim.record_paths, "dump trajectories CSV");

    EstimateVArgs ev;
    auto* sub_ev = app.add_subcommand("estimate-v", "build the discrete harmonic V");
    add_common(sub_ev, ev.common, false);
    sub_ev->add_option("--window", ev.window, "window radius")->required();
    sub_ev->add_option("--tol", ev.tol, "sweep tolerance");
    sub_ev->add_option("--out", ev.out, "table CSV path")->required();

    SampleArgs smp_args;
    auto* sub_smp = app.add_subcommand("sample", "draw conditioned ensembles");
    sub_smp
        ->add_option("--law", smp_args.law, "conditioned law")
        ->required()
        ->check(CLI::IsMember({"meander", "htransform", "bridge"}));
    add_common(sub_smp, smp_args.common);
    sub_smp->add_option("--n", smp_args.n, "horizon")->required();
    sub_smp->add_option("--end", smp_args.end, "bridge target, comma separated");
    sub_smp->add_option("--vtable", smp_args.vtable, "harmonic table CSV");
    sub_smp->add_option("--count", smp_args.count, "paths to keep")->required();
    sub_smp->add_option("--seed", smp_args.seed, "RNG seed")->required();
    sub_smp->add_option("--out", smp_args.out, "ensemble CSV path")->required();

    ReferenceArgs ra;
    auto* sub_ref = app.add_subcommand("reference", "limit-process ensembles and "
                                                    "densities");
    sub_ref->add_option("--object", ra.object, "reference object")
        ->required()
        ->check(CLI::IsMember(
            {"meander", "h-bm", "bessel", "entrance-density", "kernel"}));
    sub_ref->add_option("--cone", ra.common.cone, "cone spec")->required();
    sub_ref->add_option("--threads", ra.common.threads, "worker threads")
        ->envname("CONEWALK_THREADS");
    sub_ref->add_option("--out", ra.out, "output CSV path")->required();
    sub_ref->add_option("--grid-steps", ra.grid_steps, "time grid steps");
    sub_ref->add_option("--eps", ra.eps, "meander start scale");
    sub_ref->add_option("--count", ra.count, "sample count");
    sub_ref->add_option("--seed", ra.seed, "RNG seed");
    sub_ref->add_option("--start", ra.start, "h-bm start point");
    sub_ref->add_option("--horizon", ra.horizon, "h-bm time horizon");
    sub_ref->add_option("--r0", ra.r0, "bessel start radius");
    sub_ref->add_option("--times", ra.times, "bessel time grid, comma separated");
    sub_ref->add_option("--t", ra.t, "entrance-law time");
    sub_ref->add_option("--grid", ra.grid, "density grid r_min:r_max:steps");
    sub_ref->add_option("--dt", ra.h, "kernel time increment");
    sub_ref->add_option("--r1", ra.r1, "kernel source radius");

    ExponentArgs ex;
    auto* sub_ex = app.add_subcommand("survival-exponent",
                                      "fit the survival tail exponent");
    add_common(sub_ex, ex.common);
    sub_ex->add_option("--horizons", ex.horizons, "lo:hi:log10 or comma list")
        ->required();
    sub_ex->add_option("--method", ex.method, "auto, dp or mc");
    sub_ex->add_option("--replicas", ex.replicas, "Monte Carlo replicas");
    sub_ex->add_option("--seed", ex.seed, "RNG seed");
    sub_ex->add_option("--slope-tol", ex.slope_tol, "pass tolerance on the slope");
    sub_ex->add_option("--out", ex.out, "curve CSV path (default: stdout)");
    sub_ex->add_option("--report", ex.report, "report JSON path");

    ConvArgs tm, th, tb;
    auto* sub_tm = app.add_subcommand("test-meander", "meander convergence test");
    add_common(sub_tm, tm.common);
    sub_tm->add_option("--n", tm.n, "horizon")->required();
    sub_tm->add_option("--count", tm.count, "conditioned samples")->required();
    sub_tm->add_option("--seed", tm.seed, "RNG seed")->required();
    sub_tm->add_option("--report", tm.report, "report JSON path");
    sub_tm->add_option("--samples", tm.samples, "raw functional samples CSV");
    sub_tm->add_option("--plot", tm.plot, "overlay SVG path");

    auto* sub_th = app.add_subcommand("test-htransform",
                                      "h-transform convergence test");
    add_common(sub_th, th.common);
    sub_th->add_option("--n", th.n, "horizon")->required();
    sub_th->add_option("--count", th.count, "conditioned samples")->required();
    sub_th->add_option("--seed", th.seed, "RNG seed")->required();
    sub_th->add_option("--vtable", th.vtable, "harmonic table CSV");
    sub_th->add_option("--report", th.report, "report JSON path");
    sub_th->add_option("--samples", th.samples, "raw functional samples CSV");
    sub_th->add_option("--plot", th.plot, "overlay SVG path");

    auto* sub_tb = app.add_subcommand("test-bridge", "bridge convergence test");
    add_common(sub_tb, tb.common);
    sub_tb->add_option("--end", tb.end, "bridge target, comma separated")->required();
    sub_tb->add_option("--n", tb.n, "horizon")->required();
    sub_tb->add_option("--t", tb.t, "prefix time in (0,1)");
    sub_tb->add_option("--count", tb.count, "conditioned samples")->required();
    sub_tb->add_option("--seed", tb.seed, "RNG seed")->required();
    sub_tb->add_option("--report", tb.report, "report JSON path");
    sub_tb->add_option("--samples", tb.samples, "raw functional samples CSV");
    sub_tb->add_option("--plot", tb.plot, "overlay SVG path");

    SuiteArgs su;
    auto* sub_su = app.add_subcommand("suite", "run a manifest of experiments");
    sub_su->add_option("--manifest", su.manifest, "manifest JSON path")->required();
    sub_su->add_option("--out-dir", su.out_dir, "output directory");
    sub_su->add_option("--threads", su.threads, "worker threads")
        ->envname("CONEWALK_THREADS");

    try {
        app.parse(argc, argv);
    } catch (CLI::CallForHelp const& e) {
        std::cout << app.help();
        return 0;
    } catch (CLI::CallForVersion const& e) {
        std::cout << app.version() << '\n';
        return 0;
    } catch (CLI::ParseError const& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (sub_sim->parsed())
            return run_simulate(sim);
        if (sub_ev->parsed())
            return run_estimate_v(ev);
        if (sub_smp->parsed())
            return run_sample(smp_args);
        if (sub_ref->parsed())
            return run_reference(ra);
        if (sub_ex->parsed())
            return run_survival_exponent(ex);
        if (sub_tm->parsed())
            return run_test_meander(tm);
        if (sub_th->parsed())
            return run_test_htransform(th);
        if (sub_tb->parsed())
            return run_test_bridge(tb);
        if (sub_su->parsed())
            return run_suite(su);
    } catch (ValidationError const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (SimulationError const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (std::exception const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;  // unreachable with require_subcommand(1)
}

int run(std::vector<std::string> const& args)
{
    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.push_back(kToolName);
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char const*> argv;
    argv.reserve(argv_store.size());
    for (auto const& s : argv_store)
        argv.push_back(s.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace conewalk::cli
