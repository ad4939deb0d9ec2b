// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
#include "conewalk/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace conewalk::io {

namespace {

using ordered_json = nlohmann::ordered_json;

std::ofstream open_out(std::string const& path)
{
    std::ofstream out(path, std::ios::binary);  // binary: LF endings everywhere
    if (!out)
        throw ValidationError("cannot open for writing: " + path);
    return out;
}

std::string slurp(std::string const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open for reading: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ordered_json parse_json_file(std::string const& path)
{
    try {
        return ordered_json::parse(slurp(path));
    } catch (nlohmann::json::exception const& e) {
        throw ValidationError("malformed JSON in " + path + ": " + e.what());
    }
}

std::vector<std::string> split_csv_line(std::string const& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ','))
        out.push_back(cell);
    return out;
}

double parse_number(std::string const& cell, std::string const& where)
{
    try {
        std::size_t used = 0;
        double v = std::stod(cell, &used);
        if (used != cell.size() || !std::isfinite(v))
            throw std::invalid_argument(cell);
        return v;
    } catch (std::exception const&) {
        throw ValidationError("malformed number '" + cell + "' in " + where);
    }
}

ordered_json vec_json(Vec const& v)
{
    return ordered_json(v);
}

char const* law_name(smp::LawKind law)
{
    switch (law) {
        case smp::LawKind::Meander: return "meander";
        case smp::LawKind::HTransform: return "htransform";
        default: return "bridge";
    }
}

// Pixel mapping for one plot panel.
struct Panel {
    double x0, x1, y0, y1;  // pixel box; y0 is the top edge
    double lo, hi, vmax;    // data range and value ceiling
    double px(double x) const { return x0 + (x - lo) / (hi - lo) * (x1 - x0); }
    double py(double v) const { return y1 - v / vmax * (y1 - y0); }
};

std::string fmt_px(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string fmt_tick(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

void draw_polyline(std::ostream& out, std::vector<std::pair<double, double>> const& pts,
                   std::string const& color, bool dashed)
{
    if (pts.empty())
        return;
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
    if (dashed)
        out << " stroke-dasharray=\"6 3\"";
    out << " points=\"";
    for (auto const& [x, y] : pts)
        out << fmt_px(x) << ',' << fmt_px(y) << ' ';
    out << "\"/>\n";
}

void draw_frame(std::ostream& out, Panel const& p, std::string const& ylabel)
{
    out << "<rect x=\"" << fmt_px(p.x0) << "\" y=\"" << fmt_px(p.y0) << "\" width=\""
        << fmt_px(p.x1 - p.x0) << "\" height=\"" << fmt_px(p.y1 - p.y0)
        << "\" fill=\"none\" stroke=\"#222\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        double const x = p.lo + (p.hi - p.lo) * i / 4.0;
        out << "<text x=\"" << fmt_px(p.px(x)) << "\" y=\"" << fmt_px(p.y1 + 16)
            << "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">"
            << fmt_tick(x) << "</text>\n";
    }
    out << "<text x=\"" << fmt_px(p.x0 - 8) << "\" y=\"" << fmt_px(p.y0 + 12)
        << "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">"
        << fmt_tick(p.vmax) << "</text>\n";
    out << "<text x=\"" << fmt_px(p.x0 - 8) << "\" y=\"" << fmt_px(p.y1)
        << "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">0</text>\n";
    out << "<text x=\"" << fmt_px(p.x0) << "\" y=\"" << fmt_px(p.y0 - 6)
        << "\" font-family=\"monospace\" font-size=\"12\">" << ylabel << "</text>\n";
}

constexpr char const* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#8c564b"};
constexpr int kPaletteSize = 5;
constexpr int kHistBins = 40;
constexpr std::size_t kCdfPoints = 400;  // decimation cap per CDF polyline

}  // namespace

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_columns_csv(std::string const& path, std::vector<Column> const& cols)
{
    if (cols.empty())
        throw ValidationError("CSV needs at least one column");
    std::size_t const rows = cols.front().values.size();
    for (auto const& c : cols)
        if (c.values.size() != rows)
            throw ValidationError("CSV columns must share one length");
    auto out = open_out(path);
    for (std::size_t j = 0; j < cols.size(); ++j)
        out << (j ? "," : "") << cols[j].name;
    out << '\n';
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j)
            out << (j ? "," : "") << format_double(cols[j].values[i]);
        out << '\n';
    }
}

void write_samples_csv(
    std::string const& path,
    std::vector<std::pair<std::string, std::vector<double>>> const& columns)
{
    if (columns.empty())
        throw ValidationError("samples CSV needs at least one series");
    auto out = open_out(path);
    out << "series,value\n";
    for (auto const& [name, values] : columns)
        for (double v : values)
            out << name << ',' << format_double(v) << '\n';
}

void write_paths_csv(std::string const& path, std::vector<PathSample> const& paths,
                     int d)
{
    auto out = open_out(path);
    out << "replica,k";
    for (int j = 1; j <= d; ++j)
        out << ",coord_" << j;
    out << ",exited\n";
    for (std::size_t r = 0; r < paths.size(); ++r) {
        auto const& p = paths[r];
        if (static_cast<int>(p.start.size()) != d)
            throw ValidationError("path dump: start dimension mismatch");
        out << r << ",0";
        for (double v : p.start)
            out << ',' << format_double(v);
        out << ",0\n";
        for (std::size_t k = 0; k < p.positions.size(); ++k) {
            if (static_cast<int>(p.positions[k].size()) != d)
                throw ValidationError("path dump: position dimension mismatch");
            bool const exited =
                p.exit_index && static_cast<std::int64_t>(k) + 1 >= *p.exit_index;
            out << r << ',' << (k + 1);
            for (double v : p.positions[k])
                out << ',' << format_double(v);
            out << ',' << (exited ? 1 : 0) << '\n';
        }
    }
}

void write_ensemble_csv(std::string const& path, smp::ConditionedEnsemble const& ens)
{
    write_paths_csv(path, ens.paths, static_cast<int>(ens.start.size()));
}

void write_ensemble_sidecar(std::string const& path,
                            smp::ConditionedEnsemble const& ens)
{
    ordered_json j;
    j["schema"] = "conewalk/ensemble/v1";
    j["law"] = law_name(ens.law);
    j["cone"] = ens.cone_name;
    j["steps"] = ens.dist_name;
    j["start"] = vec_json(ens.start);
    if (ens.law == smp::LawKind::Bridge)
        j["end"] = vec_json(ens.y);
    j["n"] = ens.n;
    j["count"] = ens.paths.size();
    j["seed"] = ens.seed;
    j["attempts"] = ens.attempts;
    j["acceptance"] = ens.acceptance;
    j["approximate"] = ens.approximate;
    if (ens.approximate)
        j["ess"] = ens.ess;
    j["notes"] = ens.notes;
    open_out(path) << j.dump(2) << '\n';
}

void write_vtable(std::string const& csv_path, std::string const& sidecar_path,
                  HarmonicTable const& table)
{
    int const d = table.cone().dimension();
    {
        auto out = open_out(csv_path);
        for (int j = 1; j <= d; ++j)
            out << (j > 1 ? "," : "") << "coord_" << j;
        out << ",value\n";
        for (auto const& [pt, v] : table.entries()) {
            for (long c : pt)
                out << c << ',';
            out << format_double(v) << '\n';
        }
    }
    ordered_json j;
    j["schema"] = "conewalk/vtable/v1";
    j["cone"] = table.cone().name();
    j["window_radius"] = table.window_radius();
    j["residual"] = table.residual();
    j["sweeps"] = table.sweeps();
    j["anchor_scale"] = table.anchor_scale();
    j["entries"] = table.entries().size();
    open_out(sidecar_path) << j.dump(2) << '\n';
}

HarmonicTable read_vtable(std::string const& csv_path,
                          std::string const& sidecar_path)
{
    auto meta = parse_json_file(sidecar_path);
    if (meta.value("schema", "") != "conewalk/vtable/v1")
        throw ValidationError("not a vtable sidecar: " + sidecar_path);
    auto cone = Cone::parse(meta.at("cone").get<std::string>());
    double const radius = meta.at("window_radius").get<double>();
    double const residual = meta.value("residual", 0.0);
    double const anchor = meta.value("anchor_scale", 1.0);
    int const d = cone.dimension();

    std::istringstream in(slurp(csv_path));
    std::string line;
    if (!std::getline(in, line) || line.rfind("coord_1,", 0) != 0)
        throw ValidationError("not a vtable CSV: " + csv_path);
    std::vector<std::pair<std::vector<long>, double>> entries;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        auto cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) != d + 1)
            throw ValidationError("vtable row has wrong arity in " + csv_path);
        std::vector<long> pt(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j) {
            double const c = parse_number(cells[static_cast<std::size_t>(j)], csv_path);
            if (std::abs(c - std::round(c)) > 1e-9)
                throw ValidationError("vtable coordinate is not integral in " +
                                      csv_path);
            pt[static_cast<std::size_t>(j)] = std::lround(c);
        }
        entries.emplace_back(std::move(pt),
                             parse_number(cells[static_cast<std::size_t>(d)], csv_path));
    }
    return make_v_table(cone, radius, entries, residual, anchor);
}

std::string sidecar_path_for(std::string const& csv_path)
{
    if (csv_path.size() > 4 && csv_path.rfind(".csv") == csv_path.size() - 4)
        return csv_path.substr(0, csv_path.size() - 4) + ".json";
    return csv_path + ".json";
}

std::string report_to_json(stats::TestReport const& rep)
{
    ordered_json j;
    j["schema"] = "conewalk/report/v1";
    j["experiment"] = rep.experiment;
    j["statistic"] = rep.statistic;
    j["threshold"] = rep.threshold;
    j["pass"] = rep.pass;
    auto details = ordered_json::object();
    for (auto const& [k, v] : rep.details)
        details[k] = v;
    j["details"] = details;
    auto metadata = ordered_json::object();
    for (auto const& [k, v] : rep.metadata)  // std::map: sorted, deterministic
        metadata[k] = v;
    j["metadata"] = metadata;
    return j.dump(2) + "\n";
}

void write_report_json(std::string const& path, stats::TestReport const& rep)
{
    open_out(path) << report_to_json(rep);
}

void write_overlay_svg(std::string const& path, std::string const& title,
                       std::vector<PlotSeries> const& series,
                       ReferenceCurve const& ref)
{
    if (series.empty())
        throw ValidationError("overlay plot needs at least one series");
    double lo = ref.x.empty() ? 0 : *std::min_element(ref.x.begin(), ref.x.end());
    double hi = ref.x.empty() ? 0 : *std::max_element(ref.x.begin(), ref.x.end());
    bool any = !ref.x.empty();
    for (auto const& s : series) {
        if (s.samples.empty())
            throw ValidationError("overlay plot series '" + s.label + "' is empty");
        auto [mn, mx] = std::minmax_element(s.samples.begin(), s.samples.end());
        lo = any ? std::min(lo, *mn) : *mn;
        hi = any ? std::max(hi, *mx) : *mx;
        any = true;
    }
    if (!(hi > lo)) {
        lo -= 1;
        hi += 1;
    }
    double const pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    // Per-series histogram densities over a common grid.
    double const bw = (hi - lo) / kHistBins;
    std::vector<std::vector<double>> dens(series.size(),
                                          std::vector<double>(kHistBins, 0.0));
    double dmax = 0;
    for (std::size_t s = 0; s < series.size(); ++s) {
        for (double v : series[s].samples) {
            int b = static_cast<int>((v - lo) / bw);
            b = std::clamp(b, 0, kHistBins - 1);
            dens[s][static_cast<std::size_t>(b)] += 1.0;
        }
        for (double& v : dens[s]) {
            v /= static_cast<double>(series[s].samples.size()) * bw;
            dmax = std::max(dmax, v);
        }
    }
    for (double v : ref.density)
        dmax = std::max(dmax, v);
    if (!(dmax > 0))
        dmax = 1;

    Panel hist{60, 810, 44, 280, lo, hi, dmax * 1.05};
    Panel cdf{60, 810, 322, 530, lo, hi, 1.0};

    auto out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"840\" height=\"560\" "
           "viewBox=\"0 0 840 560\">\n"
        << "<rect width=\"840\" height=\"560\" fill=\"white\"/>\n"
        << "<text x=\"420\" y=\"22\" font-family=\"monospace\" font-size=\"15\" "
           "text-anchor=\"middle\">"
        << title << "</text>\n";

    draw_frame(out, hist, "density");
    draw_frame(out, cdf, "CDF");

    for (std::size_t s = 0; s < series.size(); ++s) {
        std::string const color = kPalette[s % kPaletteSize];
        std::vector<std::pair<double, double>> pts;
        pts.reserve(2 * kHistBins);
        for (int b = 0; b < kHistBins; ++b) {
            double const y = hist.py(dens[s][static_cast<std::size_t>(b)]);
            pts.emplace_back(hist.px(lo + b * bw), y);
            pts.emplace_back(hist.px(lo + (b + 1) * bw), y);
        }
        draw_polyline(out, pts, color, false);

        auto sorted = series[s].samples;
        std::sort(sorted.begin(), sorted.end());
        std::size_t const n = sorted.size();
        std::size_t const stride = std::max<std::size_t>(1, n / kCdfPoints);
        std::vector<std::pair<double, double>> cpts;
        cpts.emplace_back(cdf.px(sorted.front()), cdf.py(0.0));
        for (std::size_t i = stride - 1; i < n; i += stride)
            cpts.emplace_back(cdf.px(sorted[i]),
                              cdf.py(static_cast<double>(i + 1) /
                                     static_cast<double>(n)));
        cpts.emplace_back(cdf.px(sorted.back()), cdf.py(1.0));
        draw_polyline(out, cpts, color, false);

        double const ly = 56 + 16 * static_cast<double>(s);
        out << "<line x1=\"640\" y1=\"" << fmt_px(ly - 4) << "\" x2=\"668\" y2=\""
            << fmt_px(ly - 4) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"674\" y=\"" << fmt_px(ly)
            << "\" font-family=\"monospace\" font-size=\"12\">" << series[s].label
            << "</text>\n";
    }

    if (!ref.x.empty()) {
        if (!ref.density.empty() && ref.density.size() == ref.x.size()) {
            std::vector<std::pair<double, double>> pts;
            for (std::size_t i = 0; i < ref.x.size(); ++i)
                pts.emplace_back(hist.px(ref.x[i]), hist.py(ref.density[i]));
            draw_polyline(out, pts, "#444", true);
        }
        if (!ref.cdf.empty() && ref.cdf.size() == ref.x.size()) {
            std::vector<std::pair<double, double>> pts;
            for (std::size_t i = 0; i < ref.x.size(); ++i)
                pts.emplace_back(cdf.px(ref.x[i]), cdf.py(ref.cdf[i]));
            draw_polyline(out, pts, "#444", true);
        }
        double const ly = 56 + 16 * static_cast<double>(series.size());
        out << "<line x1=\"640\" y1=\"" << fmt_px(ly - 4) << "\" x2=\"668\" y2=\""
            << fmt_px(ly - 4)
            << "\" stroke=\"#444\" stroke-width=\"2\" stroke-dasharray=\"6 3\"/>\n"
            << "<text x=\"674\" y=\"" << fmt_px(ly)
            << "\" font-family=\"monospace\" font-size=\"12\">" << ref.label
            << "</text>\n";
    }
    out << "</svg>\n";
}

SuiteManifest read_manifest(std::string const& path)
{
    auto j = parse_json_file(path);
    SuiteManifest m;
    if (j.value("schema_version", 0) != 1)
        throw ValidationError("manifest schema_version must be 1 in " + path);
    if (!j.contains("experiments") || !j["experiments"].is_array() ||
        j["experiments"].empty())
        throw ValidationError("manifest needs a non-empty experiments array: " + path);
    try {
        for (auto const& e : j["experiments"]) {
            ExperimentManifest exp;
            exp.id = e.at("id").get<std::string>();
            exp.cone = e.at("cone").get<std::string>();
            exp.steps = e.at("steps").get<std::string>();
            exp.start = e.at("start").get<Vec>();
            if (e.contains("end"))
                exp.end = e["end"].get<Vec>();
            exp.horizons = e.at("horizons").get<std::vector<std::int64_t>>();
            exp.count = e.at("count").get<std::int64_t>();
            if (!e.contains("seed"))  // explicit seeds: no wall-clock defaults
                throw ValidationError("manifest experiment '" + exp.id +
                                      "' needs an explicit seed");
            exp.seed = e["seed"].get<std::uint64_t>();
            if (e.contains("thresholds"))
                exp.thresholds =
                    e["thresholds"].get<std::map<std::string, double>>();
            exp.out = e.value("out", exp.id);
            if (exp.id.empty() || exp.horizons.empty() || exp.count <= 0)
                throw ValidationError("manifest experiment '" + exp.id +
                                      "' has empty id, horizons or count");
            m.experiments.push_back(std::move(exp));
        }
    } catch (nlohmann::json::exception const& e) {
        throw ValidationError("malformed manifest " + path + ": " + e.what());
    }
    return m;
}

void write_manifest(std::string const& path, SuiteManifest const& manifest)
{
    ordered_json j;
    j["schema"] = "conewalk/manifest/v1";
    j["schema_version"] = manifest.schema_version;
    auto arr = ordered_json::array();
    for (auto const& e : manifest.experiments) {
        ordered_json je;
        je["id"] = e.id;
        je["cone"] = e.cone;
        je["steps"] = e.steps;
        je["start"] = vec_json(e.start);
        if (!e.end.empty())
            je["end"] = vec_json(e.end);
        je["horizons"] = e.horizons;
        je["count"] = e.count;
        je["seed"] = e.seed;
        if (!e.thresholds.empty())
            je["thresholds"] = e.thresholds;
        je["out"] = e.out;
        arr.push_back(std::move(je));
    }
    j["experiments"] = std::move(arr);
    open_out(path) << j.dump(2) << '\n';
}

}  // namespace conewalk::io
