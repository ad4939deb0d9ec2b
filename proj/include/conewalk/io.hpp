// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
//
// File formats: CSV dumps (paths, tables, sample columns), JSON reports,
// sidecars and experiment manifests (schema v1), and self-contained SVG
// overlay plots. All output is UTF-8 with comma separators, point decimal
// and LF line endings, and byte-identical for identical inputs.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "conewalk/common.hpp"
#include "conewalk/harmonic.hpp"
#include "conewalk/samplers.hpp"
#include "conewalk/stats.hpp"
#include "conewalk/walk.hpp"

namespace conewalk::io {

// Full-precision decimal form that parses back to the same double (%.17g).
std::string format_double(double v);

// Generic numeric table; all columns must share one length.
struct Column {
    std::string name;
    std::vector<double> values;
};
void write_columns_csv(std::string const& path, std::vector<Column> const& cols);

// Long-format sample dump (`series,value` rows); series may differ in length.
void write_samples_csv(
    std::string const& path,
    std::vector<std::pair<std::string, std::vector<double>>> const& columns);

// Path dumps: header `replica,k,coord_1..coord_d,exited`. Row k = 0 is the
// start; `exited` is 1 from the first recorded position outside the cone on.
void write_paths_csv(std::string const& path, std::vector<PathSample> const& paths,
                     int d);
void write_ensemble_csv(std::string const& path, smp::ConditionedEnsemble const& ens);
// JSON sidecar with the ensemble's law, sizes, attempts, acceptance and seed.
void write_ensemble_sidecar(std::string const& path,
                            smp::ConditionedEnsemble const& ens);

// Harmonic tables: CSV `coord_1..coord_d,value` plus a JSON sidecar carrying
// the cone, window radius, residual and anchor scale needed to reload.
void write_vtable(std::string const& csv_path, std::string const& sidecar_path,
                  HarmonicTable const& table);
HarmonicTable read_vtable(std::string const& csv_path,
                          std::string const& sidecar_path);
// `foo.csv` -> `foo.json`; anything without a trailing `.csv` gets `.json`
// appended. Shared by every CSV-plus-sidecar writer.
std::string sidecar_path_for(std::string const& csv_path);

// Test reports as ordered JSON (schema v1), deterministic key order.
std::string report_to_json(stats::TestReport const& rep);
void write_report_json(std::string const& path, stats::TestReport const& rep);

// Overlay plot: density histograms (top panel) and empirical CDFs (bottom
// panel) for every series, plus an optional dashed reference curve.
struct PlotSeries {
    std::string label;
    std::vector<double> samples;
};
struct ReferenceCurve {
    std::string label;
    std::vector<double> x;        // shared abscissae; empty disables the curve
    std::vector<double> density;  // may be empty (skips the top panel)
    std::vector<double> cdf;      // may be empty (skips the bottom panel)
};
void write_overlay_svg(std::string const& path, std::string const& title,
                       std::vector<PlotSeries> const& series,
                       ReferenceCurve const& ref = {});

// One experiment of a suite run; `id` selects the runner.
struct ExperimentManifest {
    std::string id;
    std::string cone;
    std::string steps;
    Vec start;
    Vec end;                             // bridge target; empty when unused
    std::vector<std::int64_t> horizons;  // n values; one entry for fixed-n tests
    std::int64_t count = 0;
    std::uint64_t seed = 0;
    std::map<std::string, double> thresholds;  // experiment-specific knobs
    std::string out;  // output stem, resolved relative to the suite directory
};

struct SuiteManifest {
    int schema_version = 1;
    std::vector<ExperimentManifest> experiments;
};

SuiteManifest read_manifest(std::string const& path);
void write_manifest(std::string const& path, SuiteManifest const& manifest);

}  // namespace conewalk::io
