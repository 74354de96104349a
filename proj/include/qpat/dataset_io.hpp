#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "qpat/config.hpp"
#include "qpat/pipeline.hpp"

namespace qpat {

/// Illumination set as `<stem>_g<j>.qpf` complex boundary traces plus the
/// sidecar `<stem>.json` holding the CGO configurations, epsilon,
/// epsilon_hat and the trace scales.
void write_illumination_set(const std::filesystem::path& dir, const std::string& stem,
                            const Grid& grid, const IlluminationSet& illum);
IlluminationSet read_illumination_set(const std::filesystem::path& sidecar, const Grid& grid);

/// Dataset directory: manifest.json, per source the data fields
/// `s<i>_d<j>.qpf` and the illumination set `s<i>_illum`, the boundary
/// trace `sqrtD_boundary.qpf` and, for synthetic data, `sqrtD_cut.qpf` and
/// the truth fields `truth_<name>.qpf`.
void write_dataset(const std::filesystem::path& dir, const Dataset& ds, const ExperimentConfig& cfg,
                   double delta, std::uint64_t seed);

/// Reads a dataset directory. A missing manifest or file is an I/O error.
/// The geometry recorded in the manifest (domain, poles, margins, source
/// mode) replaces the corresponding fields of `cfg`.
Dataset read_dataset(const std::filesystem::path& dir, ExperimentConfig& cfg);

/// Metrics document of a reconstruction: residuals, minima, diagnostics
/// and, when present, error norms.
nlohmann::json run_metrics(const ReconstructionRun& run);

/// Writes mu, q, sqrtD and sigma_a as QPF1 fields restricted to the region
/// plus `metrics.json`.
void write_report(const std::filesystem::path& dir, const ReconstructionRun& run,
                  const nlohmann::json& context = {});

/// Writes `text` to `path`, raising an I/O error on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace qpat
