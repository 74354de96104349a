#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qpat/cgo.hpp"
#include "qpat/domain.hpp"
#include "qpat/forward.hpp"
#include "qpat/inversion.hpp"
#include "qpat/transport.hpp"

namespace qpat {

enum class SourceMode { two_source, multi_source };
std::string_view to_string(SourceMode m);

enum class PairKind { decaying, growing_decaying };
std::string_view to_string(PairKind p);

enum class StudyKind { refinement, h_sweep, stability, exit_stability, multisource };
std::string_view to_string(StudyKind k);
StudyKind parse_study_kind(std::string_view s);

/// Coefficients given as QPF1 files on the computation grid.
struct CoefficientFiles {
  std::filesystem::path D;
  std::filesystem::path sigma_a;
  std::optional<std::filesystem::path> G;
};

/// One JSON document drives every command. Unset optional values take
/// defaults derived from the domain and the pole.
struct ExperimentConfig {
  int schema = 1;
  DomainSpec domain = DomainSpec::unit_disc();
  std::vector<int> grid_sizes{129};

  Point x0 = Point(2.0, 0.0);
  std::optional<Vec2> omega;
  std::vector<double> h{0.5};
  PairKind pair = PairKind::decaying;
  double cutoff_width = 0.2;
  std::optional<double> gamma_margin;
  std::optional<double> trusted_margin;
  std::optional<double> pole_reach;
  double epsilon = 0.0;

  std::string scenario = "gaussian-bump";
  std::optional<CoefficientFiles> files;

  std::vector<double> noise_levels{0.0};
  std::vector<std::uint64_t> seeds{1};
  NoiseKind noise_kind = NoiseKind::smooth;

  SourceMode mode = SourceMode::two_source;
  std::vector<Point> poles{Point(2.0, 0.6), Point(2.0, -0.6)};
  double det_tol = 1e-3;
  double curl_tol = 0.05;

  SimulationOptions simulation;
  TraceOptions trace;
  SqrtDMode sqrtD_mode = SqrtDMode::strict;

  std::optional<StudyKind> study;
  std::filesystem::path output = "qpat_out";
  std::optional<std::filesystem::path> data;

  double resolved_gamma_margin() const;
  double resolved_trusted_margin() const;
  double resolved_pole_reach(const Point& pole) const;
  Vec2 resolved_omega(const Point& pole) const;
  /// Checks ranges and that coefficient files exist; raises config errors.
  void validate() const;
};

/// Parses and validates a configuration; relative paths resolve against
/// the directory of the file. Missing file: I/O error.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& json_text,
                              const std::filesystem::path& base_dir = {});

}  // namespace qpat
