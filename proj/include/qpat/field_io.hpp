#pragma once

#include <filesystem>

#include "qpat/grid.hpp"

namespace qpat {

/// Header of a QPF1 file: `QPF1 <real|complex> <nx> <ny> <dx> <dy> <ox> <oy>\n`
/// followed by nx*ny row-major little-endian float64 values (re/im
/// interleaved for complex). Exterior nodes hold NaN.
struct FieldHeader {
  bool complex = false;
  int nx = 0;
  int ny = 0;
  double dx = 0.0;
  double dy = 0.0;
  double ox = 0.0;
  double oy = 0.0;
};

FieldHeader read_header(const std::filesystem::path& path);

void write_field(const std::filesystem::path& path, const ScalarField& f);
void write_field(const std::filesystem::path& path, const ComplexField& f);

/// Reads node values; the header must match `grid`. Boundary values stay NaN.
ScalarField read_scalar_field(const std::filesystem::path& path, const GridPtr& grid);
ComplexField read_complex_field(const std::filesystem::path& path, const GridPtr& grid);

/// Boundary traces use the same format with nx = boundary point count,
/// ny = 1, dx = mean arc spacing, dy = 1 and origin (0, 0).
void write_boundary_trace(const std::filesystem::path& path, const Grid& grid,
                          const Eigen::VectorXcd& values);
void write_boundary_trace(const std::filesystem::path& path, const Grid& grid,
                          const Eigen::VectorXd& values);
Eigen::VectorXcd read_boundary_trace(const std::filesystem::path& path, const Grid& grid);
Eigen::VectorXd read_real_boundary_trace(const std::filesystem::path& path, const Grid& grid);

}  // namespace qpat
