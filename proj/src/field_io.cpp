#include "qpat/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qpat {
namespace {

static_assert(std::endian::native == std::endian::little, "QPF1 payload is little-endian");

std::string format_header(const FieldHeader& h) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "QPF1 %s %d %d %.17g %.17g %.17g %.17g\n",
                h.complex ? "complex" : "real", h.nx, h.ny, h.dx, h.dy, h.ox, h.oy);
  return buf;
}

void write_raw(const std::filesystem::path& path, const FieldHeader& h,
               const std::vector<double>& payload) {
  std::ofstream out(path, std::ios::binary);
  require(bool(out), ErrorKind::io, "cannot open " + path.string() + " for writing");
  const std::string head = format_header(h);
  out.write(head.data(), std::streamsize(head.size()));
  out.write(reinterpret_cast<const char*>(payload.data()),
            std::streamsize(payload.size() * sizeof(double)));
  require(bool(out), ErrorKind::io, "write failed for " + path.string());
}

FieldHeader parse_header(std::istream& in, const std::string& name) {
  std::string line;
  require(bool(std::getline(in, line)), ErrorKind::format, name + ": missing header");
  std::istringstream ss(line);
  std::string magic;
  std::string kind;
  FieldHeader h;
  ss >> magic >> kind >> h.nx >> h.ny >> h.dx >> h.dy >> h.ox >> h.oy;
  require(!ss.fail() && magic == "QPF1", ErrorKind::format, name + ": malformed QPF1 header");
  require(kind == "real" || kind == "complex", ErrorKind::format, name + ": unknown value kind");
  require(h.nx > 0 && h.ny > 0, ErrorKind::format, name + ": non-positive shape");
  h.complex = kind == "complex";
  return h;
}

std::vector<double> read_raw(const std::filesystem::path& path, FieldHeader& h) {
  std::ifstream in(path, std::ios::binary);
  require(bool(in), ErrorKind::io, "cannot open " + path.string());
  h = parse_header(in, path.string());
  const size_t count = size_t(h.nx) * size_t(h.ny) * (h.complex ? 2 : 1);
  std::vector<double> payload(count);
  in.read(reinterpret_cast<char*>(payload.data()), std::streamsize(count * sizeof(double)));
  require(size_t(in.gcount()) == count * sizeof(double), ErrorKind::format,
          path.string() + ": payload shorter than header shape");
  in.peek();
  require(in.eof(), ErrorKind::format, path.string() + ": trailing bytes after payload");
  return payload;
}

bool close(double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(a)); }

void check_grid(const FieldHeader& h, const Grid& g, const std::string& name) {
  require(h.nx == g.nx() && h.ny == g.ny(), ErrorKind::format, name + ": shape mismatch");
  require(close(h.dx, g.dx()) && close(h.dy, g.dy()) && close(h.ox, g.origin().x()) &&
              close(h.oy, g.origin().y()),
          ErrorKind::format, name + ": spacing or origin mismatch");
}

FieldHeader grid_header(const Grid& g, bool complex) {
  return {complex, g.nx(), g.ny(), g.dx(), g.dy(), g.origin().x(), g.origin().y()};
}

FieldHeader trace_header(const Grid& g, bool complex) {
  const int nb = g.boundary_size();
  return {complex, nb, 1, g.domain().perimeter() / std::max(nb, 1), 1.0, 0.0, 0.0};
}

}  // namespace

FieldHeader read_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(bool(in), ErrorKind::io, "cannot open " + path.string());
  return parse_header(in, path.string());
}

void write_field(const std::filesystem::path& path, const ScalarField& f) {
  std::vector<double> payload(f.nodes().data(), f.nodes().data() + f.nodes().size());
  for (int k = 0; k < f.grid()->size(); ++k)
    if (!f.grid()->is_interior(k)) payload[k] = std::numeric_limits<double>::quiet_NaN();
  write_raw(path, grid_header(*f.grid(), false), payload);
}

void write_field(const std::filesystem::path& path, const ComplexField& f) {
  const int n = f.grid()->size();
  std::vector<double> payload(2 * size_t(n), std::numeric_limits<double>::quiet_NaN());
  for (int k = 0; k < n; ++k) {
    if (!f.grid()->is_interior(k)) continue;
    payload[2 * k] = f[k].real();
    payload[2 * k + 1] = f[k].imag();
  }
  write_raw(path, grid_header(*f.grid(), true), payload);
}

ScalarField read_scalar_field(const std::filesystem::path& path, const GridPtr& grid) {
  FieldHeader h;
  const auto payload = read_raw(path, h);
  require(!h.complex, ErrorKind::format, path.string() + ": expected a real field");
  check_grid(h, *grid, path.string());
  ScalarField f(grid);
  for (int k = 0; k < grid->size(); ++k) f[k] = payload[k];
  return f;
}

ComplexField read_complex_field(const std::filesystem::path& path, const GridPtr& grid) {
  FieldHeader h;
  const auto payload = read_raw(path, h);
  require(h.complex, ErrorKind::format, path.string() + ": expected a complex field");
  check_grid(h, *grid, path.string());
  ComplexField f(grid);
  for (int k = 0; k < grid->size(); ++k) f[k] = complexd(payload[2 * k], payload[2 * k + 1]);
  return f;
}

void write_boundary_trace(const std::filesystem::path& path, const Grid& grid,
                          const Eigen::VectorXcd& values) {
  require(values.size() == grid.boundary_size(), ErrorKind::format, "trace length mismatch");
  std::vector<double> payload(2 * size_t(values.size()));
  for (Eigen::Index b = 0; b < values.size(); ++b) {
    payload[2 * b] = values[b].real();
    payload[2 * b + 1] = values[b].imag();
  }
  write_raw(path, trace_header(grid, true), payload);
}

void write_boundary_trace(const std::filesystem::path& path, const Grid& grid,
                          const Eigen::VectorXd& values) {
  require(values.size() == grid.boundary_size(), ErrorKind::format, "trace length mismatch");
  write_raw(path, trace_header(grid, false),
            std::vector<double>(values.data(), values.data() + values.size()));
}

Eigen::VectorXcd read_boundary_trace(const std::filesystem::path& path, const Grid& grid) {
  FieldHeader h;
  const auto payload = read_raw(path, h);
  require(h.complex, ErrorKind::format, path.string() + ": expected a complex trace");
  require(h.nx == grid.boundary_size() && h.ny == 1, ErrorKind::format,
          path.string() + ": trace length mismatch");
  Eigen::VectorXcd v(h.nx);
  for (int b = 0; b < h.nx; ++b) v[b] = complexd(payload[2 * b], payload[2 * b + 1]);
  return v;
}

Eigen::VectorXd read_real_boundary_trace(const std::filesystem::path& path, const Grid& grid) {
  FieldHeader h;
  const auto payload = read_raw(path, h);
  require(!h.complex, ErrorKind::format, path.string() + ": expected a real trace");
  require(h.nx == grid.boundary_size() && h.ny == 1, ErrorKind::format,
          path.string() + ": trace length mismatch");
  return Eigen::Map<const Eigen::VectorXd>(payload.data(), h.nx);
}

}  // namespace qpat
