#pragma once

#include <cmath>
#include <filesystem>
#include <string>

#include <doctest.h>

#include "qpat/errors.hpp"

namespace qpat::test {

/// Fresh scratch directory under the system temp path.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("qpat_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Runs `fn` and returns the kind of the qpat::Error it raises.
template <typename Fn>
ErrorKind raised(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no qpat::Error raised");
  return ErrorKind::config;
}

/// Observed order from errors at two resolutions with spacing ratio 2.
inline double order(double coarse, double fine) { return std::log2(coarse / fine); }

}  // namespace qpat::test
