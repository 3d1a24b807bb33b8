#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "gpe2d/model.hpp"

namespace gpe2d::io {

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double v);

/// Coefficient file: header
///   gpe2d-coeffs v1 L1=<int> L2=<int> beta1=<f> beta2=<f> N=<f>
/// followed by L1*L2 lines "l1 l2 value" in row-major (l1, l2) order.
void write_coefficients(std::ostream& out, const CoefficientField& field);
void write_coefficients(const std::filesystem::path& path, const CoefficientField& field);

/// Reads a coefficient file. When `basis` is given it must match the file's
/// header and is shared by the returned field; otherwise a basis is built.
CoefficientField read_coefficients(std::istream& in, BasisPtr basis = nullptr);
CoefficientField read_coefficients(const std::filesystem::path& path, BasisPtr basis = nullptr);

/// A lattice of values read back from a grid file.
struct GridData {
  Grid2D grid;
  int component = 1;
  Matrix values;  // ny x nx
};

/// Grid file: header
///   gpe2d-grid v1 nx=<int> ny=<int> x0=<f> x1=<f> y0=<f> y1=<f> component=<int>
/// followed by ny rows of nx space-separated values (row = fixed y, ascending x).
void write_grid(std::ostream& out, const Grid2D& grid, int component, const Matrix& values);
void write_grid(const std::filesystem::path& path, const Grid2D& grid, int component, const Matrix& values);
GridData read_grid(std::istream& in);
GridData read_grid(const std::filesystem::path& path);

std::string report_to_json(const StateReport& report);
StateReport report_from_json(const std::string& text);

}  // namespace gpe2d::io
