#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "geoprec/matrix.hpp"
#include "geoprec/optimizer.hpp"
#include "geoprec/polysys.hpp"

namespace geoprec {

/// Matrix Market reader: coordinate or array; real, complex, integer, pattern;
/// general, symmetric, hermitian, skew-symmetric. Symmetric storage is
/// expanded, pattern entries become 1. Errors carry the 1-based line number.
ComplexMatrix read_matrix(const std::filesystem::path& path);
ComplexMatrix parse_matrix_market(std::istream& in);

/// Sparse matrices as coordinate, dense as array; the field is real when every
/// imaginary part is zero. Values use 17 significant digits.
void write_matrix(const std::filesystem::path& path, const ComplexMatrix& a);
void write_matrix_market(std::ostream& out, const ComplexMatrix& a);

struct PolysysFile {
  PolynomialSystem system;
  std::optional<Vector> point;
};

/// JSON document {nvars, degrees, polynomials: [[{exponents, coeff: [re, im]}]], point?}.
PolysysFile read_polysys(const std::filesystem::path& path);
PolysysFile parse_polysys(const std::string& text);
std::string serialize_polysys(const PolynomialSystem& f, const std::optional<Vector>& point = std::nullopt);

inline constexpr const char* kReportHeader = "iter,value,grad_norm,duality_bound,kF,kappa";

/// One row per iteration (empty duality_bound while the certificate is
/// inactive) and a final `#` summary row.
void write_report_csv(std::ostream& out, const OptimizationReport& report);

/// Shortest round-trip decimal form of x.
std::string format_number(double x);

}  // namespace geoprec
