#include "geoprec/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "geoprec/errors.hpp"
#include "json.hpp"

namespace geoprec {

namespace {

enum class Layout { kCoordinate, kArray };
enum class Field { kReal, kComplex, kInteger, kPattern };
enum class Symmetry { kGeneral, kSymmetric, kHermitian, kSkew };

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& why) {
  throw Error(ErrorCode::kParseError, "line " + std::to_string(line) + ": " + why, line);
}

struct Header {
  Layout layout;
  Field field;
  Symmetry symmetry;
};

Header parse_header(const std::string& text) {
  std::istringstream ss(text);
  std::string banner, object, layout, field, symmetry;
  if (!(ss >> banner >> object >> layout >> field >> symmetry) || banner != "%%MatrixMarket")
    parse_fail(1, "missing %%MatrixMarket banner");
  if (lower(object) != "matrix")
    throw Error(ErrorCode::kUnsupportedQualifier, "object " + object, 1);
  Header h{};
  layout = lower(layout);
  if (layout == "coordinate") h.layout = Layout::kCoordinate;
  else if (layout == "array") h.layout = Layout::kArray;
  else throw Error(ErrorCode::kUnsupportedQualifier, "format " + layout, 1);
  field = lower(field);
  if (field == "real" || field == "double") h.field = Field::kReal;
  else if (field == "complex") h.field = Field::kComplex;
  else if (field == "integer") h.field = Field::kInteger;
  else if (field == "pattern") h.field = Field::kPattern;
  else throw Error(ErrorCode::kUnsupportedQualifier, "field " + field, 1);
  symmetry = lower(symmetry);
  if (symmetry == "general") h.symmetry = Symmetry::kGeneral;
  else if (symmetry == "symmetric") h.symmetry = Symmetry::kSymmetric;
  else if (symmetry == "hermitian") h.symmetry = Symmetry::kHermitian;
  else if (symmetry == "skew-symmetric") h.symmetry = Symmetry::kSkew;
  else throw Error(ErrorCode::kUnsupportedQualifier, "symmetry " + symmetry, 1);
  if (h.layout == Layout::kArray && h.field == Field::kPattern)
    throw Error(ErrorCode::kUnsupportedQualifier, "pattern field with array format", 1);
  if (h.symmetry == Symmetry::kHermitian && h.field != Field::kComplex)
    throw Error(ErrorCode::kUnsupportedQualifier, "hermitian symmetry needs a complex field", 1);
  return h;
}

Complex read_value(std::istringstream& ss, Field field, std::size_t line) {
  if (field == Field::kPattern) return 1.0;
  double re = 0.0;
  double im = 0.0;
  if (!(ss >> re)) parse_fail(line, "missing value");
  if (field == Field::kComplex && !(ss >> im)) parse_fail(line, "missing imaginary part");
  std::string rest;
  if (ss >> rest) parse_fail(line, "trailing characters");
  return {re, im};
}

void push_with_symmetry(std::vector<Triplet>& out, Index i, Index j, Complex v, Symmetry sym,
                        std::size_t line) {
  if (sym != Symmetry::kGeneral && j > i) parse_fail(line, "entry above the diagonal in symmetric storage");
  if (sym == Symmetry::kSkew && i == j) parse_fail(line, "diagonal entry in skew-symmetric storage");
  out.push_back({i, j, v});
  if (i == j || sym == Symmetry::kGeneral) return;
  const Complex mirror = sym == Symmetry::kSymmetric ? v : sym == Symmetry::kSkew ? -v : std::conj(v);
  out.push_back({j, i, mirror});
}

}  // namespace

ComplexMatrix parse_matrix_market(std::istream& in) {
  std::string text;
  std::size_t line = 0;
  if (!std::getline(in, text)) parse_fail(1, "empty input");
  ++line;
  const Header h = parse_header(text);

  auto next_data_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++line;
      const auto first = out.find_first_not_of(" \t\r");
      if (first == std::string::npos || out[first] == '%') continue;
      return true;
    }
    return false;
  };

  if (!next_data_line(text)) parse_fail(line + 1, "missing size line");
  std::istringstream size_line(text);
  long long rows = 0, cols = 0, nnz = 0;
  if (!(size_line >> rows >> cols) || rows < 0 || cols < 0) parse_fail(line, "bad size line");
  if (h.layout == Layout::kCoordinate && (!(size_line >> nnz) || nnz < 0)) parse_fail(line, "bad size line");
  if (h.symmetry != Symmetry::kGeneral && rows != cols) parse_fail(line, "symmetric storage needs a square matrix");

  std::vector<Triplet> entries;
  if (h.layout == Layout::kCoordinate) {
    entries.reserve(static_cast<std::size_t>(nnz) * (h.symmetry == Symmetry::kGeneral ? 1 : 2));
    for (long long k = 0; k < nnz; ++k) {
      if (!next_data_line(text)) parse_fail(line + 1, "fewer entries than declared");
      std::istringstream ss(text);
      long long i = 0, j = 0;
      if (!(ss >> i >> j)) parse_fail(line, "bad coordinate");
      if (i < 1 || i > rows || j < 1 || j > cols) parse_fail(line, "index out of range");
      push_with_symmetry(entries, i - 1, j - 1, read_value(ss, h.field, line), h.symmetry, line);
    }
    if (next_data_line(text)) parse_fail(line, "more entries than declared");
    return ComplexMatrix::sparse(rows, cols, std::move(entries));
  }

  DenseMatrix dense = DenseMatrix::Zero(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    const Index start = h.symmetry == Symmetry::kGeneral ? 0 : h.symmetry == Symmetry::kSkew ? j + 1 : j;
    for (Index i = start; i < rows; ++i) {
      if (!next_data_line(text)) parse_fail(line + 1, "fewer entries than declared");
      std::istringstream ss(text);
      const Complex v = read_value(ss, h.field, line);
      dense(i, j) = v;
      if (i == j || h.symmetry == Symmetry::kGeneral) continue;
      dense(j, i) = h.symmetry == Symmetry::kSymmetric ? v : h.symmetry == Symmetry::kSkew ? -v : std::conj(v);
    }
  }
  if (next_data_line(text)) parse_fail(line, "more entries than declared");
  return ComplexMatrix(std::move(dense));
}

ComplexMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open " + path.string());
  return parse_matrix_market(in);
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_matrix_market(std::ostream& out, const ComplexMatrix& a) {
  const auto entries = a.triplets();
  const bool complex = std::any_of(entries.begin(), entries.end(),
                                   [](const Triplet& t) { return t.value.imag() != 0.0; });
  auto value = [complex](Complex v) {
    return complex ? format_number(v.real()) + " " + format_number(v.imag()) : format_number(v.real());
  };
  const char* field = complex ? "complex" : "real";
  if (a.is_sparse()) {
    out << "%%MatrixMarket matrix coordinate " << field << " general\n";
    out << a.rows() << " " << a.cols() << " " << entries.size() << "\n";
    for (const auto& t : entries) out << t.row + 1 << " " << t.col + 1 << " " << value(t.value) << "\n";
    return;
  }
  const DenseMatrix dense = a.to_dense();
  out << "%%MatrixMarket matrix array " << field << " general\n";
  out << a.rows() << " " << a.cols() << "\n";
  for (Index j = 0; j < dense.cols(); ++j)
    for (Index i = 0; i < dense.rows(); ++i) out << value(dense(i, j)) << "\n";
}

void write_matrix(const std::filesystem::path& path, const ComplexMatrix& a) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path.string());
  write_matrix_market(out, a);
}

PolysysFile parse_polysys(const std::string& text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what(), e.byte);
  }
  try {
    const auto nvars = doc.at("nvars").get<long long>();
    if (nvars < 1) throw Error(ErrorCode::kParseError, "nvars must be positive");
    const auto degrees = doc.at("degrees").get<std::vector<int>>();
    const auto& polys = doc.at("polynomials");
    if (!polys.is_array() || polys.empty()) throw Error(ErrorCode::kParseError, "empty polynomial list");
    if (polys.size() != degrees.size())
      throw Error(ErrorCode::kParseError, "degrees and polynomials differ in length");

    std::vector<Polynomial> out;
    for (std::size_t i = 0; i < polys.size(); ++i) {
      Polynomial p(nvars);
      const auto& terms = polys[i];
      if (!terms.is_array()) throw Error(ErrorCode::kParseError, "polynomial must be a list of terms", i);
      for (std::size_t k = 0; k < terms.size(); ++k) {
        const auto alpha = terms[k].at("exponents").get<Exponent>();
        const auto coeff = terms[k].at("coeff").get<std::vector<double>>();
        if (static_cast<long long>(alpha.size()) != nvars)
          throw Error(ErrorCode::kParseError, "exponent length differs from nvars", i);
        if (std::any_of(alpha.begin(), alpha.end(), [](int e) { return e < 0; }))
          throw Error(ErrorCode::kParseError, "negative exponent", i);
        if (coeff.size() != 2) throw Error(ErrorCode::kParseError, "coeff must be [re, im]", i);
        if (total_degree(alpha) > degrees[i])
          throw Error(ErrorCode::kDegreeViolation,
                      "polynomial " + std::to_string(i) + " term " + std::to_string(k) + " exceeds degree", i);
        p.add_term(alpha, {coeff[0], coeff[1]});
      }
      out.push_back(std::move(p));
    }
    PolysysFile file{PolynomialSystem(nvars, std::move(out), degrees), std::nullopt};
    if (doc.contains("point")) {
      const auto pts = doc.at("point").get<std::vector<std::vector<double>>>();
      if (static_cast<long long>(pts.size()) != nvars)
        throw Error(ErrorCode::kParseError, "point length differs from nvars");
      Vector xi(nvars);
      for (std::size_t k = 0; k < pts.size(); ++k) {
        if (pts[k].size() != 2) throw Error(ErrorCode::kParseError, "point entries must be [re, im]", k);
        xi(static_cast<Index>(k)) = {pts[k][0], pts[k][1]};
      }
      file.point = xi;
    }
    return file;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

PolysysFile read_polysys(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_polysys(buf.str());
}

std::string serialize_polysys(const PolynomialSystem& f, const std::optional<Vector>& point) {
  using nlohmann::json;
  json doc;
  doc["nvars"] = f.nvars();
  doc["degrees"] = f.degrees();
  json polys = json::array();
  for (const auto& p : f.polynomials()) {
    json terms = json::array();
    for (const auto& [alpha, c] : p.terms())
      terms.push_back({{"exponents", alpha}, {"coeff", {c.real(), c.imag()}}});
    polys.push_back(std::move(terms));
  }
  doc["polynomials"] = std::move(polys);
  if (point) {
    json pts = json::array();
    for (Index k = 0; k < point->size(); ++k) pts.push_back({(*point)(k).real(), (*point)(k).imag()});
    doc["point"] = std::move(pts);
  }
  return doc.dump(2) + "\n";
}

void write_report_csv(std::ostream& out, const OptimizationReport& report) {
  out << kReportHeader << "\n";
  for (const auto& r : report.iterations) {
    out << r.iter << "," << format_number(r.value) << "," << format_number(r.grad_norm) << ","
        << (r.duality_bound ? format_number(*r.duality_bound) : "") << "," << format_number(r.kF) << ","
        << format_number(r.kappa) << "\n";
  }
  out << "# termination=" << to_string(report.termination)
      << ",initial_kF=" << format_number(report.initial_kF) << ",final_kF=" << format_number(report.final_kF)
      << ",initial_kappa=" << format_number(report.initial_kappa)
      << ",final_kappa=" << format_number(report.final_kappa)
      << ",certificate=" << (report.certificate ? format_number(*report.certificate) : "none") << "\n";
}

}  // namespace geoprec
