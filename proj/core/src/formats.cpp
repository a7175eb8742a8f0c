#include "fishergen/formats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fishergen/errors.hpp"

namespace fishergen {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) {
    if (!cur.empty() && cur.back() == '\r') cur.pop_back();
    out.push_back(cur);
  }
  return out;
}

double to_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw FormatError("CSV line " + std::to_string(line) + ": '" + s + "' is not a number");
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw FormatError("write failed for '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string latent_csv(const std::vector<LatentRecord>& records) {
  std::ostringstream out;
  const std::size_t L = records.empty() ? 0 : records.front().mu.size();
  const bool eig = !records.empty() && records.front().eigvals.has_value();
  out << "index,label";
  for (std::size_t j = 0; j < L; ++j) out << ",mu_" << j;
  if (eig) {
    for (std::size_t j = 0; j < L; ++j) out << ",eig_" << j;
    for (std::size_t i = 0; i < L; ++i) {
      for (std::size_t j = 0; j < L; ++j) out << ",vec_" << i << "_" << j;
    }
  }
  out << "\n";
  for (const auto& r : records) {
    out << r.index << "," << r.label;
    for (double m : r.mu) out << "," << num(m);
    if (eig) {
      for (double e : *r.eigvals) out << "," << num(e);
      for (double v : r.eigvecs->values()) out << "," << num(v);
    }
    out << "\n";
  }
  return out.str();
}

void write_latent_csv(const std::filesystem::path& path, const std::vector<LatentRecord>& records) {
  write_text(path, latent_csv(records));
}

std::vector<LatentRecord> parse_latent_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("latent CSV: empty file");
  const auto header = split(line, ',');
  if (header.size() < 3 || header[0] != "index" || header[1] != "label") {
    throw FormatError("latent CSV: header must start with index,label,mu_0");
  }
  std::size_t L = 0;
  while (2 + L < header.size() && header[2 + L].rfind("mu_", 0) == 0) ++L;
  if (L == 0) throw FormatError("latent CSV: no mu_ columns");
  const bool eig = header.size() == 2 + L + L + L * L;
  if (!eig && header.size() != 2 + L) throw FormatError("latent CSV: unexpected column layout");

  std::vector<LatentRecord> records;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) {
      throw FormatError("latent CSV line " + std::to_string(lineno) + ": wrong column count");
    }
    LatentRecord r;
    r.index = static_cast<std::size_t>(to_double(cells[0], lineno));
    r.label = static_cast<int>(to_double(cells[1], lineno));
    for (std::size_t j = 0; j < L; ++j) r.mu.push_back(to_double(cells[2 + j], lineno));
    if (eig) {
      std::vector<double> vals;
      for (std::size_t j = 0; j < L; ++j) vals.push_back(to_double(cells[2 + L + j], lineno));
      DenseArray vecs({L, L});
      for (std::size_t j = 0; j < L * L; ++j) vecs[j] = to_double(cells[2 + 2 * L + j], lineno);
      r.eigvals = std::move(vals);
      r.eigvecs = std::move(vecs);
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<LatentRecord> read_latent_csv(const std::filesystem::path& path) {
  return parse_latent_csv(read_text(path));
}

void write_ellipse_csv(const std::filesystem::path& path, const std::vector<LatentRecord>& records,
                       std::size_t points) {
  std::ostringstream out;
  out << "index,n_sigma,point,x,y\n";
  for (const auto& r : records) {
    for (double n_sigma : {1.0, 2.0}) {
      const auto poly = uncertainty_ellipse(r, n_sigma, points);
      for (std::size_t t = 0; t < poly.size(); ++t) {
        out << r.index << "," << n_sigma << "," << t << "," << num(poly[t][0]) << ","
            << num(poly[t][1]) << "\n";
      }
    }
  }
  write_text(path, out.str());
}

std::vector<unsigned char> encode_pgm(std::span<const double> pixels, std::size_t rows,
                                      std::size_t cols) {
  if (pixels.size() != rows * cols) throw ShapeError("encode_pgm: pixel count differs from rows*cols");
  const std::string header = "P5\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n255\n";
  std::vector<unsigned char> out(header.begin(), header.end());
  out.reserve(header.size() + pixels.size());
  for (double x : pixels) {
    out.push_back(static_cast<unsigned char>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0)));
  }
  return out;
}

void write_pgm(const std::filesystem::path& path, std::span<const double> pixels,
               std::size_t rows, std::size_t cols) {
  const auto bytes = encode_pgm(pixels, rows, cols);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_cluster_csv(const std::filesystem::path& path, const ClusterMatrix& matrix) {
  std::ostringstream out;
  out << "class";
  for (std::size_t c : matrix.column_order) out << ",cluster_" << c;
  out << "\n";
  for (std::size_t i = 0; i < matrix.fractions.rows(); ++i) {
    out << i;
    for (std::size_t j = 0; j < matrix.fractions.cols(); ++j) out << "," << num(matrix.fractions(i, j));
    out << "\n";
  }
  write_text(path, out.str());
}

void write_matrix_csv(const std::filesystem::path& path, const DenseArray& data) {
  std::ostringstream out;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    auto row = data.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << num(row[j]);
    out << "\n";
  }
  write_text(path, out.str());
}

DenseArray read_matrix_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (rows == 0) cols = cells.size();
    if (cells.size() != cols) throw FormatError("matrix CSV: ragged rows");
    for (const auto& c : cells) values.push_back(to_double(c, rows + 1));
    ++rows;
  }
  return DenseArray({rows, cols}, std::move(values));
}

}  // namespace fishergen
