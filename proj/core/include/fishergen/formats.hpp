#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "fishergen/array.hpp"
#include "fishergen/clustering.hpp"
#include "fishergen/eval.hpp"

namespace fishergen {

/// Header `index,label,mu_0..mu_{L-1}` followed, when eigenpairs are present,
/// by `eig_0..eig_{L-1}` and `vec_i_j` (component j of eigenvector i).
/// Numbers use 17 significant digits.
std::string latent_csv(const std::vector<LatentRecord>& records);
void write_latent_csv(const std::filesystem::path& path, const std::vector<LatentRecord>& records);
/// Reads what latent_csv writes; eigen columns are optional.
std::vector<LatentRecord> read_latent_csv(const std::filesystem::path& path);
std::vector<LatentRecord> parse_latent_csv(const std::string& text);

/// Rows `index,n_sigma,point,x,y`, one per ellipse vertex, for the 1σ and
/// 2σ ellipses of every record.
void write_ellipse_csv(const std::filesystem::path& path, const std::vector<LatentRecord>& records,
                       std::size_t points = 64);

/// Binary greyscale "P5\n<cols> <rows>\n255\n" + rows·cols bytes. Pixels are
/// clamped to [0, 1] and rounded to the nearest of 0..255.
std::vector<unsigned char> encode_pgm(std::span<const double> pixels, std::size_t rows,
                                      std::size_t cols);
void write_pgm(const std::filesystem::path& path, std::span<const double> pixels,
               std::size_t rows, std::size_t cols);

/// Header `class,cluster_<c>...` in permuted column order, one row per class.
void write_cluster_csv(const std::filesystem::path& path, const ClusterMatrix& matrix);

/// Write rows of `data` as plain CSV (no header).
void write_matrix_csv(const std::filesystem::path& path, const DenseArray& data);
DenseArray read_matrix_csv(const std::filesystem::path& path);

}  // namespace fishergen
