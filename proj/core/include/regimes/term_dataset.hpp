#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace regimes {

// N observations of D equation-term values, with per-observation domain
// weights (discrete differentials of the observed domain, e.g. cell areas)
// and optional sample-space coordinates kept for reporting.
struct TermDataset {
  Eigen::MatrixXd terms;                      // N x D
  Eigen::VectorXd weights;                    // N, all >= 0, sum > 0
  Eigen::MatrixXd coords;                     // N x C, C may be 0
  std::vector<std::string> term_names;        // D
  std::vector<std::uint8_t> degenerate_mask;  // N, 1 where every term is exactly zero

  Eigen::Index n_samples() const { return terms.rows(); }
  Eigen::Index n_terms() const { return terms.cols(); }
};

// Validates invariants (N >= 1, D >= 2, finite terms, non-negative weights
// with positive sum), fills defaults (uniform unit weights, names e1..eD),
// and computes the degenerate mask.
TermDataset make_dataset(Eigen::MatrixXd terms,
                         Eigen::VectorXd weights = Eigen::VectorXd(),
                         Eigen::MatrixXd coords = Eigen::MatrixXd(),
                         std::vector<std::string> term_names = {});

// On-disk representations.
//
// delimited_text: UTF-8, comma separated, one observation per row. An
// optional first line "#fields: a,b,c,..." names the columns; the reserved
// names weight, x, y, t select the weight/coordinate columns and every other
// column is an equation term, in declaration order. Without a header every
// column is a term. Values round-trip bit-exactly (written with 17
// significant digits).
//
// binary_grid: magic "RGSC", then little-endian u32 version (=1), N, D, C,
// followed by row-major little-endian IEEE-754 doubles: terms (N x D),
// weights (N), coords (N x C).
enum class DatasetFormat { delimited_text, binary_grid };

TermDataset load_dataset(const std::string& path, DatasetFormat format);
TermDataset load_dataset(const std::string& path);  // sniffs the binary magic
void write_dataset(const TermDataset& ds, const std::string& path, DatasetFormat format);

// Cell areas for samples lying on a tensor-product rectilinear grid
// (detected from the unique sorted axis values; throws validation_error
// otherwise). Cell edges sit midway between adjacent axis values and the
// outer edges mirror the first/last spacing, so a uniform cell-centered grid
// on [0,1]^2 yields equal weights that sum to 1.
Eigen::VectorXd compute_area_weights(const Eigen::MatrixXd& coords);

// Per-column z-scores, population standard-deviation convention (divide by
// N). Constant columns map to all-zero columns (std substituted by 1).
struct StandardizedView {
  Eigen::MatrixXd z;      // N x D
  Eigen::VectorXd means;  // D
  Eigen::VectorXd stds;   // D
};

StandardizedView standardize(const TermDataset& ds);
StandardizedView standardize_matrix(const Eigen::MatrixXd& values);

}  // namespace regimes
