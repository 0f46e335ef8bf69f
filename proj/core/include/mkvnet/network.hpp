#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace mkvnet {

/// Compressed sparse row matrix.
///
/// The networks produced by the calculus in calculus.hpp are block structured
/// (stacked, block-diagonal, [I | -I] splices), so only nonzero blocks are
/// stored. Semantically this is an ordinary dense rows x cols real matrix:
/// `at()` returns 0 for every entry not stored, and parameter counts are
/// always computed from the dense shape.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  /// All-zero matrix of the given shape.
  SparseMatrix(std::size_t rows, std::size_t cols);

  static SparseMatrix from_dense(std::size_t rows, std::size_t cols,
                                 std::span<const double> row_major);
  static SparseMatrix identity(std::size_t n, double scale = 1.0);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  double at(std::size_t r, std::size_t c) const;

  /// y += A x
  void multiply_add(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;

  SparseMatrix scaled(double s) const;
  std::vector<double> to_dense() const;

  /// Row r as (column, value) ranges.
  std::span<const std::uint32_t> row_columns(std::size_t r) const;
  std::span<const double> row_values(std::size_t r) const;

  friend bool operator==(const SparseMatrix& a, const SparseMatrix& b);

  /// Accumulates blocks at offsets; duplicates are summed on finish().
  class Builder {
   public:
    Builder(std::size_t rows, std::size_t cols);
    Builder& add(std::size_t r, std::size_t c, double v);
    Builder& add_block(std::size_t row_offset, std::size_t col_offset,
                       const SparseMatrix& block, double scale = 1.0);
    SparseMatrix finish() &&;

   private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<std::pair<std::size_t, std::pair<std::uint32_t, double>>> entries_;
  };

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> col_idx_;
  std::vector<double> values_;
};

/// Vertical concatenation; all blocks must share a column count.
SparseMatrix vstack(std::span<const SparseMatrix* const> blocks);
/// Horizontal concatenation with a per-block scale factor.
SparseMatrix hstack(std::span<const SparseMatrix* const> blocks,
                    std::span<const double> scales);
SparseMatrix block_diag(std::span<const SparseMatrix* const> blocks);

/// One affine layer x -> W x + B.
struct Layer {
  SparseMatrix weights;
  std::vector<double> bias;

  friend bool operator==(const Layer&, const Layer&) = default;
};

/// Layer widths (k_0, k_1, ..., k_{H+1}) of a network. Length >= 3, entries >= 1.
class DimVector {
 public:
  explicit DimVector(std::vector<std::size_t> widths);

  std::size_t size() const { return widths_.size(); }
  std::size_t operator[](std::size_t i) const { return widths_[i]; }
  std::size_t front() const { return widths_.front(); }
  std::size_t back() const { return widths_.back(); }
  const std::vector<std::size_t>& widths() const { return widths_; }

  friend bool operator==(const DimVector&, const DimVector&) = default;

 private:
  std::vector<std::size_t> widths_;
};

std::ostream& operator<<(std::ostream& os, const DimVector& v);

/// ReLU feed-forward network ((W_1,B_1),...,(W_{H+1},B_{H+1})), H >= 1.
///
/// Immutable after construction; every constructor path validates the layer
/// shapes, so a NeuralNetwork value is always well formed.
class NeuralNetwork {
 public:
  explicit NeuralNetwork(std::vector<Layer> layers);

  const std::vector<Layer>& layers() const { return layers_; }
  std::size_t layer_count() const { return layers_.size(); }
  std::size_t input_width() const { return layers_.front().weights.cols(); }
  std::size_t output_width() const { return layers_.back().weights.rows(); }
  std::size_t nnz() const;

  friend bool operator==(const NeuralNetwork&, const NeuralNetwork&) = default;

 private:
  std::vector<Layer> layers_;
};

std::vector<double> relu(std::span<const double> x);

/// Forward pass: ReLU after every layer except the last.
std::vector<double> realize(const NeuralNetwork& net, std::span<const double> x);

std::uint64_t param_count(const NeuralNetwork& net);
std::uint64_t param_count(const DimVector& dims);
DimVector dims(const NeuralNetwork& net);
std::size_t dim_supnorm(const DimVector& v);

/// Plain-text dump: a line with the dims, then for every layer the rows of W
/// followed by B, one vector per line, values separated by single spaces.
void write_text(std::ostream& os, const NeuralNetwork& net);
NeuralNetwork read_text(std::istream& is);

}  // namespace mkvnet
