#include "mkvnet/network.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace mkvnet {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

SparseMatrix SparseMatrix::from_dense(std::size_t rows, std::size_t cols,
                                      std::span<const double> row_major) {
  if (row_major.size() != rows * cols) {
    throw std::invalid_argument("from_dense: value count does not match shape");
  }
  Builder b(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = row_major[r * cols + c];
      if (v != 0.0) b.add(r, c, v);
    }
  }
  return std::move(b).finish();
}

SparseMatrix SparseMatrix::identity(std::size_t n, double scale) {
  Builder b(n, n);
  for (std::size_t i = 0; i < n; ++i) b.add(i, i, scale);
  return std::move(b).finish();
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  if (r >= rows_ || c >= cols_) throw std::out_of_range("SparseMatrix::at");
  const auto cols = row_columns(r);
  const auto it = std::lower_bound(cols.begin(), cols.end(), static_cast<std::uint32_t>(c));
  if (it == cols.end() || *it != c) return 0.0;
  return values_[row_ptr_[r] + static_cast<std::size_t>(it - cols.begin())];
}

void SparseMatrix::multiply_add(std::span<const double> x, std::span<double> y) const {
  if (x.size() != cols_ || y.size() != rows_) {
    throw std::invalid_argument("multiply_add: dimension mismatch");
  }
  for (std::size_t r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      acc += values_[k] * x[col_idx_[k]];
    }
    y[r] += acc;
  }
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(rows_, 0.0);
  multiply_add(x, y);
  return y;
}

SparseMatrix SparseMatrix::scaled(double s) const {
  SparseMatrix out = *this;
  for (double& v : out.values_) v *= s;
  return out;
}

std::vector<double> SparseMatrix::to_dense() const {
  std::vector<double> out(rows_ * cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      out[r * cols_ + col_idx_[k]] = values_[k];
    }
  }
  return out;
}

std::span<const std::uint32_t> SparseMatrix::row_columns(std::size_t r) const {
  return {col_idx_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
}

std::span<const double> SparseMatrix::row_values(std::size_t r) const {
  return {values_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
}

bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.row_ptr_ == b.row_ptr_ &&
         a.col_idx_ == b.col_idx_ && a.values_ == b.values_;
}

SparseMatrix::Builder::Builder(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
  if (cols > std::numeric_limits<std::uint32_t>::max()) {
    throw std::length_error("SparseMatrix: column count exceeds 32-bit index range");
  }
}

SparseMatrix::Builder& SparseMatrix::Builder::add(std::size_t r, std::size_t c, double v) {
  if (r >= rows_ || c >= cols_) throw std::out_of_range("SparseMatrix::Builder::add");
  entries_.push_back({r, {static_cast<std::uint32_t>(c), v}});
  return *this;
}

SparseMatrix::Builder& SparseMatrix::Builder::add_block(std::size_t row_offset,
                                                        std::size_t col_offset,
                                                        const SparseMatrix& block,
                                                        double scale) {
  if (row_offset + block.rows() > rows_ || col_offset + block.cols() > cols_) {
    throw std::out_of_range("SparseMatrix::Builder::add_block: block exceeds target");
  }
  entries_.reserve(entries_.size() + block.nnz());
  for (std::size_t r = 0; r < block.rows(); ++r) {
    const auto cols = block.row_columns(r);
    const auto vals = block.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      entries_.push_back(
          {row_offset + r, {static_cast<std::uint32_t>(col_offset + cols[k]), scale * vals[k]}});
    }
  }
  return *this;
}

SparseMatrix SparseMatrix::Builder::finish() && {
  std::stable_sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : a.second.first < b.second.first;
  });
  SparseMatrix m(rows_, cols_);
  m.col_idx_.reserve(entries_.size());
  m.values_.reserve(entries_.size());
  std::size_t i = 0;
  for (std::size_t r = 0; r < rows_; ++r) {
    while (i < entries_.size() && entries_[i].first == r) {
      const std::uint32_t c = entries_[i].second.first;
      double v = 0.0;
      while (i < entries_.size() && entries_[i].first == r && entries_[i].second.first == c) {
        v += entries_[i].second.second;
        ++i;
      }
      m.col_idx_.push_back(c);
      m.values_.push_back(v);
    }
    m.row_ptr_[r + 1] = m.values_.size();
  }
  return m;
}

SparseMatrix vstack(std::span<const SparseMatrix* const> blocks) {
  if (blocks.empty()) throw std::invalid_argument("vstack: no blocks");
  const std::size_t cols = blocks.front()->cols();
  std::size_t rows = 0;
  for (const auto* b : blocks) {
    if (b->cols() != cols) throw std::invalid_argument("vstack: column mismatch");
    rows += b->rows();
  }
  SparseMatrix::Builder out(rows, cols);
  std::size_t offset = 0;
  for (const auto* b : blocks) {
    out.add_block(offset, 0, *b);
    offset += b->rows();
  }
  return std::move(out).finish();
}

SparseMatrix hstack(std::span<const SparseMatrix* const> blocks, std::span<const double> scales) {
  if (blocks.empty()) throw std::invalid_argument("hstack: no blocks");
  if (scales.size() != blocks.size()) throw std::invalid_argument("hstack: scale count");
  const std::size_t rows = blocks.front()->rows();
  std::size_t cols = 0;
  for (const auto* b : blocks) {
    if (b->rows() != rows) throw std::invalid_argument("hstack: row mismatch");
    cols += b->cols();
  }
  SparseMatrix::Builder out(rows, cols);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    out.add_block(0, offset, *blocks[i], scales[i]);
    offset += blocks[i]->cols();
  }
  return std::move(out).finish();
}

SparseMatrix block_diag(std::span<const SparseMatrix* const> blocks) {
  if (blocks.empty()) throw std::invalid_argument("block_diag: no blocks");
  std::size_t rows = 0;
  std::size_t cols = 0;
  for (const auto* b : blocks) {
    rows += b->rows();
    cols += b->cols();
  }
  SparseMatrix::Builder out(rows, cols);
  std::size_t r0 = 0;
  std::size_t c0 = 0;
  for (const auto* b : blocks) {
    out.add_block(r0, c0, *b);
    r0 += b->rows();
    c0 += b->cols();
  }
  return std::move(out).finish();
}

DimVector::DimVector(std::vector<std::size_t> widths) : widths_(std::move(widths)) {
  if (widths_.size() < 3) throw std::invalid_argument("DimVector: length must be >= 3");
  for (std::size_t w : widths_) {
    if (w == 0) throw std::invalid_argument("DimVector: widths must be positive");
  }
}

std::ostream& operator<<(std::ostream& os, const DimVector& v) {
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os << ')';
}

NeuralNetwork::NeuralNetwork(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.size() < 2) {
    throw std::invalid_argument("NeuralNetwork: need at least two layers (one hidden layer)");
  }
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& l = layers_[i];
    if (l.weights.rows() == 0 || l.weights.cols() == 0) {
      throw std::invalid_argument("NeuralNetwork: empty weight matrix");
    }
    if (l.bias.size() != l.weights.rows()) {
      throw std::invalid_argument("NeuralNetwork: bias length differs from weight rows");
    }
    if (i > 0 && l.weights.cols() != layers_[i - 1].weights.rows()) {
      throw std::invalid_argument("NeuralNetwork: consecutive layer shapes do not chain");
    }
  }
}

std::size_t NeuralNetwork::nnz() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weights.nnz() + l.bias.size();
  return n;
}

std::vector<double> relu(std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  for (double& v : y) v = std::max(v, 0.0);
  return y;
}

std::vector<double> realize(const NeuralNetwork& net, std::span<const double> x) {
  if (x.size() != net.input_width()) {
    throw std::invalid_argument("realize: input length " + std::to_string(x.size()) +
                                " does not match input width " +
                                std::to_string(net.input_width()));
  }
  std::vector<double> cur(x.begin(), x.end());
  std::vector<double> next;
  const auto& layers = net.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    next = layers[i].bias;
    layers[i].weights.multiply_add(cur, next);
    if (i + 1 < layers.size()) {
      for (double& v : next) v = std::max(v, 0.0);
    }
    cur.swap(next);
  }
  return cur;
}

std::uint64_t param_count(const DimVector& d) {
  std::uint64_t p = 0;
  for (std::size_t n = 1; n < d.size(); ++n) p += d[n] * (d[n - 1] + 1);
  return p;
}

std::uint64_t param_count(const NeuralNetwork& net) { return param_count(dims(net)); }

DimVector dims(const NeuralNetwork& net) {
  std::vector<std::size_t> w;
  w.reserve(net.layer_count() + 1);
  w.push_back(net.input_width());
  for (const auto& l : net.layers()) w.push_back(l.weights.rows());
  return DimVector(std::move(w));
}

std::size_t dim_supnorm(const DimVector& v) {
  return *std::max_element(v.widths().begin(), v.widths().end());
}

namespace {

void write_number(std::ostream& os, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  os.write(buf, res.ptr - buf);
}

std::vector<double> parse_line(const std::string& line) {
  std::vector<double> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) {
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      throw std::runtime_error("read_text: bad number '" + tok + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::string next_line(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("read_text: unexpected end of input");
  return line;
}

}  // namespace

void write_text(std::ostream& os, const NeuralNetwork& net) {
  const DimVector d = dims(net);
  for (std::size_t i = 0; i < d.size(); ++i) os << (i ? " " : "") << d[i];
  os << '\n';
  for (const auto& layer : net.layers()) {
    for (std::size_t r = 0; r < layer.weights.rows(); ++r) {
      for (std::size_t c = 0; c < layer.weights.cols(); ++c) {
        if (c) os << ' ';
        write_number(os, layer.weights.at(r, c));
      }
      os << '\n';
    }
    for (std::size_t r = 0; r < layer.bias.size(); ++r) {
      if (r) os << ' ';
      write_number(os, layer.bias[r]);
    }
    os << '\n';
  }
}

NeuralNetwork read_text(std::istream& is) {
  std::vector<std::size_t> widths;
  {
    std::istringstream ss(next_line(is));
    std::size_t w = 0;
    while (ss >> w) widths.push_back(w);
  }
  const DimVector d(widths);
  std::vector<Layer> layers;
  for (std::size_t n = 1; n < d.size(); ++n) {
    std::vector<double> dense;
    dense.reserve(d[n] * d[n - 1]);
    for (std::size_t r = 0; r < d[n]; ++r) {
      const auto row = parse_line(next_line(is));
      if (row.size() != d[n - 1]) throw std::runtime_error("read_text: weight row length");
      dense.insert(dense.end(), row.begin(), row.end());
    }
    auto bias = parse_line(next_line(is));
    if (bias.size() != d[n]) throw std::runtime_error("read_text: bias length");
    layers.push_back({SparseMatrix::from_dense(d[n], d[n - 1], dense), std::move(bias)});
  }
  return NeuralNetwork(std::move(layers));
}

}  // namespace mkvnet
