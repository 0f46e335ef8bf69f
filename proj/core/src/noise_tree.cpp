#include "mkvnet/noise_tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mkvnet/random.hpp"

namespace mkvnet {

namespace {

constexpr std::uint64_t kPurposeUniform = 0;
constexpr std::uint64_t kPurposeBrownian = 1;
constexpr std::uint64_t kMaxFineSteps = std::uint64_t{1} << 26;

CounterStream stream_for(std::uint64_t seed, std::uint64_t purpose, const ThetaIndex& theta) {
  const std::uint64_t base = splitmix64(seed ^ splitmix64(purpose + 0x5851F42D4C957F2Dull));
  return CounterStream(theta.hash(base), theta.hash(~base));
}

}  // namespace

ThetaIndex::ThetaIndex(std::vector<std::uint32_t> path) : path_(std::move(path)) {
  if (path_.empty()) throw std::invalid_argument("ThetaIndex: path must be nonempty");
}

ThetaIndex::ThetaIndex(std::initializer_list<std::uint32_t> path)
    : ThetaIndex(std::vector<std::uint32_t>(path)) {}

ThetaIndex ThetaIndex::child(std::uint32_t n, std::uint32_t k, std::uint32_t l) const {
  std::vector<std::uint32_t> p = path_;
  p.push_back(n);
  p.push_back(k);
  p.push_back(l);
  return ThetaIndex(std::move(p));
}

std::uint64_t ThetaIndex::hash(std::uint64_t salt) const {
  std::uint64_t h = splitmix64(salt ^ path_.size());
  for (std::uint32_t v : path_) h = splitmix64(h ^ v);
  return h;
}

NoiseTree::NoiseTree(std::uint64_t master_seed, double T, std::size_t d, unsigned grid_levels,
                     unsigned m)
    : seed_(master_seed), T_(T), d_(d), levels_(grid_levels), m_(m), fine_(1) {
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("NoiseTree: T must be positive");
  if (d == 0) throw std::invalid_argument("NoiseTree: d must be positive");
  if (m == 0) throw std::invalid_argument("NoiseTree: m must be positive");
  for (unsigned i = 0; i < grid_levels; ++i) {
    fine_ *= m;
    if (fine_ > kMaxFineSteps) {
      throw std::invalid_argument("NoiseTree: m^grid_levels exceeds " +
                                  std::to_string(kMaxFineSteps));
    }
  }
}

NoiseTree::NoiseTree(const NoiseTree& other)
    : seed_(other.seed_),
      T_(other.T_),
      d_(other.d_),
      levels_(other.levels_),
      m_(other.m_),
      fine_(other.fine_) {}

double NoiseTree::uniform_time(const ThetaIndex& theta) const {
  return stream_for(seed_, kPurposeUniform, theta).uniform(0);
}

// Caller holds mutex_.
const std::vector<double>& NoiseTree::path(const ThetaIndex& theta) const {
  auto it = cache_.find(theta);
  if (it != cache_.end()) return *it->second;

  const CounterStream s = stream_for(seed_, kPurposeBrownian, theta);
  const double scale = std::sqrt(T_ / static_cast<double>(fine_));
  auto values = std::make_unique<std::vector<double>>((fine_ + 1) * d_, 0.0);
  std::vector<double> z(fine_ * d_);
  s.normals(0, z);
  for (std::uint64_t k = 1; k <= fine_; ++k) {
    for (std::size_t j = 0; j < d_; ++j) {
      (*values)[k * d_ + j] = (*values)[(k - 1) * d_ + j] + scale * z[(k - 1) * d_ + j];
    }
  }
  auto& slot = cache_[theta];
  slot = std::move(values);
  return *slot;
}

void NoiseTree::brownian_into(const ThetaIndex& theta, std::uint64_t index,
                              std::span<double> out) const {
  if (index > fine_) throw std::out_of_range("NoiseTree: grid index beyond T");
  if (out.size() != d_) throw std::invalid_argument("NoiseTree: output length must equal d");
  if (index == 0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  std::lock_guard lock(mutex_);
  const auto& p = path(theta);
  for (std::size_t j = 0; j < d_; ++j) out[j] = p[index * d_ + j];
}

std::vector<double> NoiseTree::brownian_at(const ThetaIndex& theta, double t) const {
  if (!(t >= 0.0) || t > T_) throw std::domain_error("NoiseTree: time outside [0, T]");
  const double scaled = t / T_ * static_cast<double>(fine_);
  const double k = std::round(scaled);
  if (std::abs(scaled - k) > 1e-9 * static_cast<double>(fine_)) {
    throw std::domain_error("NoiseTree: time " + std::to_string(t) + " is not on the grid");
  }
  std::vector<double> out(d_);
  brownian_into(theta, static_cast<std::uint64_t>(k), out);
  return out;
}

std::size_t NoiseTree::cached_paths() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

void NoiseTree::clear_cache() const {
  std::lock_guard lock(mutex_);
  cache_.clear();
}

}  // namespace mkvnet
