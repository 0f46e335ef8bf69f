#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

namespace mkvnet {

/// Index theta in the tree of random inputs: a nonempty tuple of naturals.
class ThetaIndex {
 public:
  explicit ThetaIndex(std::vector<std::uint32_t> path);
  ThetaIndex(std::initializer_list<std::uint32_t> path);

  /// (theta, n, k, l)
  ThetaIndex child(std::uint32_t n, std::uint32_t k, std::uint32_t l) const;

  const std::vector<std::uint32_t>& path() const { return path_; }
  std::uint64_t hash(std::uint64_t salt) const;

  friend bool operator==(const ThetaIndex&, const ThetaIndex&) = default;

 private:
  std::vector<std::uint32_t> path_;
};

struct ThetaHash {
  std::size_t operator()(const ThetaIndex& t) const { return t.hash(0); }
};

/// Fixed realization of the uniforms t^theta and Brownian paths W^theta.
///
/// Every value is a pure function of (master_seed, theta, query). Brownian
/// paths live on the grid k T / m^grid_levels, k = 0..m^grid_levels, and are
/// built once per theta as cumulative sums of N(0, dt I_d) increments. The
/// path cache is guarded by a mutex, so one tree may be shared between
/// threads. Copies share parameters but start with an empty cache.
class NoiseTree {
 public:
  NoiseTree(std::uint64_t master_seed, double T, std::size_t d, unsigned grid_levels,
            unsigned m);
  NoiseTree(const NoiseTree& other);
  NoiseTree& operator=(const NoiseTree&) = delete;

  std::uint64_t master_seed() const { return seed_; }
  double horizon() const { return T_; }
  std::size_t dim() const { return d_; }
  unsigned grid_levels() const { return levels_; }
  unsigned branching() const { return m_; }
  std::uint64_t fine_steps() const { return fine_; }

  double uniform_time(const ThetaIndex& theta) const;

  /// W^theta(t); t must be a multiple of T / m^grid_levels in [0, T].
  std::vector<double> brownian_at(const ThetaIndex& theta, double t) const;
  /// W^theta(index * T / fine_steps()) into `out` (length d).
  void brownian_into(const ThetaIndex& theta, std::uint64_t index, std::span<double> out) const;

  std::size_t cached_paths() const;
  void clear_cache() const;

 private:
  const std::vector<double>& path(const ThetaIndex& theta) const;

  std::uint64_t seed_;
  double T_;
  std::size_t d_;
  unsigned levels_;
  unsigned m_;
  std::uint64_t fine_;

  mutable std::mutex mutex_;
  mutable std::unordered_map<ThetaIndex, std::unique_ptr<const std::vector<double>>, ThetaHash>
      cache_;
};

}  // namespace mkvnet
