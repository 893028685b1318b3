#pragma once

#include <array>
#include <vector>

#include "mepol/types.hpp"

namespace mepol {

// spectral_grid.hpp — periodic-box spatial grid and its reciprocal lattice.
//
// Fields are represented either by per-cell values v(r_c) or by plane-wave
// coefficients v(k) with  v(r) = sum_k v(k) e^{i k r}.  The curl is exact
// per Fourier component (curl -> i k x).  The k = 0 component carries no
// transverse dynamics and is excluded from the mode basis.

struct GridSpec {
  std::array<double, 3> box = {1.0, 1.0, 1.0};
  std::array<int, 3> points = {1, 1, 1};
};

class SpectralGrid {
 public:
  explicit SpectralGrid(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  int cell_count() const { return n_cells_; }
  double cell_volume() const { return cell_volume_; }
  double volume() const { return volume_; }
  Vector3r cell_position(int c) const;

  // Nonzero reciprocal vectors, deterministic (lexicographic) order.
  int k_count() const { return static_cast<int>(kvecs_.size()); }
  const Vector3r& k_vector(int ik) const { return kvecs_[static_cast<size_t>(ik)]; }
  const std::array<int, 3>& k_triple(int ik) const { return ktriples_[static_cast<size_t>(ik)]; }

  // Index of the lattice partner at -k, or -1 when -k aliases onto +k
  // (Nyquist row of an even axis).
  int negated_k_index(int ik) const;
  int find_k(const std::array<int, 3>& triple) const;

  // Real orthonormal transverse polarization pair; (pol1, pol2, k_hat) is
  // right-handed.
  const Vector3r& pol1(int ik) const { return pol1_[static_cast<size_t>(ik)]; }
  const Vector3r& pol2(int ik) const { return pol2_[static_cast<size_t>(ik)]; }

  Complex phase(int ik, int cell) const;  // e^{i k . r_c}

  // Cell values -> coefficient at k (discrete average with e^{-i k r}).
  Vector3c coefficient(const std::vector<Vector3c>& cell_values, int ik) const;

 private:
  GridSpec spec_;
  int n_cells_ = 0;
  double cell_volume_ = 0.0;
  double volume_ = 0.0;
  std::vector<Vector3r> kvecs_;
  std::vector<std::array<int, 3>> ktriples_;
  std::vector<Vector3r> pol1_, pol2_;
};

// Cell -> region binding for a medium on a grid.  Every cell must be
// covered by exactly one region.
struct MediumMap {
  std::vector<int> region_of_cell;

  int region_at(int cell) const;
  bool homogeneous() const;
};

}  // namespace mepol
