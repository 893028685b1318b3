#include "mepol/spectral_grid.hpp"

#include <cmath>

#include "mepol/errors.hpp"

namespace mepol {

SpectralGrid::SpectralGrid(const GridSpec& spec) : spec_(spec) {
  for (int a = 0; a < 3; ++a) {
    if (spec.points[static_cast<size_t>(a)] < 1 ||
        spec.box[static_cast<size_t>(a)] <= 0.0) {
      fail_input("SpectralGrid: points must be >= 1 and box lengths > 0");
    }
  }
  n_cells_ = spec.points[0] * spec.points[1] * spec.points[2];
  volume_ = spec.box[0] * spec.box[1] * spec.box[2];
  cell_volume_ = volume_ / n_cells_;

  // Integer triples in [-floor((N-1)/2), floor(N/2)] per axis, k = 2 pi m / L.
  std::array<int, 3> lo{}, hi{};
  for (int a = 0; a < 3; ++a) {
    const int n = spec.points[static_cast<size_t>(a)];
    lo[static_cast<size_t>(a)] = -((n - 1) / 2);
    hi[static_cast<size_t>(a)] = n / 2;
  }
  for (int mx = lo[0]; mx <= hi[0]; ++mx) {
    for (int my = lo[1]; my <= hi[1]; ++my) {
      for (int mz = lo[2]; mz <= hi[2]; ++mz) {
        if (mx == 0 && my == 0 && mz == 0) continue;
        ktriples_.push_back({mx, my, mz});
        kvecs_.emplace_back(2.0 * kPi * mx / spec.box[0],
                            2.0 * kPi * my / spec.box[1],
                            2.0 * kPi * mz / spec.box[2]);
      }
    }
  }

  pol1_.resize(kvecs_.size());
  pol2_.resize(kvecs_.size());
  for (size_t i = 0; i < kvecs_.size(); ++i) {
    const Vector3r khat = kvecs_[i].normalized();
    // Axis least aligned with k (lowest index on ties).
    int axis = 0;
    double best = std::abs(khat(0));
    for (int a = 1; a < 3; ++a) {
      if (std::abs(khat(a)) < best - 1e-14) {
        best = std::abs(khat(a));
        axis = a;
      }
    }
    Vector3r e = Vector3r::Zero();
    e(axis) = 1.0;
    pol1_[i] = e.cross(khat).normalized();
    pol2_[i] = khat.cross(pol1_[i]);
  }
}

Vector3r SpectralGrid::cell_position(int c) const {
  const int nx = spec_.points[0];
  const int ny = spec_.points[1];
  const int ix = c % nx;
  const int iy = (c / nx) % ny;
  const int iz = c / (nx * ny);
  return {spec_.box[0] * ix / nx, spec_.box[1] * iy / ny,
          spec_.box[2] * iz / spec_.points[2]};
}

int SpectralGrid::negated_k_index(int ik) const {
  const auto& t = ktriples_[static_cast<size_t>(ik)];
  std::array<int, 3> neg = {-t[0], -t[1], -t[2]};
  return find_k(neg);
}

int SpectralGrid::find_k(const std::array<int, 3>& triple) const {
  for (size_t i = 0; i < ktriples_.size(); ++i) {
    if (ktriples_[i] == triple) return static_cast<int>(i);
  }
  return -1;
}

Complex SpectralGrid::phase(int ik, int cell) const {
  const double arg = kvecs_[static_cast<size_t>(ik)].dot(cell_position(cell));
  return {std::cos(arg), std::sin(arg)};
}

Vector3c SpectralGrid::coefficient(const std::vector<Vector3c>& cell_values,
                                   int ik) const {
  if (static_cast<int>(cell_values.size()) != n_cells_) {
    fail_input("SpectralGrid::coefficient: size mismatch");
  }
  Vector3c acc = Vector3c::Zero();
  for (int c = 0; c < n_cells_; ++c) {
    acc += cell_values[static_cast<size_t>(c)] * std::conj(phase(ik, c));
  }
  return acc / static_cast<double>(n_cells_);
}

int MediumMap::region_at(int cell) const {
  if (cell < 0 || cell >= static_cast<int>(region_of_cell.size())) {
    fail_input("MediumMap: cell index out of range");
  }
  const int r = region_of_cell[static_cast<size_t>(cell)];
  if (r < 0) {
    fail_input("MediumMap: cell " + std::to_string(cell) +
               " is not covered by any region");
  }
  return r;
}

bool MediumMap::homogeneous() const {
  for (int r : region_of_cell) {
    if (r != region_of_cell.front()) return false;
  }
  return !region_of_cell.empty();
}

}  // namespace mepol
