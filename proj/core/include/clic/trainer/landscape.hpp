#pragma once

#include <iosfwd>

#include "clic/policy/energy.hpp"

namespace clic::trainer {

using numkit::Matrix;
using numkit::Vector;

// Square grid over a 2D slice of the action box. Point (i, j) has
// a1 = lo + i * step and a2 = lo + j * step and sits at row i * resolution + j.
struct LandscapeGrid {
  int resolution = 101;
  double lo = -1.0;
  double hi = 1.0;
  int dim_x = 0;  // action dimensions spanned by the slice
  int dim_y = 1;

  double step() const { return (hi - lo) / (resolution - 1); }
  void validate(int action_dim) const;
};

// Every grid point as a full action; dimensions outside the slice are 0.
Matrix grid_actions(const LandscapeGrid& grid, int action_dim);

Vector grid_energies(const policy::EnergySurface& energy, const Vector& state,
                     const LandscapeGrid& grid);

// "# lo=<lo> hi=<hi> resolution=<r> dims=<x>,<y>" then "a1,a2,energy" and
// resolution^2 rows in row-major order.
void dump_landscape(std::ostream& out, const policy::EnergySurface& energy,
                    const Vector& state, const LandscapeGrid& grid);

}  // namespace clic::trainer
