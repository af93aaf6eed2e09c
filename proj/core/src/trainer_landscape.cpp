#include "clic/trainer/landscape.hpp"

#include <iomanip>
#include <ostream>

#include "clic/error.hpp"

namespace clic::trainer {

void LandscapeGrid::validate(int action_dim) const {
  if (resolution < 2) throw ConfigError("landscape: resolution must be >= 2");
  if (!(hi > lo)) throw ConfigError("landscape: need hi > lo");
  if (dim_x == dim_y || dim_x < 0 || dim_y < 0 || dim_x >= action_dim || dim_y >= action_dim) {
    throw ConfigError("landscape: slice dimensions must be two distinct action axes");
  }
}

Matrix grid_actions(const LandscapeGrid& grid, int action_dim) {
  grid.validate(action_dim);
  const int r = grid.resolution;
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(r) * r, action_dim);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      a(i * r + j, grid.dim_x) = grid.lo + i * grid.step();
      a(i * r + j, grid.dim_y) = grid.lo + j * grid.step();
    }
  }
  return a;
}

Vector grid_energies(const policy::EnergySurface& energy, const Vector& state,
                     const LandscapeGrid& grid) {
  const Matrix actions = grid_actions(grid, energy.action_dim());
  return energy.evaluate(policy::repeat_state(state, actions.rows()), actions, false).energies;
}

void dump_landscape(std::ostream& out, const policy::EnergySurface& energy,
                    const Vector& state, const LandscapeGrid& grid) {
  const Matrix actions = grid_actions(grid, energy.action_dim());
  const Vector e =
      energy.evaluate(policy::repeat_state(state, actions.rows()), actions, false).energies;
  out << "# lo=" << grid.lo << " hi=" << grid.hi << " resolution=" << grid.resolution
      << " dims=" << grid.dim_x << ',' << grid.dim_y << '\n';
  out << "a1,a2,energy\n" << std::setprecision(17);
  for (Eigen::Index k = 0; k < actions.rows(); ++k) {
    out << actions(k, grid.dim_x) << ',' << actions(k, grid.dim_y) << ',' << e(k) << '\n';
  }
}

}  // namespace clic::trainer
