#pragma once

// Dirichlet eigenbasis of -Laplace on an interval (0,L) or rectangle
// (0,Lx)x(0,Ly), with collocation transforms for pseudospectral evaluation
// of nonlinear terms.
//
// Basis functions on (0,L): phi_k(x) = sqrt(2/L) sin(k pi x / L), orthonormal
// in L^2. The collocation grid is the uniform interior grid with 4N intervals
// per dimension (>= 2x oversampling), on which the discrete sine orthogonality
// makes products of basis functions integrate exactly.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "attractor/core.hpp"
#include "attractor/errors.hpp"

namespace attractor {

struct Basis {
  int spatial_dim = 1;
  int modes_per_dim = 1;
  std::vector<double> lengths;

  int n_modes = 0;                              // total mode count
  Vec eigenvalues;                              // sorted ascending
  std::vector<std::array<int, 2>> mode_index;   // (j,k) per sorted mode; k=0 in 1D
  int n_quad = 0;
  Vec quad_weights;                             // flattened, size n_quad
  std::vector<Vec> quad_nodes_per_dim;          // interior nodes per dimension
  Vec phi;                                      // n_modes x n_quad, row-major

  double domain_measure() const {
    double m = 1.0;
    for (double l : lengths) m *= l;
    return m;
  }
  double lambda1() const { return eigenvalues.front(); }
  const double* mode_values(int m) const { return phi.data() + static_cast<std::size_t>(m) * n_quad; }
};

inline Basis build_basis(int dim, int modes, const std::vector<double>& lengths) {
  if (dim != 1 && dim != 2) throw Error("build_basis: dim must be 1 or 2");
  if (modes < 1) throw Error("build_basis: modes must be >= 1");
  if (static_cast<int>(lengths.size()) != dim)
    throw Error("build_basis: lengths must have one entry per dimension");
  for (double l : lengths)
    if (!(l > 0.0)) throw Error("build_basis: lengths must be positive");

  Basis b;
  b.spatial_dim = dim;
  b.modes_per_dim = modes;
  b.lengths = lengths;

  const double pi = std::numbers::pi;

  // Eigenvalues with mode indices; lexicographic (j,k) breaks 2D ties.
  std::vector<std::pair<double, std::array<int, 2>>> spec;
  if (dim == 1) {
    for (int k = 1; k <= modes; ++k)
      spec.push_back({std::pow(k * pi / lengths[0], 2), {k, 0}});
  } else {
    for (int j = 1; j <= modes; ++j)
      for (int k = 1; k <= modes; ++k)
        spec.push_back({std::pow(j * pi / lengths[0], 2) + std::pow(k * pi / lengths[1], 2),
                        {j, k}});
  }
  std::stable_sort(spec.begin(), spec.end(), [](const auto& a, const auto& c) {
    if (a.first != c.first) return a.first < c.first;
    return a.second < c.second;
  });
  b.n_modes = static_cast<int>(spec.size());
  for (const auto& [lam, jk] : spec) {
    b.eigenvalues.push_back(lam);
    b.mode_index.push_back(jk);
  }

  // Interior collocation grid, 4N uniform intervals per dimension.
  const int intervals = 4 * modes;
  const int nodes_1d = intervals - 1;
  b.quad_nodes_per_dim.resize(dim);
  for (int d = 0; d < dim; ++d) {
    const double hstep = lengths[d] / intervals;
    for (int j = 1; j < intervals; ++j) b.quad_nodes_per_dim[d].push_back(j * hstep);
  }
  b.n_quad = (dim == 1) ? nodes_1d : nodes_1d * nodes_1d;
  const double w1 = lengths[0] / intervals;
  if (dim == 1) {
    b.quad_weights.assign(b.n_quad, w1);
  } else {
    const double w2 = lengths[1] / intervals;
    b.quad_weights.assign(b.n_quad, w1 * w2);
  }

  // Tabulate basis functions at the nodes.
  b.phi.resize(static_cast<std::size_t>(b.n_modes) * b.n_quad);
  for (int m = 0; m < b.n_modes; ++m) {
    double* row = b.phi.data() + static_cast<std::size_t>(m) * b.n_quad;
    const auto [j, k] = b.mode_index[m];
    if (dim == 1) {
      const double norm = std::sqrt(2.0 / lengths[0]);
      for (int q = 0; q < b.n_quad; ++q)
        row[q] = norm * std::sin(j * pi * b.quad_nodes_per_dim[0][q] / lengths[0]);
    } else {
      const double norm = std::sqrt(2.0 / lengths[0]) * std::sqrt(2.0 / lengths[1]);
      for (int qx = 0; qx < nodes_1d; ++qx)
        for (int qy = 0; qy < nodes_1d; ++qy)
          row[qx * nodes_1d + qy] =
              norm * std::sin(j * pi * b.quad_nodes_per_dim[0][qx] / lengths[0]) *
              std::sin(k * pi * b.quad_nodes_per_dim[1][qy] / lengths[1]);
    }
  }
  return b;
}

inline Vec to_physical(const Vec& modal, const Basis& b) {
  if (static_cast<int>(modal.size()) != b.n_modes)
    throw Error("to_physical: coefficient length mismatch");
  Vec grid(b.n_quad, 0.0);
  for (int m = 0; m < b.n_modes; ++m) {
    const double a = modal[m];
    if (a == 0.0) continue;
    const double* row = b.mode_values(m);
    for (int q = 0; q < b.n_quad; ++q) grid[q] += a * row[q];
  }
  return grid;
}

inline Vec to_modal(const Vec& grid, const Basis& b) {
  if (static_cast<int>(grid.size()) != b.n_quad)
    throw Error("to_modal: grid length mismatch");
  Vec modal(b.n_modes, 0.0);
  for (int m = 0; m < b.n_modes; ++m) {
    const double* row = b.mode_values(m);
    double s = 0.0;
    for (int q = 0; q < b.n_quad; ++q) s += b.quad_weights[q] * grid[q] * row[q];
    modal[m] = s;
  }
  return modal;
}

struct Norms {
  double l2 = 0.0;
  double h1 = 0.0;
};

inline Norms norms(const Vec& modal, const Basis& b) {
  if (static_cast<int>(modal.size()) != b.n_modes)
    throw Error("norms: coefficient length mismatch");
  double l2sq = 0.0, h1sq = 0.0;
  for (int m = 0; m < b.n_modes; ++m) {
    l2sq += modal[m] * modal[m];
    h1sq += b.eigenvalues[m] * modal[m] * modal[m];
  }
  return {std::sqrt(l2sq), std::sqrt(h1sq)};
}

// Quadrature of a nodal field against the weights: integral over Omega.
inline double integrate_nodal(const Vec& grid, const Basis& b) {
  if (static_cast<int>(grid.size()) != b.n_quad)
    throw Error("integrate_nodal: grid length mismatch");
  double s = 0.0;
  for (int q = 0; q < b.n_quad; ++q) s += b.quad_weights[q] * grid[q];
  return s;
}

// L^2 inner product of two nodal fields.
inline double inner_nodal(const Vec& a, const Vec& c, const Basis& b) {
  double s = 0.0;
  for (int q = 0; q < b.n_quad; ++q) s += b.quad_weights[q] * a[q] * c[q];
  return s;
}

}  // namespace attractor
