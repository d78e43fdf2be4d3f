#include "semcg/geometry.hpp"

#include <cmath>
#include <cstddef>
#include <string>

namespace semcg {

namespace {

// Trilinear hat functions on [-1,1] and their derivatives.
inline double hat(int c, double t) { return c == 0 ? 0.5 * (1.0 - t) : 0.5 * (1.0 + t); }
inline double hat_deriv(int c) { return c == 0 ? -0.5 : 0.5; }

struct Jacobian {
  double j[9];   // row-major, j[3a+b] = d x_a / d xi_b
  double det;
};

Jacobian corner_map_jacobian(const std::array<const double*, 8>& corner,
                             double xi, double eta, double gamma) {
  Jacobian out{};
  for (int c = 0; c < 8; ++c) {
    const int ci = c & 1, cj = (c >> 1) & 1, ck = (c >> 2) & 1;
    const double d0 = hat_deriv(ci) * hat(cj, eta) * hat(ck, gamma);
    const double d1 = hat(ci, xi) * hat_deriv(cj) * hat(ck, gamma);
    const double d2 = hat(ci, xi) * hat(cj, eta) * hat_deriv(ck);
    for (int a = 0; a < 3; ++a) {
      out.j[3 * a + 0] += corner[c][a] * d0;
      out.j[3 * a + 1] += corner[c][a] * d1;
      out.j[3 * a + 2] += corner[c][a] * d2;
    }
  }
  const double* j = out.j;
  out.det = j[0] * (j[4] * j[8] - j[5] * j[7]) -
            j[1] * (j[3] * j[8] - j[5] * j[6]) +
            j[2] * (j[3] * j[7] - j[4] * j[6]);
  return out;
}

void invert3(const double* j, double det, double* inv) {
  const double r = 1.0 / det;
  inv[0] = (j[4] * j[8] - j[5] * j[7]) * r;
  inv[1] = (j[2] * j[7] - j[1] * j[8]) * r;
  inv[2] = (j[1] * j[5] - j[2] * j[4]) * r;
  inv[3] = (j[5] * j[6] - j[3] * j[8]) * r;
  inv[4] = (j[0] * j[8] - j[2] * j[6]) * r;
  inv[5] = (j[2] * j[3] - j[0] * j[5]) * r;
  inv[6] = (j[3] * j[7] - j[4] * j[6]) * r;
  inv[7] = (j[1] * j[6] - j[0] * j[7]) * r;
  inv[8] = (j[0] * j[4] - j[1] * j[3]) * r;
}

std::array<const double*, 8> element_corners(const HexMesh& mesh, index_t e) {
  std::array<const double*, 8> corner{};
  for (int c = 0; c < 8; ++c) {
    corner[c] =
        mesh.vertices[static_cast<std::size_t>(
                          mesh.elements[static_cast<std::size_t>(e)][c])]
            .data();
  }
  return corner;
}

}  // namespace

std::vector<std::array<double, 3>> gll_coordinates(const HexMesh& mesh,
                                                   const SpectralBasis& basis) {
  const int m = basis.num_points();
  std::vector<std::array<double, 3>> coords;
  coords.reserve(static_cast<std::size_t>(mesh.num_elements()) * m * m * m);
  for (index_t e = 0; e < mesh.num_elements(); ++e) {
    const auto corner = element_corners(mesh, e);
    for (int k = 0; k < m; ++k) {
      for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
          std::array<double, 3> x{0.0, 0.0, 0.0};
          for (int c = 0; c < 8; ++c) {
            const double phi = hat(c & 1, basis.nodes[i]) *
                               hat((c >> 1) & 1, basis.nodes[j]) *
                               hat((c >> 2) & 1, basis.nodes[k]);
            for (int a = 0; a < 3; ++a) x[a] += corner[c][a] * phi;
          }
          coords.push_back(x);
        }
      }
    }
  }
  return coords;
}

GeomFactors geometric_factors(const HexMesh& mesh, const SpectralBasis& basis,
                              const DofMap& dofmap) {
  const int m = basis.num_points();
  const index_t per_elem = static_cast<index_t>(m) * m * m;

  GeomFactors gf;
  gf.num_points = dofmap.num_local;
  gf.g.resize(static_cast<std::size_t>(gf.num_points) * 6);
  gf.jinv.resize(static_cast<std::size_t>(mesh.num_elements()) * 9);
  gf.jw.resize(static_cast<std::size_t>(gf.num_points));

  for (index_t e = 0; e < mesh.num_elements(); ++e) {
    const auto corner = element_corners(mesh, e);
    double* jinv = gf.jinv.data() + 9 * e;
    {
      const Jacobian j0 =
          corner_map_jacobian(corner, basis.nodes[0], basis.nodes[0],
                              basis.nodes[0]);
      if (!(j0.det > 0.0)) {
        throw InvertedElementError(
            e, "geometric_factors: nonpositive Jacobian determinant in "
               "element " + std::to_string(e));
      }
      invert3(j0.j, j0.det, jinv);
    }
    double b[6];
    detail::inv_self_outer(jinv, b);

    index_t p = e * per_elem;
    for (int k = 0; k < m; ++k) {
      for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i, ++p) {
          const Jacobian jac = corner_map_jacobian(
              corner, basis.nodes[i], basis.nodes[j], basis.nodes[k]);
          if (!(jac.det > 0.0)) {
            throw InvertedElementError(
                e, "geometric_factors: nonpositive Jacobian determinant in "
                   "element " + std::to_string(e));
          }
          const double w3 =
              basis.weights[i] * basis.weights[j] * basis.weights[k];
          const double jw = w3 * jac.det;
          gf.jw[static_cast<std::size_t>(p)] = jw;
          double* g = gf.g.data() + 6 * p;
          for (int c = 0; c < 6; ++c) g[c] = jw * b[c];
        }
      }
    }
  }
  return gf;
}

}  // namespace semcg
