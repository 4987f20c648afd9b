#include "gw/quadrature.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "gw/errors.hpp"

namespace gw {

GaussRule gauss_hermite_normal(int n) {
  if (n < 1) throw ArgumentError("need at least one quadrature node");
  // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussRule r;
  for (int i = 0; i < n; ++i) {
    r.nodes.push_back(es.eigenvalues()(i));
    double v = es.eigenvectors()(0, i);
    r.weights.push_back(v * v);
  }
  return r;
}

std::vector<cplx> gh_sigma_expectation(int nodes, int n, int observables,
                                       const std::function<void(const Eigen::MatrixXcd&, cplx*)>& f) {
  GaussRule g = gauss_hermite_normal(nodes);
  int dims = n * n;
  if (dims > 4) throw UnsupportedDimension("tensor quadrature limited to 4 real dimensions");
  std::vector<int> idx(dims, 0);
  std::vector<cplx> acc(observables, cplx(0.0, 0.0)), out(observables);
  const double h = std::sqrt(0.5);
  Eigen::MatrixXcd s(n, n);
  while (true) {
    double w = 1.0;
    for (int d = 0; d < dims; ++d) w *= g.weights[idx[d]];
    int d = 0;
    for (int m = 0; m < n; ++m) s(m, m) = g.nodes[idx[d++]];
    for (int m = 0; m < n; ++m)
      for (int k = m + 1; k < n; ++k) {
        double re = g.nodes[idx[d++]] * h;
        double im = g.nodes[idx[d++]] * h;
        s(m, k) = cplx(re, im);
        s(k, m) = cplx(re, -im);
      }
    f(s, out.data());
    for (int k = 0; k < observables; ++k) acc[k] += w * out[k];
    int p = 0;
    while (p < dims && ++idx[p] == nodes) idx[p++] = 0;
    if (p == dims) break;
  }
  return acc;
}

}  // namespace gw
