#pragma once

// Gauss-Legendre quadrature on [-1/2, 1/2] via Golub-Welsch.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

namespace testsupport {

struct GaussLegendre {
    std::vector<double> nodes;    // on [-1/2, 1/2]
    std::vector<double> weights;  // sum to 1
};

inline GaussLegendre gauss_legendre_half(int n) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        const double b = i / std::sqrt(4.0 * i * i - 1.0);
        J(i - 1, i) = b;
        J(i, i - 1) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    GaussLegendre gl;
    gl.nodes.resize(n);
    gl.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        gl.nodes[i] = 0.5 * es.eigenvalues()[i];
        const double v0 = es.eigenvectors()(0, i);
        gl.weights[i] = v0 * v0;  // 2 v0^2 on [-1,1], halved by the map
    }
    return gl;
}

}  // namespace testsupport
