#include "lining/kernels.hpp"

#include <vector>

// Reference implementations. Kept deliberately plain; the parallel variants
// in kernels_parallel.cpp must reproduce these results exactly, so every
// output element is accumulated in the same order here and there.

namespace lining::kernels::serial {

void multiply(const Matrix& u, const Matrix& v, Matrix& out) {
    const int m = u.rows(), h = u.cols(), n = v.cols();
    if (!(out.rows() == m && out.cols() == n))
        out = Matrix(m, n);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int k = 0; k < h; ++k)
                acc += u(i, k) * v(k, j);
            out(i, j) = acc;
        }
    }
}

LossBreakdown loss_terms(const Matrix& values, const Matrix& mask, const Matrix& recon,
                         std::span<const double> q, double lambda1, double lambda2, bool wrap) {
    const int m = recon.rows(), n = recon.cols();
    std::vector<double> data_row(m, 0.0), adj_row(m, 0.0), sym_row(m, 0.0);

    for (int i = 0; i < m; ++i) {
        double data = 0.0, adj = 0.0, sym = 0.0;
        for (int j = 0; j < n; ++j) {
            if (mask(i, j) != 0.0) {
                const double r = values(i, j) - recon(i, j);
                data += r * r;
            }
        }
        for (int j = 0; j + 1 < n; ++j) {
            const double d = recon(i, j) - recon(i, j + 1);
            adj += q[j] * d * d;
        }
        if (wrap) {
            const double d = recon(i, n - 1) - recon(i, 0);
            adj += q[n - 1] * d * d;
        }
        for (int j = 0; j < n; ++j) {
            const double d = recon(i, j) - recon(i, n - 1 - j);
            sym += d * d;
        }
        data_row[i] = data;
        adj_row[i] = adj;
        sym_row[i] = sym;
    }

    LossBreakdown out;
    double data = 0.0, adj = 0.0, sym = 0.0;
    for (int i = 0; i < m; ++i) {
        data += data_row[i];
        adj += adj_row[i];
        sym += sym_row[i];
    }
    out.data_term = data;
    out.adjacency_term = lambda1 * adj;
    out.symmetry_term = lambda2 * sym;
    out.total = out.data_term + out.adjacency_term + out.symmetry_term;
    return out;
}

void objective_grad_field(const Matrix& values, const Matrix& mask, const Matrix& recon,
                          std::span<const double> q, double lambda1, double lambda2, bool wrap,
                          Matrix& out) {
    const int m = recon.rows(), n = recon.cols();
    if (!(out.rows() == m && out.cols() == n))
        out = Matrix(m, n);

    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            double g = 0.0;
            if (mask(i, j) != 0.0)
                g += -2.0 * (values(i, j) - recon(i, j));
            if (j + 1 < n)
                g += 2.0 * lambda1 * q[j] * (recon(i, j) - recon(i, j + 1));
            if (j >= 1)
                g -= 2.0 * lambda1 * q[j - 1] * (recon(i, j - 1) - recon(i, j));
            if (wrap) {
                if (j == n - 1)
                    g += 2.0 * lambda1 * q[n - 1] * (recon(i, n - 1) - recon(i, 0));
                if (j == 0)
                    g -= 2.0 * lambda1 * q[n - 1] * (recon(i, n - 1) - recon(i, 0));
            }
            g += 4.0 * lambda2 * (recon(i, j) - recon(i, n - 1 - j));
            out(i, j) = g;
        }
    }
}

void grad_factors(const Matrix& u, const Matrix& v, const Matrix& field, Matrix& grad_u,
                  Matrix& grad_v) {
    const int m = u.rows(), h = u.cols(), n = v.cols();
    if (!(grad_u.rows() == m && grad_u.cols() == h))
        grad_u = Matrix(m, h);
    if (!(grad_v.rows() == h && grad_v.cols() == n))
        grad_v = Matrix(h, n);

    for (int i = 0; i < m; ++i) {
        for (int k = 0; k < h; ++k) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j)
                acc += field(i, j) * v(k, j);
            grad_u(i, k) = acc;
        }
    }
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < h; ++k) {
            double acc = 0.0;
            for (int i = 0; i < m; ++i)
                acc += u(i, k) * field(i, j);
            grad_v(k, j) = acc;
        }
    }
}

} // namespace lining::kernels::serial
