#pragma once

#include <span>

#include "lining/matrix.hpp"

namespace lining {

/// Which implementation of the numeric kernels to run. The serial variant is
/// the reference; the parallel variant uses OpenMP but computes every output
/// element with the same operation order, so the two agree bit for bit.
/// Below a fixed work-size grain the parallel variant runs the serial body
/// (identical result, no fork/join cost); callers that sweep many small
/// problems parallelize over those jobs instead.
enum class Exec { serial, parallel };

/// Objective value split into its three summands. Each term is stored with
/// its lambda factor already applied, and total = data + adjacency + symmetry.
struct LossBreakdown {
    double data_term = 0.0;
    double adjacency_term = 0.0;
    double symmetry_term = 0.0;
    double total = 0.0;
};

struct Gradients {
    Matrix u; // dE/dU, M x H
    Matrix v; // dE/dV, H x N
};

namespace kernels {

// Serial reference implementations.
namespace serial {
void multiply(const Matrix& u, const Matrix& v, Matrix& out);
LossBreakdown loss_terms(const Matrix& values, const Matrix& mask, const Matrix& recon,
                         std::span<const double> q, double lambda1, double lambda2, bool wrap);
void objective_grad_field(const Matrix& values, const Matrix& mask, const Matrix& recon,
                          std::span<const double> q, double lambda1, double lambda2, bool wrap,
                          Matrix& out);
void grad_factors(const Matrix& u, const Matrix& v, const Matrix& field, Matrix& grad_u,
                  Matrix& grad_v);
} // namespace serial

// OpenMP implementations; identical arithmetic per output element.
namespace parallel {
void multiply(const Matrix& u, const Matrix& v, Matrix& out);
LossBreakdown loss_terms(const Matrix& values, const Matrix& mask, const Matrix& recon,
                         std::span<const double> q, double lambda1, double lambda2, bool wrap);
void objective_grad_field(const Matrix& values, const Matrix& mask, const Matrix& recon,
                          std::span<const double> q, double lambda1, double lambda2, bool wrap,
                          Matrix& out);
void grad_factors(const Matrix& u, const Matrix& v, const Matrix& field, Matrix& grad_u,
                  Matrix& grad_v);
} // namespace parallel

inline void multiply(const Matrix& u, const Matrix& v, Matrix& out, Exec exec) {
    exec == Exec::serial ? serial::multiply(u, v, out) : parallel::multiply(u, v, out);
}

inline LossBreakdown loss_terms(const Matrix& values, const Matrix& mask, const Matrix& recon,
                                std::span<const double> q, double lambda1, double lambda2,
                                bool wrap, Exec exec) {
    return exec == Exec::serial
               ? serial::loss_terms(values, mask, recon, q, lambda1, lambda2, wrap)
               : parallel::loss_terms(values, mask, recon, q, lambda1, lambda2, wrap);
}

/// dE/dR gathered per cell:
///   data term  : -2 (X - R) on observed cells
///   adjacency  : 2*l1*( Q_n (R_n - R_{n+1})   for n <= N-1
///                     - Q_{n-1} (R_{n-1} - R_n) for n >= 2 )   (+ wrap pair)
///   symmetry   : 4*l2*(R_n - R_{N+1-n})
inline void objective_grad_field(const Matrix& values, const Matrix& mask, const Matrix& recon,
                                 std::span<const double> q, double lambda1, double lambda2,
                                 bool wrap, Matrix& out, Exec exec) {
    exec == Exec::serial
        ? serial::objective_grad_field(values, mask, recon, q, lambda1, lambda2, wrap, out)
        : parallel::objective_grad_field(values, mask, recon, q, lambda1, lambda2, wrap, out);
}

/// Chain rule through R = UV: grad_u = field * V^T, grad_v = U^T * field.
inline void grad_factors(const Matrix& u, const Matrix& v, const Matrix& field, Matrix& grad_u,
                         Matrix& grad_v, Exec exec) {
    exec == Exec::serial ? serial::grad_factors(u, v, field, grad_u, grad_v)
                         : parallel::grad_factors(u, v, field, grad_u, grad_v);
}

} // namespace kernels
} // namespace lining
