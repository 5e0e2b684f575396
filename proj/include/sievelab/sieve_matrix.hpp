#pragma once

// Family x index matrices and their squared operator norms.
//
// For a matrix Phi with rows indexed by a family and columns by an index set,
// the large sieve norm is
//     delta      = max_{|a|=1} |Phi a|^2      = top eigenvalue of Phi^* Phi,
// and its dual
//     dual_delta = max_{|b|=1} |Phi^* b|^2    = top eigenvalue of Phi Phi^*.
// The two coincide (duality principle); both are computed independently so
// the gap can serve as a numerical check.

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "sievelab/common.hpp"

namespace sievelab {

struct SieveMatrix {
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    Eigen::MatrixXcd entries;     ///< unweighted entries
    Eigen::VectorXd row_weights;  ///< strictly positive, e.g. omega_F^{-1/2}

    Eigen::Index rows() const { return entries.rows(); }
    Eigen::Index cols() const { return entries.cols(); }

    /// diag(row_weights) * entries
    Eigen::MatrixXcd weighted() const { return row_weights.asDiagonal() * entries; }

    void validate() const {
        if (row_weights.size() != entries.rows())
            throw DomainError("row_weights size does not match row count");
        if (!row_labels.empty() && static_cast<Eigen::Index>(row_labels.size()) != entries.rows())
            throw DomainError("row_labels size does not match row count");
        if (!col_labels.empty() && static_cast<Eigen::Index>(col_labels.size()) != entries.cols())
            throw DomainError("col_labels size does not match column count");
        for (Eigen::Index i = 0; i < row_weights.size(); ++i)
            if (!(row_weights[i] > 0) || !std::isfinite(row_weights[i]))
                throw DomainError("row weight " + std::to_string(i) + " is not strictly positive");
        if (!entries.allFinite()) throw DomainError("matrix has non-finite entries");
    }

    /// Same matrix with rows and columns exchanged and entries conjugated;
    /// row weights are folded into the entries.
    SieveMatrix adjoint() const {
        SieveMatrix out;
        out.row_labels = col_labels;
        out.col_labels = row_labels;
        out.entries = weighted().adjoint();
        out.row_weights = Eigen::VectorXd::Ones(out.entries.rows());
        return out;
    }
};

enum class NormMethod { power_iteration, dense_eigen };

inline const char* to_string(NormMethod m) {
    return m == NormMethod::power_iteration ? "power_iteration" : "dense_eigen";
}

struct NormReport {
    double delta = 0.0;
    std::optional<double> dual_delta;
    int iterations = 0;
    double residual = 0.0;
    NormMethod method = NormMethod::dense_eigen;

    double relative_gap() const {
        if (!dual_delta) return 0.0;
        return std::abs(delta - *dual_delta) / std::max(delta, 1.0);
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["delta"] = delta;
        j["dual_delta"] = dual_delta ? nlohmann::json(*dual_delta) : nlohmann::json(nullptr);
        j["iterations"] = iterations;
        j["residual"] = residual;
        j["method"] = to_string(method);
        return j;
    }
};

struct PowerIterationOptions {
    double tol = 1e-10;  ///< stop when |G x - rho x| <= tol * rho
    int max_iterations = 10000;
    u64 seed = 0x5eedULL;
};

struct EigenEstimate {
    double value = 0.0;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

enum class GramSide {
    columns,  ///< Phi^* Phi
    rows      ///< Phi Phi^*
};

/// Top eigenvalue of Phi^* Phi (or Phi Phi^*) by matrix-free power iteration
/// with Rayleigh-quotient stopping.
inline EigenEstimate power_iteration(const Eigen::MatrixXcd& phi, GramSide side,
                                     const PowerIterationOptions& opts = {}) {
    const Eigen::Index dim = side == GramSide::columns ? phi.cols() : phi.rows();
    EigenEstimate est;
    if (dim == 0) {
        est.converged = true;
        return est;
    }
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> normal;
    Eigen::VectorXcd x(dim);
    for (Eigen::Index i = 0; i < dim; ++i) x[i] = cd(normal(rng), normal(rng));
    x.normalize();

    auto apply = [&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
        if (side == GramSide::columns) {
            Eigen::VectorXcd y = phi * v;
            return phi.adjoint() * y;
        }
        Eigen::VectorXcd y = phi.adjoint() * v;
        return phi * y;
    };

    for (int it = 1; it <= opts.max_iterations; ++it) {
        Eigen::VectorXcd z = apply(x);
        const double rho = x.dot(z).real();
        est.iterations = it;
        est.value = rho;
        if (rho <= 0.0) {
            // Zero Gram matrix (or x orthogonal to its range by accident).
            est.residual = z.norm();
            est.converged = est.residual == 0.0;
            if (est.converged) return est;
            x = z.normalized();
            continue;
        }
        est.residual = (z - rho * x).norm() / rho;
        if (est.residual <= opts.tol) {
            est.converged = true;
            return est;
        }
        x = z / z.norm();
    }
    return est;
}

/// Largest eigenvalue of a Hermitian matrix, with the eigen-residual |G v - l v| / l.
inline EigenEstimate dense_top_eigenvalue(const Eigen::MatrixXcd& gram) {
    EigenEstimate est;
    est.converged = true;
    if (gram.rows() == 0) return est;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gram);
    if (solver.info() != Eigen::Success) throw NumericalError("dense Hermitian eigensolver failed", NAN);
    const Eigen::Index top = gram.rows() - 1;  // eigenvalues ascending
    est.value = std::max(0.0, solver.eigenvalues()[top]);
    Eigen::VectorXcd v = solver.eigenvectors().col(top);
    const double scale = std::max(est.value, 1e-300);
    est.residual = (gram * v - solver.eigenvalues()[top] * v).norm() / scale;
    return est;
}

struct NormOptions {
    double tol = 1e-10;
    Eigen::Index dense_threshold = 400;  ///< sides at most this large use the dense solver
    bool compute_dual = true;
    int max_iterations = 10000;
    u64 seed = 0x5eedULL;
};

namespace detail {

inline EigenEstimate side_estimate(const Eigen::MatrixXcd& phi, GramSide side, const NormOptions& opts,
                                   bool& used_dense) {
    const Eigen::Index dim = side == GramSide::columns ? phi.cols() : phi.rows();
    if (dim <= opts.dense_threshold) {
        used_dense = true;
        Eigen::MatrixXcd gram =
            side == GramSide::columns ? Eigen::MatrixXcd(phi.adjoint() * phi) : Eigen::MatrixXcd(phi * phi.adjoint());
        return dense_top_eigenvalue(gram);
    }
    used_dense = false;
    EigenEstimate est = power_iteration(phi, side, {opts.tol, opts.max_iterations, opts.seed});
    if (!est.converged)
        throw NumericalError("power iteration did not converge in " + std::to_string(est.iterations) +
                                 " iterations (residual " + std::to_string(est.residual) + ")",
                             est.residual);
    return est;
}

}  // namespace detail

/// Squared operator norm of the weighted matrix. delta comes from Phi^* Phi,
/// dual_delta from Phi Phi^*; each side uses the dense solver when it is at
/// most dense_threshold wide and power iteration otherwise.
inline NormReport operator_norm_sq(const SieveMatrix& m, const NormOptions& opts = {}) {
    if (opts.tol <= 0) throw DomainError("operator_norm_sq: tol must be positive");
    if (m.rows() == 0 || m.cols() == 0) throw DomainError("operator_norm_sq: empty matrix");
    m.validate();
    const Eigen::MatrixXcd phi = m.weighted();

    NormReport rep;
    bool dense = false;
    EigenEstimate primal = detail::side_estimate(phi, GramSide::columns, opts, dense);
    rep.delta = primal.value;
    rep.iterations = primal.iterations;
    rep.residual = primal.residual;
    rep.method = dense ? NormMethod::dense_eigen : NormMethod::power_iteration;
    if (opts.compute_dual) {
        bool dual_dense = false;
        rep.dual_delta = detail::side_estimate(phi, GramSide::rows, opts, dual_dense).value;
    }
    return rep;
}

/// Norm from an explicitly supplied Hermitian Gram matrix (dual side only).
inline NormReport norm_from_gram(const Eigen::MatrixXcd& gram) {
    EigenEstimate est = dense_top_eigenvalue(gram);
    NormReport rep;
    rep.delta = est.value;
    rep.residual = est.residual;
    rep.method = NormMethod::dense_eigen;
    return rep;
}

/// |delta(Phi) - delta(Phi^*)| / max(delta, 1), both sides computed independently.
inline double duality_gap(const SieveMatrix& m, const NormOptions& opts = {}) {
    if (m.rows() == 0 || m.cols() == 0) throw DomainError("duality_gap: empty matrix");
    NormOptions o = opts;
    o.compute_dual = true;
    return operator_norm_sq(m, o).relative_gap();
}

inline SieveMatrix make_matrix(Eigen::MatrixXcd entries) {
    SieveMatrix m;
    m.entries = std::move(entries);
    m.row_weights = Eigen::VectorXd::Ones(m.entries.rows());
    return m;
}

}  // namespace sievelab
