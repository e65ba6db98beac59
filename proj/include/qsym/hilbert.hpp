#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <optional>
#include <string>
#include <vector>

#include "qsym/ensemble.hpp"
#include "qsym/repspace.hpp"

namespace qsym {

/// Per-experiment orthonormal outcome vectors in the event Hilbert space.
struct ProjectorFamily {
    int dim = 0;
    std::vector<Mat> vectors; // one d x m_a matrix per experiment, columns e_{a,x}

    Mat projector(int a, int x) const {
        Vec e = vectors[a].col(x);
        return e * e.adjoint();
    }

    bool orthonormal() const {
        for (const Mat& v : vectors) {
            Mat g = v.adjoint() * v;
            if ((g - Mat::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff() > eps_m) return false;
        }
        return true;
    }
};

struct DensityState {
    Mat rho;

    bool valid() const {
        if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > eps_m) return false;
        if (std::abs(rho.trace().real() - 1.0) > eps_m || std::abs(rho.trace().imag()) > eps_m)
            return false;
        Eigen::SelfAdjointEigenSolver<Mat> es(rho);
        return es.eigenvalues().minCoeff() >= -eps_psd;
    }
};

struct Observable {
    Mat matrix;
    std::string source; // experiment name, empty for ad-hoc observables
};

/// Y = sum_x y_x e_{a,x} e_{a,x}^dagger
inline Observable observable_of(const ProjectorFamily& fam, int a, const std::vector<double>& values) {
    if (static_cast<int>(values.size()) != fam.vectors[a].cols())
        throw error("observable_of: one value per outcome required");
    Mat y = Mat::Zero(fam.dim, fam.dim);
    for (std::size_t x = 0; x < values.size(); ++x) y += values[x] * fam.projector(a, static_cast<int>(x));
    return {y, ""};
}

inline ProjectorFamily standard_family(const Ensemble& e, int d) {
    ProjectorFamily fam;
    fam.dim = d;
    for (const Experiment& ex : e.experiments) {
        if (ex.outcome_count > d)
            throw error("standard_family: dimension too small for experiment '" + ex.name + "'");
        fam.vectors.push_back(Mat::Identity(d, d).leftCols(ex.outcome_count));
    }
    return fam;
}

// ---------------------------------------------------------------------------
// density-operator fitting

namespace detail {

/// Orthonormal basis of traceless Hermitian d x d matrices under <A,B> = tr(AB).
inline std::vector<Mat> traceless_hermitian_basis(int d) {
    std::vector<Mat> basis;
    for (int k = 1; k < d; ++k) { // diagonal, Gell-Mann style
        Mat b = Mat::Zero(d, d);
        double norm = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
        for (int i = 0; i < k; ++i) b(i, i) = norm;
        b(k, k) = -static_cast<double>(k) * norm;
        basis.push_back(b);
    }
    double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            Mat s = Mat::Zero(d, d);
            s(i, j) = inv_sqrt2;
            s(j, i) = inv_sqrt2;
            basis.push_back(s);
            Mat a = Mat::Zero(d, d);
            a(i, j) = cplx(0, inv_sqrt2);
            a(j, i) = cplx(0, -inv_sqrt2);
            basis.push_back(a);
        }
    return basis;
}

inline Mat psd_projection(const Mat& h) {
    Eigen::SelfAdjointEigenSolver<Mat> es((h + h.adjoint()) / 2.0);
    Eigen::VectorXd ev = es.eigenvalues();
    for (int i = 0; i < ev.size(); ++i) ev[i] = std::max(ev[i], 0.0);
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

} // namespace detail

enum class FitMode { fixed, joint };

struct FitResult {
    ProjectorFamily family;
    DensityState state;
    double residual = 0; // sum of squared deviations of trace(rho Pi) from the targets
    bool converged = true;
    int iterations = 0;
    std::vector<std::string> notes;
};

struct FitOptions {
    FitMode mode = FitMode::fixed;
    int max_iterations = 10000;
    std::uint64_t seed = 0;
};

/// Mixed-state target probabilities: weights over Phi applied to every
/// experiment's rows. A point state is the Dirac weight at that index.
inline std::vector<std::vector<double>> fit_targets(const Ensemble& e, const std::vector<double>& weights) {
    if (static_cast<int>(weights.size()) != e.n()) throw error("fit_targets: weight length mismatch");
    double total = 0;
    for (double w : weights) {
        if (w < 0) throw error("fit_targets: negative weight");
        total += w;
    }
    if (total <= 0) throw error("fit_targets: zero total weight");
    std::vector<std::vector<double>> t;
    for (const Experiment& ex : e.experiments) {
        std::vector<double> row(ex.outcome_count, 0.0);
        for (int phi = 0; phi < e.n(); ++phi)
            for (int x = 0; x < ex.outcome_count; ++x) row[x] += weights[phi] / total * ex.prob(phi, x);
        t.push_back(std::move(row));
    }
    return t;
}

namespace detail {

struct FixedFit {
    Mat rho;
    double residual;
    int iterations;
    bool converged;
};

/// Least squares for Hermitian rho on the trace-1 slice, min-norm solution,
/// then alternating projection between the PSD cone and the affine set of
/// least-squares optima until movement is below eps_psd.
inline FixedFit fit_fixed_family(const Ensemble& e, const std::vector<std::vector<double>>& targets,
                                 const ProjectorFamily& fam, int max_iterations) {
    int d = fam.dim;
    std::vector<Mat> basis = traceless_hermitian_basis(d);
    int nb = static_cast<int>(basis.size());

    int rows = 0;
    for (const auto& t : targets) rows += static_cast<int>(t.size());
    Eigen::MatrixXd design(rows, nb);
    Eigen::VectorXd rhs(rows);
    int r = 0;
    for (std::size_t a = 0; a < targets.size(); ++a) {
        for (std::size_t x = 0; x < targets[a].size(); ++x) {
            Mat pi = fam.projector(static_cast<int>(a), static_cast<int>(x));
            for (int k = 0; k < nb; ++k) design(r, k) = (basis[k] * pi).trace().real();
            rhs[r] = targets[a][x] - pi.trace().real() / d;
            ++r;
        }
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd z_star = svd.solve(rhs); // min-norm least squares
    // projector onto the null space of the design (the least-squares optimum set
    // is z_star + null(design))
    double tol = std::max(design.rows(), design.cols()) * svd.singularValues().maxCoeff() *
                 std::numeric_limits<double>::epsilon();
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > tol) ++rank;
    Eigen::MatrixXd vr = svd.matrixV().leftCols(rank);
    Eigen::MatrixXd null_proj = Eigen::MatrixXd::Identity(nb, nb) - vr * vr.transpose();

    auto assemble = [&](const Eigen::VectorXd& z) {
        Mat rho = Mat::Identity(d, d) / static_cast<double>(d);
        for (int k = 0; k < nb; ++k) rho += z[k] * basis[k];
        return rho;
    };
    auto coords = [&](const Mat& rho) {
        Eigen::VectorXd z(nb);
        Mat centered = rho - Mat::Identity(d, d) / static_cast<double>(d);
        for (int k = 0; k < nb; ++k) z[k] = (basis[k] * centered).trace().real();
        return z;
    };

    Mat rho = assemble(z_star);
    int it = 0;
    bool converged = true;
    for (; it < max_iterations; ++it) {
        Mat psd = psd_projection(rho);
        Eigen::VectorXd z = z_star + null_proj * (coords(psd) - z_star);
        Mat next = assemble(z);
        double move = (next - rho).cwiseAbs().maxCoeff();
        rho = next;
        if (move < eps_psd) break;
        if (it + 1 == max_iterations) converged = false;
    }
    // final projection: make the invariants exact
    rho = psd_projection(rho);
    double tr = rho.trace().real();
    if (tr < 1e-12)
        rho = Mat::Identity(d, d) / static_cast<double>(d);
    else
        rho /= tr;
    rho = (rho + rho.adjoint()) / 2.0;

    double residual = 0;
    for (std::size_t a = 0; a < targets.size(); ++a)
        for (std::size_t x = 0; x < targets[a].size(); ++x) {
            double p = (rho * fam.projector(static_cast<int>(a), static_cast<int>(x))).trace().real();
            double dlt = p - targets[a][x];
            residual += dlt * dlt;
        }
    return {rho, residual, it, converged};
}

} // namespace detail

/// Fits a density operator reproducing trace(rho Pi_{a,x}) = target over all
/// experiments and outcomes. In joint mode the projector family is optimized
/// by block-coordinate descent with projected gradient steps on each frame.
inline FitResult gleason_fit(const Ensemble& e, const std::vector<double>& weights, int d,
                             FitOptions opts = {},
                             const std::optional<ProjectorFamily>& family = std::nullopt) {
    for (const Experiment& ex : e.experiments)
        if (ex.outcome_count > d)
            throw error("gleason_fit: dimension " + std::to_string(d) +
                        " is smaller than the outcome count of '" + ex.name + "'");
    auto targets = fit_targets(e, weights);

    FitResult res;
    if (d < 3)
        res.notes.push_back("dimension below 3: the density-operator representation is outside "
                            "Gleason's hypothesis; fit performed anyway");

    ProjectorFamily fam = family ? *family : standard_family(e, d);
    if (fam.dim != d || fam.vectors.size() != e.experiments.size())
        throw error("gleason_fit: family does not match the ensemble and dimension");
    if (!fam.orthonormal()) throw error("gleason_fit: family is not orthonormal per experiment");

    if (opts.mode == FitMode::fixed) {
        auto fit = detail::fit_fixed_family(e, targets, fam, opts.max_iterations);
        res.family = fam;
        res.state = {fit.rho};
        res.residual = fit.residual;
        res.converged = fit.converged;
        res.iterations = fit.iterations;
        return res;
    }

    // joint mode: alternate the fixed fit with per-experiment frame updates
    double step = 0.5;
    auto fit = detail::fit_fixed_family(e, targets, fam, opts.max_iterations);
    double best = fit.residual;
    ProjectorFamily best_fam = fam;
    Mat best_rho = fit.rho;
    int it = 0;
    bool converged = false;
    for (; it < opts.max_iterations; ++it) {
        for (std::size_t a = 0; a < e.experiments.size(); ++a) {
            Mat v = fam.vectors[a];
            for (int x = 0; x < v.cols(); ++x) {
                double p = (v.col(x).adjoint() * fit.rho * v.col(x)).value().real();
                Vec grad = 2.0 * (p - targets[a][x]) * (fit.rho * v.col(x));
                v.col(x) -= step * grad;
            }
            Eigen::HouseholderQR<Mat> qr(v);
            Mat q = qr.householderQ() * Mat::Identity(fam.dim, v.cols());
            Mat r = q.adjoint() * v;
            for (int x = 0; x < v.cols(); ++x) // fix the phase for determinism
                if (std::abs(r(x, x)) > 0) q.col(x) *= r(x, x) / std::abs(r(x, x));
            fam.vectors[a] = q;
        }
        fit = detail::fit_fixed_family(e, targets, fam, opts.max_iterations);
        if (fit.residual < best - 1e-14) {
            best = fit.residual;
            best_fam = fam;
            best_rho = fit.rho;
        } else {
            step *= 0.5;
            fam = best_fam;
            if (step < 1e-6) { converged = true; break; }
        }
    }
    res.family = best_fam;
    res.state = {best_rho};
    res.residual = best;
    res.converged = converged;
    res.iterations = it;
    return res;
}

inline FitResult gleason_fit_at(const Ensemble& e, int phi, int d, FitOptions opts = {},
                                const std::optional<ProjectorFamily>& family = std::nullopt) {
    if (phi < 0 || phi >= e.n()) throw error("gleason_fit_at: state index out of range");
    std::vector<double> w(e.n(), 0.0);
    w[phi] = 1.0;
    return gleason_fit(e, w, d, opts, family);
}

// ---------------------------------------------------------------------------

inline double expectation(const DensityState& rho, const Observable& obs) {
    if (rho.rho.rows() != obs.matrix.rows()) throw error("expectation: dimension mismatch");
    cplx tr = (obs.matrix * rho.rho).trace();
    if (std::abs(tr.imag()) > eps_m) throw error("expectation: non-real trace");
    return tr.real();
}

struct VarianceEigenReport {
    double variance = 0;
    double eigen_residual = 0; // |Y e - <Y> e|
    bool variance_zero = false;
    bool is_eigenvector = false;
    bool biconditional_ok = false;
};

/// Variance of Y in the pure state e vanishes exactly when e is an
/// eigenvector of Y.
inline VarianceEigenReport variance_eigen_check(const Vec& e, const Observable& obs) {
    if (std::abs(e.norm() - 1.0) > eps_m) throw error("variance_eigen_check: state not normalized");
    VarianceEigenReport rep;
    double mean = (e.adjoint() * obs.matrix * e).value().real();
    double second = (e.adjoint() * obs.matrix * obs.matrix * e).value().real();
    rep.variance = second - mean * mean;
    rep.eigen_residual = (obs.matrix * e - mean * e).norm();
    rep.variance_zero = std::abs(rep.variance) < eps_m;
    rep.is_eigenvector = rep.eigen_residual < std::sqrt(eps_m);
    rep.biconditional_ok = (rep.variance_zero == rep.is_eigenvector);
    return rep;
}

/// Ideal-measurement update: pi rho pi, renormalized.
inline DensityState state_update(const DensityState& rho, const Mat& pi) {
    Mat updated = pi * rho.rho * pi.adjoint();
    double tr = updated.trace().real();
    if (tr <= eps_psd) throw error("state_update: measured eigenspace has zero probability");
    updated /= tr;
    updated = (updated + updated.adjoint()) / 2.0;
    return {updated};
}

struct PureStateMatch {
    int phi = -1;
    double deviation = 0; // max over (a,x) of |e' Pi e - P(x)|
    bool matched = false;
    bool tied = false;    // another state matches within the same tolerance
};

inline constexpr double eps_match = 1e-6;

/// Finds the hyperparameter whose outcome probabilities the pure state
/// reproduces across every experiment.
inline PureStateMatch pure_state_to_phi(const Vec& e_vec, const ProjectorFamily& fam,
                                        const Ensemble& e, double tol = eps_match) {
    if (std::abs(e_vec.norm() - 1.0) > eps_m) throw error("pure_state_to_phi: state not normalized");
    PureStateMatch best;
    int matches = 0;
    for (int phi = 0; phi < e.n(); ++phi) {
        double dev = 0;
        for (std::size_t a = 0; a < e.experiments.size(); ++a) {
            const Experiment& ex = e.experiments[a];
            for (int x = 0; x < ex.outcome_count; ++x) {
                double p = (e_vec.adjoint() * fam.projector(static_cast<int>(a), x) * e_vec).value().real();
                dev = std::max(dev, std::abs(p - ex.prob(phi, x)));
            }
        }
        if (dev < tol) ++matches;
        if (best.phi < 0 || dev < best.deviation) {
            best.phi = phi;
            best.deviation = dev;
        }
    }
    best.matched = best.deviation < tol;
    best.tied = matches > 1;
    return best;
}

// ---------------------------------------------------------------------------
// unit-time dynamics and the Stone generator

struct Dynamics {
    Perm step;
    double hbar = 1.0;
    Mat u_step;     // unitary of the unit-time map
    Mat generator;  // Hermitian A with u_step = exp(iA), eigenphases in (-pi, pi]

    Mat hamiltonian() const { return -hbar * generator; }

    Mat evolve(double t) const {
        Eigen::SelfAdjointEigenSolver<Mat> es(generator);
        Vec phases(es.eigenvalues().size());
        for (int i = 0; i < phases.size(); ++i)
            phases[i] = std::exp(cplx(0, es.eigenvalues()[i] * t));
        return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    }
};

/// U(t) = exp(iAt) for the cyclic group generated by the step permutation.
/// The generator is the principal logarithm; the eigenphase at the branch cut
/// is taken as +pi. An optional intertwiner W (rows orthonormal) carries the
/// dynamics onto a subspace; the compressed step must stay unitary.
inline Dynamics build_dynamics(const Perm& k, double hbar = 1.0,
                               const std::optional<Mat>& intertwiner = std::nullopt) {
    if (!is_bijection(k)) throw error("build_dynamics: step map is not a bijection");
    if (!(hbar > 0)) throw error("build_dynamics: hbar must be positive");
    int n = static_cast<int>(k.size());
    Mat u = Mat::Zero(n, n);
    for (int j = 0; j < n; ++j) u(k[j], j) = 1.0; // (Uf)(phi) = f(k^{-1} phi)

    if (intertwiner) {
        const Mat& w = *intertwiner;
        if (w.cols() != n) throw error("build_dynamics: intertwiner must act on L2(Phi)");
        if ((w * w.adjoint() - Mat::Identity(w.rows(), w.rows())).cwiseAbs().maxCoeff() > eps_m)
            throw error("build_dynamics: intertwiner rows are not orthonormal");
        Mat compressed = w * u * w.adjoint();
        if ((compressed.adjoint() * compressed - Mat::Identity(w.rows(), w.rows()))
                .cwiseAbs()
                .maxCoeff() > eps_m)
            throw error("build_dynamics: subspace is not invariant under the step");
        u = compressed;
    }

    Eigen::ComplexSchur<Mat> schur(u);
    Mat q = schur.matrixU();
    Dynamics dyn;
    dyn.step = k;
    dyn.hbar = hbar;
    dyn.u_step = u;
    Eigen::VectorXd phases(u.rows());
    for (int i = 0; i < u.rows(); ++i) {
        double ph = std::arg(schur.matrixT()(i, i));
        if (ph < -M_PI + 1e-9 && std::abs(std::abs(schur.matrixT()(i, i)) - 1.0) < 1e-6)
            ph = M_PI; // deterministic branch at the cut
        phases[i] = ph;
    }
    Mat a = q * phases.cast<cplx>().asDiagonal() * q.adjoint();
    dyn.generator = (a + a.adjoint()) / 2.0;
    return dyn;
}

} // namespace qsym
