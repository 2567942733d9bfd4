#include "qmle/flipflop.hpp"

#include "qmle/linalg.hpp"

namespace qmle {

namespace {

// First-sweep updates that are singular to machine precision mean the data
// itself is rank deficient (always so in the unbounded regime p > mq or
// q > mp); beyond that threshold but under the collapse tolerance we treat
// the update as divergence evidence.
constexpr double kExactSingular = 1e-14;

template <typename Scalar>
void require_pd(const DenseMatrix<Scalar>& psi, const char* name) {
    if (psi.rows() != psi.cols()) throw std::domain_error(std::string(name) + ": not square");
    const double scale = std::max(psi.norm(), 1e-300);
    if ((psi - psi.adjoint()).norm() > 1e-10 * scale)
        throw std::domain_error(std::string(name) + ": not Hermitian");
    Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> es(psi,
                                                          Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) <= 0)
        throw std::domain_error(std::string(name) + ": not positive definite");
}

template <typename Scalar>
double logdet_pd(const DenseMatrix<Scalar>& psi) {
    Eigen::LLT<DenseMatrix<Scalar>> llt(psi);
    if (llt.info() != Eigen::Success)
        throw std::domain_error("logdet of a non positive definite matrix");
    double ld = 0;
    for (Eigen::Index i = 0; i < psi.rows(); ++i)
        ld += std::log(std::real(llt.matrixL()(i, i)));
    return 2.0 * ld;
}

template <typename Scalar>
double loglik_impl(const std::vector<DenseMatrix<Scalar>>& mats,
                   const DenseMatrix<Scalar>& psi1, const DenseMatrix<Scalar>& psi2) {
    const int m = static_cast<int>(mats.size());
    const double p = static_cast<double>(psi1.rows());
    const double q = static_cast<double>(psi2.rows());
    double tr = 0;
    for (const auto& Y : mats) tr += std::real((psi1 * Y * psi2 * Y.adjoint()).trace());
    return 0.5 * (m * q * logdet_pd<Scalar>(psi1) + m * p * logdet_pd<Scalar>(psi2) - tr);
}

template <typename Scalar>
struct FlipFlopState {
    DenseMatrix<Scalar> psi1, psi2;
};

// Fixes the det(psi1) = 1 gauge without changing the product psi1 (x) psi2.
template <typename Scalar>
void normalize_gauge(FlipFlopState<Scalar>& st) {
    const double ld = logdet_pd<Scalar>(st.psi1);
    const double c = std::exp(ld / static_cast<double>(st.psi1.rows()));
    st.psi1 /= c;
    st.psi2 *= c;
}

template <typename Scalar>
MleResult flipflop_impl(const std::vector<DenseMatrix<Scalar>>& mats, Model model,
                        DenseMatrix<Scalar> psi1, DenseMatrix<Scalar> psi2,
                        const FlipFlopOptions& opts, const Tolerances& tols) {
    const int m = static_cast<int>(mats.size());
    const int p = static_cast<int>(mats[0].rows());
    const int q = static_cast<int>(mats[0].cols());

    require_pd<Scalar>(psi1, "psi1");
    require_pd<Scalar>(psi2, "psi2");
    if (model == Model::ProportionalCovariance) {
        DenseMatrix<Scalar> off = psi2;
        off.diagonal().setZero();
        if (off.norm() > 1e-12 * std::max(psi2.norm(), 1e-300))
            throw std::domain_error("psi2 must be diagonal for the proportional covariance model");
    }

    FlipFlopState<Scalar> st{std::move(psi1), std::move(psi2)};
    normalize_gauge(st);

    MleResult res;
    double obj = loglik_impl<Scalar>(mats, st.psi1, st.psi2);
    res.history.push_back(obj);

    auto finish = [&](MleStatus status, int it, double residual) {
        res.status = status;
        res.iterations = it;
        res.stationarity_residual = residual;
        res.pair.psi1 = st.psi1.template cast<complexd>();
        res.pair.psi2 = st.psi2.template cast<complexd>();
        res.loglik = res.history.back();
        return res;
    };

    for (int it = 1; it <= opts.max_iter; ++it) {
        // psi1 <- m q (sum_i Y_i psi2 Y_i^dag)^{-1}
        DenseMatrix<Scalar> M1 = DenseMatrix<Scalar>::Zero(p, p);
        for (const auto& Y : mats) M1 += Y * st.psi2 * Y.adjoint();
        M1 = ((M1 + M1.adjoint()) / 2.0).eval();
        Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> es1(M1);
        const double tr1 = std::real(M1.trace());
        if (es1.eigenvalues()(0) <= kExactSingular * tr1) {
            if (it == 1) throw DegenerateSample("first update matrix is singular");
            return finish(MleStatus::Diverged, it, res.stationarity_residual);
        }
        if (es1.eigenvalues()(0) < tols.collapse * tr1 ||
            es1.eigenvalues()(p - 1) / es1.eigenvalues()(0) > opts.cond_guard)
            return finish(MleStatus::Diverged, it, res.stationarity_residual);
        {
            Eigen::VectorXd inv = es1.eigenvalues().cwiseInverse() * (m * q);
            const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> invs = inv.cast<Scalar>();
            st.psi1 = es1.eigenvectors() * invs.asDiagonal() * es1.eigenvectors().adjoint();
        }

        // psi2 <- m p (sum_i Y_i^dag psi1 Y_i)^{-1}, diagonal-restricted for
        // the proportional covariance model.
        DenseMatrix<Scalar> M2 = DenseMatrix<Scalar>::Zero(q, q);
        for (const auto& Y : mats) M2 += Y.adjoint() * st.psi1 * Y;
        M2 = ((M2 + M2.adjoint()) / 2.0).eval();
        if (model == Model::ProportionalCovariance) {
            double dmin = std::numeric_limits<double>::infinity(), dmax = 0;
            for (int j = 0; j < q; ++j) {
                const double mj = std::real(M2(j, j));
                dmin = std::min(dmin, mj);
                dmax = std::max(dmax, mj);
            }
            const double trd = std::max(dmax * q, 1e-300);
            if (dmin <= kExactSingular * trd) {
                if (it == 1) throw DegenerateSample("first update matrix is singular");
                return finish(MleStatus::Diverged, it, res.stationarity_residual);
            }
            if (dmin < tols.collapse * trd || dmax / dmin > opts.cond_guard)
                return finish(MleStatus::Diverged, it, res.stationarity_residual);
            st.psi2 = DenseMatrix<Scalar>::Zero(q, q);
            for (int j = 0; j < q; ++j)
                st.psi2(j, j) = Scalar(m * p / std::real(M2(j, j)));
        } else {
            Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> es2(M2);
            const double tr2 = std::real(M2.trace());
            if (es2.eigenvalues()(0) <= kExactSingular * tr2) {
                if (it == 1) throw DegenerateSample("first update matrix is singular");
                return finish(MleStatus::Diverged, it, res.stationarity_residual);
            }
            if (es2.eigenvalues()(0) < tols.collapse * tr2 ||
                es2.eigenvalues()(q - 1) / es2.eigenvalues()(0) > opts.cond_guard)
                return finish(MleStatus::Diverged, it, res.stationarity_residual);
            Eigen::VectorXd inv = es2.eigenvalues().cwiseInverse() * (m * p);
            const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> invs = inv.cast<Scalar>();
            st.psi2 = es2.eigenvectors() * invs.asDiagonal() * es2.eigenvectors().adjoint();
        }

        normalize_gauge(st);
        const double obj_new = loglik_impl<Scalar>(mats, st.psi1, st.psi2);
        res.history.push_back(obj_new);

        if (obj_new > opts.divergence_guard)
            return finish(MleStatus::Diverged, it, res.stationarity_residual);

        // Stationarity: m q psi1^{-1} = sum_i Y_i psi2 Y_i^dag at the current
        // pair (the psi2 block is exact by construction).
        DenseMatrix<Scalar> M1n = DenseMatrix<Scalar>::Zero(p, p);
        for (const auto& Y : mats) M1n += Y * st.psi2 * Y.adjoint();
        M1n = ((M1n + M1n.adjoint()) / 2.0).eval();
        const DenseMatrix<Scalar> psi1_inv = st.psi1.llt().solve(
            DenseMatrix<Scalar>::Identity(p, p));
        const double residual =
            (static_cast<double>(m) * q * psi1_inv - M1n).norm() / std::max(M1n.norm(), 1e-300);

        const bool small_change = std::abs(obj_new - obj) <= opts.tol * (1.0 + std::abs(obj_new));
        obj = obj_new;
        if (small_change && residual < tols.stat)
            return finish(MleStatus::Converged, it, residual);
        res.stationarity_residual = residual;
    }

    return finish(MleStatus::MaxIterReached, opts.max_iter, res.stationarity_residual);
}

}  // namespace

ConcentrationPair identity_pair(int p, int q) {
    return {Eigen::MatrixXcd::Identity(p, p), Eigen::MatrixXcd::Identity(q, q)};
}

ConcentrationPair random_pair(int p, int q, Model model, Field field, std::uint64_t seed) {
    auto eng = make_engine(seed);
    ConcentrationPair pair;
    if (field == Field::Real) {
        Eigen::MatrixXd W1 = gaussian_matrix(p, p, eng);
        pair.psi1 = (W1 * W1.transpose() + 1e-2 * Eigen::MatrixXd::Identity(p, p))
                        .cast<complexd>();
    } else {
        Eigen::MatrixXcd W1 = gaussian_matrix_complex(p, p, eng);
        pair.psi1 = W1 * W1.adjoint() + 1e-2 * Eigen::MatrixXcd::Identity(p, p);
    }
    if (model == Model::ProportionalCovariance) {
        Eigen::MatrixXd W2 = gaussian_matrix(q, 1, eng);
        pair.psi2 = Eigen::MatrixXcd::Zero(q, q);
        for (int j = 0; j < q; ++j) pair.psi2(j, j) = W2(j, 0) * W2(j, 0) + 1e-2;
    } else if (field == Field::Real) {
        Eigen::MatrixXd W2 = gaussian_matrix(q, q, eng);
        pair.psi2 = (W2 * W2.transpose() + 1e-2 * Eigen::MatrixXd::Identity(q, q))
                        .cast<complexd>();
    } else {
        Eigen::MatrixXcd W2 = gaussian_matrix_complex(q, q, eng);
        pair.psi2 = W2 * W2.adjoint() + 1e-2 * Eigen::MatrixXcd::Identity(q, q);
    }
    return pair;
}

double log_likelihood(const RepTuple& Y, const ConcentrationPair& pair) {
    if (!Y.well_formed()) throw std::invalid_argument("log_likelihood: malformed tuple");
    if (Y.field == Field::Real) {
        const Eigen::MatrixXd p1 = pair.psi1.real(), p2 = pair.psi2.real();
        if (pair.psi1.imag().norm() > 1e-12 * std::max(1.0, p1.norm()) ||
            pair.psi2.imag().norm() > 1e-12 * std::max(1.0, p2.norm()))
            throw std::domain_error("real model with non-real concentration pair");
        require_pd<double>(p1, "psi1");
        require_pd<double>(p2, "psi2");
        return loglik_impl<double>(Y.real_matrices(), p1, p2);
    }
    require_pd<complexd>(pair.psi1, "psi1");
    require_pd<complexd>(pair.psi2, "psi2");
    return loglik_impl<complexd>(
        std::vector<Eigen::MatrixXcd>(Y.matrices.begin(), Y.matrices.end()), pair.psi1,
        pair.psi2);
}

MleResult flip_flop(const RepTuple& Y, Model model, const ConcentrationPair& init,
                    const FlipFlopOptions& opts, const Tolerances& tols) {
    if (!Y.well_formed()) throw std::invalid_argument("flip_flop: malformed tuple");
    if (Y.field == Field::Real)
        return flipflop_impl<double>(Y.real_matrices(), model, init.psi1.real(),
                                     init.psi2.real(), opts, tols);
    return flipflop_impl<complexd>(
        std::vector<Eigen::MatrixXcd>(Y.matrices.begin(), Y.matrices.end()), model,
        init.psi1, init.psi2, opts, tols);
}

UniquenessReport uniqueness_probe(const RepTuple& Y, Model model, int n_starts,
                                  std::uint64_t seed, const FlipFlopOptions& opts,
                                  const Tolerances& tols) {
    if (n_starts < 2) throw std::invalid_argument("uniqueness_probe needs n_starts >= 2");
    UniquenessReport rep;
    std::vector<Eigen::MatrixXcd> products;

    // Polish each run well beyond the comparison threshold: the product error
    // scales linearly with the stationarity residual, so matching limit
    // points at tau_unique needs residuals a couple of orders tighter.
    FlipFlopOptions popts = opts;
    popts.tol = std::min(popts.tol, 1e-12);
    popts.max_iter = std::max(popts.max_iter, 50000);
    Tolerances ptols = tols;
    ptols.stat = std::min(ptols.stat, 1e-4 * tols.unique);

    std::vector<double> residuals;
    for (int s = 0; s < n_starts; ++s) {
        const auto init = random_pair(Y.p, Y.q, model, Y.field,
                                      derive_seed(seed, {0x5157u, (std::uint64_t)s}));
        MleResult r;
        try {
            r = flip_flop(Y, model, init, popts, ptols);
        } catch (const DegenerateSample&) {
            rep.outcome = ProbeOutcome::NotApplicable;
            rep.runs = s + 1;
            return rep;
        }
        if (r.status == MleStatus::Diverged) {
            rep.outcome = ProbeOutcome::NotApplicable;
            rep.runs = s + 1;
            return rep;
        }
        // Runs that stalled short of the polish target still count when near
        // stationarity (flat optimum directions slow the tail of the
        // iteration down); the comparison threshold absorbs the slack.
        const bool usable = r.status == MleStatus::Converged ||
                            (r.status == MleStatus::MaxIterReached &&
                             r.stationarity_residual < 10.0 * tols.stat);
        if (usable) {
            products.push_back(kron(r.pair.psi1, r.pair.psi2));
            residuals.push_back(r.stationarity_residual);
        }
    }
    rep.runs = static_cast<int>(products.size());
    if (products.size() < 2) {
        rep.outcome = ProbeOutcome::NotApplicable;
        return rep;
    }
    rep.representative = products[0];

    // Two limit points count as distinct only beyond both the comparison
    // tolerance and the numerical slack certified by the runs' residuals
    // (product error scales roughly linearly with the residual; distinct
    // MLEs sit orders of magnitude further apart).
    constexpr double kResidualAmplification = 1e3;
    for (size_t i = 0; i < products.size(); ++i) {
        for (size_t j = i + 1; j < products.size(); ++j) {
            const double denom = std::max(products[i].norm(), products[j].norm());
            const double dist = (products[i] - products[j]).norm() / std::max(denom, 1e-300);
            rep.max_rel_distance = std::max(rep.max_rel_distance, dist);
            const double thresh =
                std::max(tols.unique,
                         kResidualAmplification * std::max(residuals[i], residuals[j]));
            if (dist > thresh) {
                rep.outcome = ProbeOutcome::Disagree;
                rep.witness_a = products[i];
                rep.witness_b = products[j];
                return rep;
            }
        }
    }
    rep.outcome = ProbeOutcome::AllAgree;
    return rep;
}

EmpiricalVerdict classify_empirical(const RepTuple& Y, Model model,
                                    const EmpiricalOptions& opts, const Tolerances& tols) {
    if (!Y.well_formed()) throw std::invalid_argument("classify_empirical: malformed tuple");
    EmpiricalVerdict v;

    const StabilityVerdict stab = (model == Model::MatrixNormal)
                                      ? scaling_semistability(Y, opts.scaling, tols)
                                      : star_exact_stability(Y, tols);
    v.stability = stab.level;
    v.stability_conclusive = stab.conclusive;

    bool ff_unbounded = false;
    bool ff_converged = false;
    try {
        // Give slow near-boundary samples room: a sweep is cheap at desk
        // scale and divergent runs exit long before the cap.
        FlipFlopOptions ffopts = opts.flipflop;
        ffopts.max_iter = std::max(ffopts.max_iter, 50000);
        const MleResult ff = flip_flop(Y, model, ffopts, tols);
        v.flipflop_status = ff.status;
        v.iterations = ff.iterations;
        v.stationarity_residual = ff.stationarity_residual;
        ff_unbounded = (ff.status == MleStatus::Diverged);
        // Near-stationary runs that ran out of iterations still witness an
        // MLE; slow tails happen on ill-conditioned samples.
        ff_converged = ff.status == MleStatus::Converged ||
                       (ff.status == MleStatus::MaxIterReached &&
                        ff.stationarity_residual < 10.0 * tols.stat);
    } catch (const DegenerateSample&) {
        // A singular first update certifies an unbounded likelihood direction.
        v.flipflop_status = MleStatus::Diverged;
        ff_unbounded = true;
    }

    const bool stab_unstable = stab.conclusive && stab.level == StabilityLevel::Unstable;
    const bool stab_semistable = stab.conclusive && stab.level != StabilityLevel::Unstable;

    if (stab_unstable && ff_unbounded) {
        v.outcome = EmpiricalOutcome::Unbounded;
    } else if (stab_semistable && ff_converged) {
        const auto probe = uniqueness_probe(Y, model, opts.n_starts,
                                            derive_seed(opts.seed, {0xabcdu}), opts.flipflop,
                                            tols);
        v.probe = probe.outcome;
        switch (probe.outcome) {
            case ProbeOutcome::AllAgree: v.outcome = EmpiricalOutcome::ExistsUnique; break;
            case ProbeOutcome::Disagree: v.outcome = EmpiricalOutcome::ExistsNotUnique; break;
            case ProbeOutcome::NotApplicable: v.outcome = EmpiricalOutcome::Inconclusive; break;
        }
    } else if (!stab.conclusive) {
        // One checker timed out; follow the flip-flop evidence but say so.
        if (ff_unbounded) {
            v.outcome = EmpiricalOutcome::Unbounded;
        } else if (ff_converged) {
            const auto probe = uniqueness_probe(Y, model, opts.n_starts,
                                                derive_seed(opts.seed, {0xabcdu}),
                                                opts.flipflop, tols);
            v.probe = probe.outcome;
            v.outcome = probe.outcome == ProbeOutcome::AllAgree
                            ? EmpiricalOutcome::ExistsUnique
                            : (probe.outcome == ProbeOutcome::Disagree
                                   ? EmpiricalOutcome::ExistsNotUnique
                                   : EmpiricalOutcome::Inconclusive);
        } else {
            v.outcome = EmpiricalOutcome::Inconclusive;
        }
    } else {
        v.outcome = EmpiricalOutcome::Inconclusive;  // checkers conflict
    }

    // A unique MLE over the reals forces indecomposability over the reals.
    if (Y.field == Field::Real && v.outcome == EmpiricalOutcome::ExistsUnique) {
        try {
            const auto split =
                decompose_representation(Y, derive_seed(opts.seed, {0x1dec0deu}), tols);
            v.indecomposable_over_R =
                split.dims.size() == 1 ? IndecCheck::Passed : IndecCheck::Failed;
        } catch (const AmbiguousSplit&) {
            v.indecomposable_over_R = IndecCheck::NotRun;
        }
    }
    return v;
}

const char* to_string(MleStatus s) {
    switch (s) {
        case MleStatus::Converged: return "converged";
        case MleStatus::Diverged: return "diverged";
        case MleStatus::MaxIterReached: return "max_iter_reached";
    }
    return "?";
}

const char* to_string(ProbeOutcome o) {
    switch (o) {
        case ProbeOutcome::AllAgree: return "all_agree";
        case ProbeOutcome::Disagree: return "disagree";
        case ProbeOutcome::NotApplicable: return "not_applicable";
    }
    return "?";
}

const char* to_string(EmpiricalOutcome o) {
    switch (o) {
        case EmpiricalOutcome::Unbounded: return "unbounded";
        case EmpiricalOutcome::ExistsNotUnique: return "exists_not_unique";
        case EmpiricalOutcome::ExistsUnique: return "exists_unique";
        case EmpiricalOutcome::Inconclusive: return "inconclusive";
    }
    return "?";
}

}  // namespace qmle
