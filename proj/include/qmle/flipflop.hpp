#pragma once

#include <optional>
#include <vector>

#include "qmle/stability.hpp"
#include "qmle/thresholds.hpp"

namespace qmle {

struct DegenerateSample : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Concentration factors psi1 (p x p) and psi2 (q x q), both Hermitian
// positive definite; psi2 diagonal under the proportional covariance model.
// The Kronecker scaling ambiguity is fixed by det(psi1) = 1; comparisons use
// the gauge-free product psi1 (x) psi2.
struct ConcentrationPair {
    Eigen::MatrixXcd psi1;
    Eigen::MatrixXcd psi2;
};

ConcentrationPair identity_pair(int p, int q);

// Random positive-definite start W W^dag + 0.01 I (psi2 diagonal for the
// proportional covariance model).
ConcentrationPair random_pair(int p, int q, Model model, Field field, std::uint64_t seed);

enum class MleStatus { Converged, Diverged, MaxIterReached };

struct MleResult {
    MleStatus status = MleStatus::MaxIterReached;
    ConcentrationPair pair;  // last iterate; the MLE when Converged
    double loglik = 0;
    int iterations = 0;
    std::vector<double> history;  // objective after each sweep, nondecreasing
    double stationarity_residual = std::numeric_limits<double>::infinity();
};

struct FlipFlopOptions {
    double tol = 1e-10;              // relative objective change
    int max_iter = 5000;
    double divergence_guard = 1e12;  // objective above this means unbounded
    double cond_guard = 1e14;        // update-matrix condition number cap
};

// Log-likelihood of the matrix normal sample Y at the concentration pair,
// up to the additive constant:
//   (1/2) [ m q logdet(psi1) + m p logdet(psi2) - sum_i tr(psi1 Y_i psi2 Y_i^dag) ].
double log_likelihood(const RepTuple& Y, const ConcentrationPair& pair);

// Alternating exact maximization over the two factors. Each half-sweep solves
// its block in closed form, so the objective is nondecreasing.
MleResult flip_flop(const RepTuple& Y, Model model, const ConcentrationPair& init,
                    const FlipFlopOptions& opts = {},
                    const Tolerances& tols = default_tols());

inline MleResult flip_flop(const RepTuple& Y, Model model,
                           const FlipFlopOptions& opts = {},
                           const Tolerances& tols = default_tols()) {
    return flip_flop(Y, model, identity_pair(Y.p, Y.q), opts, tols);
}

enum class ProbeOutcome { AllAgree, Disagree, NotApplicable };

struct UniquenessReport {
    ProbeOutcome outcome = ProbeOutcome::NotApplicable;
    Eigen::MatrixXcd representative;       // psi1 (x) psi2 of the first run
    Eigen::MatrixXcd witness_a, witness_b; // two differing products when Disagree
    double max_rel_distance = 0;
    int runs = 0;
};

// Runs flip_flop from n_starts random positive-definite initializations and
// compares the invariant products psi1 (x) psi2 pairwise.
UniquenessReport uniqueness_probe(const RepTuple& Y, Model model, int n_starts,
                                  std::uint64_t seed, const FlipFlopOptions& opts = {},
                                  const Tolerances& tols = default_tols());

enum class EmpiricalOutcome { Unbounded, ExistsNotUnique, ExistsUnique, Inconclusive };

// Indecomposability cross-check for real tuples with a unique MLE.
enum class IndecCheck { NotRun, Passed, Failed };

struct EmpiricalVerdict {
    EmpiricalOutcome outcome = EmpiricalOutcome::Inconclusive;
    StabilityLevel stability = StabilityLevel::SemistableOnly;
    bool stability_conclusive = true;
    MleStatus flipflop_status = MleStatus::MaxIterReached;
    ProbeOutcome probe = ProbeOutcome::NotApplicable;
    IndecCheck indecomposable_over_R = IndecCheck::NotRun;
    int iterations = 0;
    double stationarity_residual = std::numeric_limits<double>::quiet_NaN();
};

struct EmpiricalOptions {
    int n_starts = 12;
    std::uint64_t seed = kDefaultSeed;
    FlipFlopOptions flipflop;
    ScalingOptions scaling;
};

// Empirical counterpart of the exact classification: stability checker
// (operator scaling for the matrix normal model, the exact star checker for
// proportional covariance), flip-flop outcome, and multi-start uniqueness
// probing, cross-checked against each other. For real tuples declared unique
// the real splitting is required to be a single summand.
EmpiricalVerdict classify_empirical(const RepTuple& Y, Model model,
                                    const EmpiricalOptions& opts = {},
                                    const Tolerances& tols = default_tols());

const char* to_string(MleStatus s);
const char* to_string(ProbeOutcome o);
const char* to_string(EmpiricalOutcome o);

}  // namespace qmle
