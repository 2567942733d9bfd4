#pragma once

#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "qmle/decompose.hpp"
#include "qmle/quiver.hpp"
#include "qmle/rep.hpp"

namespace qmle {

enum class StabilityLevel { Unstable, SemistableOnly, Polystable, Stable };

struct NoDestabilizer : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NotASubrepresentation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct EnumerationLimit : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A one-parameter subgroup driving the tuple to zero: after the recorded
// basis change, every significant entry of the tuple scales with a positive
// power of t under diag(t^row_weights) * Z * diag(t^-col_weights).
struct OnePSCertificate {
    Eigen::MatrixXcd row_basis;   // p x p invertible
    Eigen::MatrixXcd col_basis;   // q x q invertible
    Eigen::VectorXi row_weights;  // sums to zero
    Eigen::VectorXi col_weights;  // sums to zero
};

// Destabilizing column subset for the star-quiver action: the columns S span
// only rank dimensions with q*rank < p*|S|.
struct SubsetWitness {
    std::vector<int> columns;
    int rank = 0;
};

struct StabilityVerdict {
    bool conclusive = true;  // false: neither criterion met within max_iter
    StabilityLevel level = StabilityLevel::SemistableOnly;
    std::optional<OnePSCertificate> certificate;
    std::optional<SubsetWitness> witness;
    std::vector<StarDimVec> star_summands;  // arm split of a polystable star tuple
    std::optional<SummandSplit> split;      // attached by assess_matrix_normal
    double scaling_residual = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
};

struct ScalingOptions {
    double eps = -1.0;   // imbalance target; <0 means 1e-8 * N^2 with N = m*p*q
    int max_iter = 10000;
};

// Alternating row/column balancing of the tuple. Semistable when the
// imbalance ds(Y) = ||S - (N/p)I||_F^2 + ||T - (N/q)I||_F^2 drops below eps,
// unstable when the smallest singular value of the mass-normalized tuple
// collapses, inconclusive otherwise (reported, never coerced).
StabilityVerdict scaling_semistability(const RepTuple& Y,
                                       const ScalingOptions& opts = {},
                                       const Tolerances& tols = default_tols());

// Exact King-criterion decision for the SL_p x ST_q star-quiver action via
// column-subset ranks; q is capped to keep the enumeration tractable.
StabilityVerdict star_exact_stability(const RepTuple& Y,
                                      const Tolerances& tols = default_tols());

// Builds the destabilizing one-parameter subgroup from a subrepresentation
// witness (U, W) with Y_i W <= U and positive canonical weight.
OnePSCertificate build_one_ps(const RepTuple& Y, const Eigen::MatrixXcd& U,
                              const Eigen::MatrixXcd& W,
                              const Tolerances& tols = default_tols());

// Checks a certificate: zero weight sums and positive degree on every entry
// of the transformed tuple above the block tolerance.
bool verify_one_ps(const RepTuple& Y, const OnePSCertificate& cert,
                   const Tolerances& tols = default_tols());

// Subrepresentation witness (U, W) with positive canonical weight extracted
// from a computed splitting, if any summand subset destabilizes.
std::optional<std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd>> destabilizing_witness(
    const RepTuple& Y, const SummandSplit& split);

// Full matrix-normal assessment: scaling verdict upgraded to Polystable or
// Stable when the splitting certifies it (all summands of weight zero and
// bricks), with a certificate attached to unstable verdicts.
StabilityVerdict assess_matrix_normal(const RepTuple& Y, std::uint64_t seed,
                                      const ScalingOptions& opts = {},
                                      const Tolerances& tols = default_tols());

const char* to_string(StabilityLevel level);

}  // namespace qmle
