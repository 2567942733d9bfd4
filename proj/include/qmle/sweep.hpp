#pragma once

#include <string>
#include <vector>

#include "qmle/flipflop.hpp"

namespace qmle {

struct Range {
    long long lo = 1;
    long long hi = 1;
    bool empty() const { return hi < lo; }
};

struct SweepConfig {
    Model model = Model::MatrixNormal;
    Range p{1, 4}, q{1, 4}, m{1, 4};
    int trials = 50;
    std::uint64_t master_seed = kDefaultSeed;
    Field field = Field::Real;
    Tolerances tols;
    EmpiricalOptions empirical;
    double alarm_rate = 0.99;  // per-cell agreement below this trips exit code 2
    int threads = 1;
};

struct CellRecord {
    long long p = 0, q = 0, m = 0;
    MnmVerdict theory;
    int n_unbounded = 0, n_not_unique = 0, n_unique = 0, n_inconclusive = 0;
    int indec_checks_failed = 0;  // real unique verdicts with a decomposable split
    double match_rate = 0;
    bool informational = false;  // indeterminate cells are reported, not scored
    double mean_iterations = 0;
    double runtime_ms = 0;  // not serialized; reports must be seed-deterministic
};

struct SweepReport {
    int format_version = 1;
    Model model = Model::MatrixNormal;
    Field field = Field::Real;
    std::uint64_t master_seed = 0;
    int trials = 0;
    std::vector<CellRecord> cells;

    // Lowest scored match rate (1.0 for an empty report).
    double worst_match_rate() const;
    bool alarms(double alarm_rate) const { return worst_match_rate() < alarm_rate; }
};

// Monte Carlo comparison of the exact classification against the empirical
// classifier on Gaussian samples, cell by cell. Deterministic for a fixed
// master seed regardless of the thread count.
SweepReport run_sweep(const SweepConfig& cfg);

// The fixed four-row table: (5,4), (6,4), (7,4), (8,4) with two samples each,
// real Gaussian trials.
struct DkhOptions {
    int trials = 100;
    std::uint64_t master_seed = kDefaultSeed;
    int n_starts = 12;
    int threads = 1;
};

SweepReport dkh_table(const DkhOptions& opts = {});

EmpiricalOutcome expected_outcome(const MnmVerdict& v);

}  // namespace qmle
