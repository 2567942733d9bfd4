#include "qmle/sweep.hpp"

#include <array>
#include <atomic>
#include <chrono>
#include <future>

namespace qmle {

EmpiricalOutcome expected_outcome(const MnmVerdict& v) {
    switch (v.outcome) {
        case MnmOutcome::LikelihoodUnbounded: return EmpiricalOutcome::Unbounded;
        case MnmOutcome::MleExistsNotAlmostSurelyUnique:
            return EmpiricalOutcome::ExistsNotUnique;
        case MnmOutcome::MleExistsUniqueAS: return EmpiricalOutcome::ExistsUnique;
    }
    return EmpiricalOutcome::Inconclusive;
}

double SweepReport::worst_match_rate() const {
    double worst = 1.0;
    for (const auto& c : cells)
        if (!c.informational) worst = std::min(worst, c.match_rate);
    return worst;
}

namespace {

CellRecord run_cell(const SweepConfig& cfg, long long p, long long q, long long m) {
    const auto t0 = std::chrono::steady_clock::now();
    CellRecord cell;
    cell.p = p;
    cell.q = q;
    cell.m = m;
    cell.theory = (cfg.model == Model::MatrixNormal)
                      ? classify_mnm(p, q, m)
                      : classify_propcov(p, q, m);
    cell.informational = cell.theory.indeterminate_real_case;
    const EmpiricalOutcome want = expected_outcome(cell.theory);

    long long iter_total = 0;
    int matches = 0;
    for (int t = 0; t < cfg.trials; ++t) {
        const std::uint64_t trial_seed = derive_seed(
            cfg.master_seed, {(std::uint64_t)p, (std::uint64_t)q, (std::uint64_t)m,
                              (std::uint64_t)t});
        const RepTuple Y = sample_gaussian(static_cast<int>(p), static_cast<int>(q),
                                           static_cast<int>(m), cfg.field, trial_seed);
        EmpiricalOptions eopts = cfg.empirical;
        eopts.seed = derive_seed(trial_seed, {0xc1a551fu});
        const EmpiricalVerdict v = classify_empirical(Y, cfg.model, eopts, cfg.tols);

        switch (v.outcome) {
            case EmpiricalOutcome::Unbounded: ++cell.n_unbounded; break;
            case EmpiricalOutcome::ExistsNotUnique: ++cell.n_not_unique; break;
            case EmpiricalOutcome::ExistsUnique: ++cell.n_unique; break;
            case EmpiricalOutcome::Inconclusive: ++cell.n_inconclusive; break;
        }
        if (v.indecomposable_over_R == IndecCheck::Failed) ++cell.indec_checks_failed;
        if (v.outcome == want) ++matches;
        iter_total += v.iterations;
    }
    cell.match_rate = cfg.trials > 0 ? static_cast<double>(matches) / cfg.trials : 1.0;
    cell.mean_iterations =
        cfg.trials > 0 ? static_cast<double>(iter_total) / cfg.trials : 0.0;
    cell.runtime_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    return cell;
}

}  // namespace

SweepReport run_sweep(const SweepConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("run_sweep: trials must be >= 1");
    SweepReport rep;
    rep.model = cfg.model;
    rep.field = cfg.field;
    rep.master_seed = cfg.master_seed;
    rep.trials = cfg.trials;

    std::vector<std::array<long long, 3>> cells;
    for (long long p = cfg.p.lo; p <= cfg.p.hi; ++p)
        for (long long q = cfg.q.lo; q <= cfg.q.hi; ++q)
            for (long long m = cfg.m.lo; m <= cfg.m.hi; ++m) cells.push_back({p, q, m});
    rep.cells.resize(cells.size());

    const int threads = std::max(1, cfg.threads);
    if (threads == 1) {
        for (size_t i = 0; i < cells.size(); ++i)
            rep.cells[i] = run_cell(cfg, cells[i][0], cells[i][1], cells[i][2]);
        return rep;
    }

    // Per-trial seeds make cell outcomes independent of scheduling.
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            rep.cells[i] = run_cell(cfg, cells[i][0], cells[i][1], cells[i][2]);
        }
    };
    std::vector<std::future<void>> futs;
    for (int t = 0; t < threads; ++t) futs.push_back(std::async(std::launch::async, worker));
    for (auto& f : futs) f.get();
    return rep;
}

SweepReport dkh_table(const DkhOptions& opts) {
    SweepConfig cfg;
    cfg.model = Model::MatrixNormal;
    cfg.field = Field::Real;
    cfg.q = {4, 4};
    cfg.m = {2, 2};
    cfg.trials = opts.trials;
    cfg.master_seed = opts.master_seed;
    cfg.empirical.n_starts = opts.n_starts;
    cfg.threads = opts.threads;

    SweepReport rep;
    rep.model = cfg.model;
    rep.field = cfg.field;
    rep.master_seed = cfg.master_seed;
    rep.trials = cfg.trials;
    for (long long p : {5, 6, 7, 8}) {
        cfg.p = {p, p};
        SweepReport row = run_sweep(cfg);
        rep.cells.insert(rep.cells.end(), row.cells.begin(), row.cells.end());
    }
    return rep;
}

}  // namespace qmle
