// Command-line surface: exact thresholds, sample classification, canonical
// decomposition, stability checks, flip-flop MLE and Monte Carlo sweeps.
// Exit codes: 0 success, 1 configuration error, 2 theory/empirics mismatch
// above the alarm rate.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "qmle/candec.hpp"
#include "qmle/io.hpp"
#include "qmle/sweep.hpp"

using namespace qmle;

namespace {

std::uint64_t default_seed() {
    if (const char* env = std::getenv("QMLE_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
            throw CLI::ValidationError("QMLE_SEED", "not a valid unsigned integer");
        }
    }
    return kDefaultSeed;
}

void emit(const json& j, const std::string& format, const std::string& csv,
          const std::string& out_path) {
    std::string text = (format == "csv") ? csv : j.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open " + out_path);
        out << text;
    }
}

void add_tolerance_flags(CLI::App* cmd, Tolerances& tols) {
    cmd->add_option("--tol-rank", tols.rank, "singular value threshold (relative)");
    cmd->add_option("--tol-end", tols.end, "morphism residual tolerance");
    cmd->add_option("--tol-eig", tols.eig, "eigenvalue clustering tolerance");
    cmd->add_option("--tol-block", tols.block, "off-block mass tolerance");
    cmd->add_option("--tol-collapse", tols.collapse, "blow-down threshold");
    cmd->add_option("--tol-stat", tols.stat, "stationarity residual tolerance");
    cmd->add_option("--tol-unique", tols.unique, "MLE product comparison tolerance");
}

Model parse_model(const std::string& s) {
    if (s == "mnm") return Model::MatrixNormal;
    if (s == "propcov") return Model::ProportionalCovariance;
    throw CLI::ValidationError("--model", "must be mnm or propcov");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Maximum-likelihood thresholds and stability checks for matrix normal "
                 "and proportional-covariance models"};
    app.require_subcommand(1);

    std::string format = "json";
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    std::string out_path;
    app.add_option("--out", out_path, "write output to a file instead of stdout");

    // thresholds --model {mnm|propcov} --p P --q Q
    auto* cmd_thresholds = app.add_subcommand("thresholds", "exact threshold functions");
    std::string th_model = "mnm";
    long long th_p = 1, th_q = 1;
    cmd_thresholds->add_option("--model", th_model)->check(CLI::IsMember({"mnm", "propcov"}));
    cmd_thresholds->add_option("--p", th_p)->required()->check(CLI::PositiveNumber);
    cmd_thresholds->add_option("--q", th_q)->required()->check(CLI::PositiveNumber);

    // classify --model M --p P --q Q --m M
    auto* cmd_classify = app.add_subcommand("classify", "sample-size classification");
    std::string cl_model = "mnm";
    long long cl_p = 1, cl_q = 1, cl_m = 1;
    cmd_classify->add_option("--model", cl_model)->check(CLI::IsMember({"mnm", "propcov"}));
    cmd_classify->add_option("--p", cl_p)->required()->check(CLI::PositiveNumber);
    cmd_classify->add_option("--q", cl_q)->required()->check(CLI::PositiveNumber);
    cmd_classify->add_option("--m", cl_m)->required()->check(CLI::PositiveNumber);

    // candec --m M --p P --q Q [--numeric --seed S] [--quiver kronecker|star]
    auto* cmd_candec = app.add_subcommand("candec", "canonical decomposition");
    int cd_m = 1;
    long long cd_p = 1, cd_q = 1;
    bool cd_numeric = false;
    std::uint64_t cd_seed = default_seed();
    std::string cd_quiver = "kronecker";
    Tolerances cd_tols;
    cmd_candec->add_option("--m", cd_m)->required()->check(CLI::PositiveNumber);
    cmd_candec->add_option("--p", cd_p)->required()->check(CLI::PositiveNumber);
    cmd_candec->add_option("--q", cd_q)->required()->check(CLI::PositiveNumber);
    cmd_candec->add_flag("--numeric", cd_numeric,
                         "confirm the result on random samples even when exact");
    cmd_candec->add_option("--seed", cd_seed);
    cmd_candec->add_option("--quiver", cd_quiver)->check(CLI::IsMember({"kronecker", "star"}));
    add_tolerance_flags(cmd_candec, cd_tols);

    // stability --input FILE [--exact-star]
    auto* cmd_stability = app.add_subcommand("stability", "stability verdict for a tuple");
    std::string st_input;
    bool st_exact_star = false;
    std::uint64_t st_seed = default_seed();
    double st_eps = -1.0;
    int st_max_iter = 10000;
    Tolerances st_tols;
    cmd_stability->add_option("--input", st_input)->required()->check(CLI::ExistingFile);
    cmd_stability->add_flag("--exact-star", st_exact_star,
                            "exact star-quiver (proportional covariance) checker");
    cmd_stability->add_option("--seed", st_seed);
    cmd_stability->add_option("--eps", st_eps, "scaling imbalance target");
    cmd_stability->add_option("--max-iter", st_max_iter);
    add_tolerance_flags(cmd_stability, st_tols);

    // mle --input FILE [--starts N --tol T --max-iter K] [--model]
    auto* cmd_mle = app.add_subcommand("mle", "flip-flop MLE");
    std::string ml_input, ml_model = "mnm";
    int ml_starts = 1, ml_max_iter = 5000;
    double ml_tol = 1e-10;
    std::uint64_t ml_seed = default_seed();
    Tolerances ml_tols;
    cmd_mle->add_option("--input", ml_input)->required()->check(CLI::ExistingFile);
    cmd_mle->add_option("--model", ml_model)->check(CLI::IsMember({"mnm", "propcov"}));
    cmd_mle->add_option("--starts", ml_starts)->check(CLI::PositiveNumber);
    cmd_mle->add_option("--tol", ml_tol);
    cmd_mle->add_option("--max-iter", ml_max_iter);
    cmd_mle->add_option("--seed", ml_seed);
    add_tolerance_flags(cmd_mle, ml_tols);

    // sweep --config FILE | --p-max .. --q-max .. --m-max .. --trials N --seed S
    auto* cmd_sweep = app.add_subcommand("sweep", "Monte Carlo theory-vs-empirics sweep");
    std::string sw_config, sw_model = "mnm", sw_field = "real";
    long long sw_pmax = 4, sw_qmax = 4, sw_mmax = 4;
    long long sw_pmin = 1, sw_qmin = 1, sw_mmin = 1;
    int sw_trials = 50, sw_threads = 1, sw_starts = 12;
    double sw_alarm = 0.99;
    std::uint64_t sw_seed = default_seed();
    Tolerances sw_tols;
    cmd_sweep->add_option("--config", sw_config, "JSON sweep configuration")
        ->check(CLI::ExistingFile);
    cmd_sweep->add_option("--model", sw_model)->check(CLI::IsMember({"mnm", "propcov"}));
    cmd_sweep->add_option("--field", sw_field)->check(CLI::IsMember({"real", "complex"}));
    cmd_sweep->add_option("--p-max", sw_pmax)->check(CLI::PositiveNumber);
    cmd_sweep->add_option("--q-max", sw_qmax)->check(CLI::PositiveNumber);
    cmd_sweep->add_option("--m-max", sw_mmax)->check(CLI::PositiveNumber);
    cmd_sweep->add_option("--p-min", sw_pmin)->check(CLI::PositiveNumber);
    cmd_sweep->add_option("--q-min", sw_qmin)->check(CLI::PositiveNumber);
    cmd_sweep->add_option("--m-min", sw_mmin);
    cmd_sweep->add_option("--trials", sw_trials)->check(CLI::PositiveNumber);
    cmd_sweep->add_option("--seed", sw_seed);
    cmd_sweep->add_option("--threads", sw_threads)->check(CLI::PositiveNumber);
    cmd_sweep->add_option("--starts", sw_starts)->check(CLI::PositiveNumber);
    cmd_sweep->add_option("--alarm-rate", sw_alarm);
    add_tolerance_flags(cmd_sweep, sw_tols);

    // dkh
    auto* cmd_dkh = app.add_subcommand("dkh", "the four (p,4) two-sample rows");
    int dkh_trials = 100, dkh_threads = 1, dkh_starts = 12;
    std::uint64_t dkh_seed = default_seed();
    cmd_dkh->add_option("--trials", dkh_trials)->check(CLI::PositiveNumber);
    cmd_dkh->add_option("--seed", dkh_seed);
    cmd_dkh->add_option("--threads", dkh_threads)->check(CLI::PositiveNumber);
    cmd_dkh->add_option("--starts", dkh_starts)->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (cmd_thresholds->parsed()) {
            const auto r = parse_model(th_model) == Model::MatrixNormal
                               ? thresholds_mnm(th_p, th_q)
                               : thresholds_propcov(th_p, th_q);
            emit(to_json(r), format, threshold_csv(r), out_path);
        } else if (cmd_classify->parsed()) {
            const auto v = parse_model(cl_model) == Model::MatrixNormal
                               ? classify_mnm(cl_p, cl_q, cl_m)
                               : classify_propcov(cl_p, cl_q, cl_m);
            json j = to_json(v);
            j["p"] = cl_p;
            j["q"] = cl_q;
            j["m"] = cl_m;
            j["model"] = cl_model;
            emit(j, format, "", out_path);
        } else if (cmd_candec->parsed()) {
            json j;
            if (cd_quiver == "star") {
                j = to_json(candec_star(cd_p, cd_q, cd_m, cd_seed, cd_tols));
            } else {
                auto c = candec_kronecker(cd_m, cd_p, cd_q, cd_seed, cd_tols);
                j = to_json(c);
                if (cd_numeric && c.exactness == Exactness::Exact) {
                    // Cross-check the exact formula on random samples.
                    std::vector<std::pair<DimVec2, int>> observed;
                    for (int t = 0; t < kNumericTrials; ++t) {
                        const auto Y = sample_gaussian(
                            (int)cd_p, (int)cd_q, cd_m, Field::Complex,
                            derive_seed(cd_seed, {19u, (std::uint64_t)t}));
                        auto ms = dim_multiset(decompose_representation(
                            Y, derive_seed(cd_seed, {23u, (std::uint64_t)t}), cd_tols));
                        if (t == 0) observed = ms;
                        else if (ms != observed)
                            throw AmbiguousSplit("numeric confirmation trials disagree");
                    }
                    j["numeric_confirmed"] = (observed == c.summands);
                }
            }
            emit(j, format, "", out_path);
        } else if (cmd_stability->parsed()) {
            const RepTuple Y = load_rep(st_input);
            StabilityVerdict v;
            if (st_exact_star) {
                v = star_exact_stability(Y, st_tols);
            } else {
                ScalingOptions opts;
                opts.eps = st_eps;
                opts.max_iter = st_max_iter;
                v = assess_matrix_normal(Y, st_seed, opts, st_tols);
            }
            emit(to_json(v), format, "", out_path);
        } else if (cmd_mle->parsed()) {
            const RepTuple Y = load_rep(ml_input);
            const Model model = parse_model(ml_model);
            FlipFlopOptions opts;
            opts.tol = ml_tol;
            opts.max_iter = ml_max_iter;
            json j;
            try {
                const MleResult r = flip_flop(Y, model, opts, ml_tols);
                j = to_json(r);
                if (ml_starts >= 2)
                    j["uniqueness"] = to_json(
                        uniqueness_probe(Y, model, ml_starts, ml_seed, opts, ml_tols));
            } catch (const DegenerateSample& e) {
                j = json{{"status", "degenerate_sample"}, {"error", e.what()}};
            }
            emit(j, format, "", out_path);
        } else if (cmd_sweep->parsed()) {
            SweepConfig cfg;
            if (!sw_config.empty()) {
                std::ifstream in(sw_config);
                json j;
                in >> j;
                cfg.model = parse_model(j.value("model", "mnm"));
                cfg.field = j.value("field", "real") == std::string("complex")
                                ? Field::Complex
                                : Field::Real;
                cfg.p = {j.value("p_min", 1LL), j.value("p_max", 4LL)};
                cfg.q = {j.value("q_min", 1LL), j.value("q_max", 4LL)};
                cfg.m = {j.value("m_min", 1LL), j.value("m_max", 4LL)};
                cfg.trials = j.value("trials", 50);
                cfg.master_seed = j.value("seed", default_seed());
                cfg.alarm_rate = j.value("alarm_rate", 0.99);
                cfg.threads = j.value("threads", 1);
                cfg.empirical.n_starts = j.value("starts", 12);
            } else {
                cfg.model = parse_model(sw_model);
                cfg.field = sw_field == "complex" ? Field::Complex : Field::Real;
                cfg.p = {sw_pmin, sw_pmax};
                cfg.q = {sw_qmin, sw_qmax};
                cfg.m = {sw_mmin, sw_mmax};
                cfg.trials = sw_trials;
                cfg.master_seed = sw_seed;
                cfg.alarm_rate = sw_alarm;
                cfg.threads = sw_threads;
                cfg.empirical.n_starts = sw_starts;
                cfg.tols = sw_tols;
            }
            const SweepReport rep = run_sweep(cfg);
            emit(to_json(rep), format, sweep_csv(rep), out_path);
            if (rep.alarms(cfg.alarm_rate)) {
                std::cerr << "sweep: match rate " << rep.worst_match_rate()
                          << " below alarm rate " << cfg.alarm_rate << "\n";
                return 2;
            }
        } else if (cmd_dkh->parsed()) {
            DkhOptions opts;
            opts.trials = dkh_trials;
            opts.master_seed = dkh_seed;
            opts.threads = dkh_threads;
            opts.n_starts = dkh_starts;
            const SweepReport rep = dkh_table(opts);
            for (const auto& c : rep.cells) {
                std::cerr << "(" << c.p << "," << c.q << ") m=" << c.m
                          << "  theory=" << to_string(c.theory.outcome)
                          << "  empirical: unbounded=" << c.n_unbounded
                          << " not_unique=" << c.n_not_unique << " unique=" << c.n_unique
                          << " inconclusive=" << c.n_inconclusive
                          << "  match=" << c.match_rate << "\n";
            }
            emit(to_json(rep), format, sweep_csv(rep), out_path);
            if (rep.alarms(0.99)) return 2;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
