#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "qmle/candec.hpp"
#include "qmle/endomorphism.hpp"
#include "qmle/io.hpp"
#include "qmle/sweep.hpp"

namespace py = pybind11;
using namespace qmle;

namespace {

RepTuple tuple_from_matrices(const std::vector<Eigen::MatrixXcd>& mats, Field field) {
    if (mats.empty()) throw std::invalid_argument("need at least one matrix");
    RepTuple Y;
    Y.m = static_cast<int>(mats.size());
    Y.p = static_cast<int>(mats[0].rows());
    Y.q = static_cast<int>(mats[0].cols());
    Y.field = field;
    Y.matrices = mats;
    if (field == Field::Real) {
        for (const auto& M : mats)
            if (M.imag().norm() > 0)
                throw std::invalid_argument("real tuple with nonzero imaginary part");
    }
    if (!Y.well_formed()) throw std::invalid_argument("malformed tuple");
    return Y;
}

}  // namespace

PYBIND11_MODULE(qmle, m) {
    m.doc() = "Maximum-likelihood thresholds for matrix normal models via quiver "
              "representations: exact threshold functions, stability checkers, "
              "canonical decomposition and the flip-flop MLE solver.";

    py::register_exception<ZeroVectorError>(m, "ZeroVectorError", PyExc_ValueError);
    py::register_exception<AmbiguousSplit>(m, "AmbiguousSplitError", PyExc_RuntimeError);
    py::register_exception<NoDestabilizer>(m, "NoDestabilizerError", PyExc_ValueError);
    py::register_exception<NotASubrepresentation>(m, "NotASubrepresentationError",
                                                  PyExc_ValueError);
    py::register_exception<EnumerationLimit>(m, "EnumerationLimitError", PyExc_ValueError);
    py::register_exception<DegenerateSample>(m, "DegenerateSampleError", PyExc_RuntimeError);
    py::register_exception<InvalidCanDec>(m, "InvalidCanDecError", PyExc_ValueError);

    py::enum_<Field>(m, "Field").value("real", Field::Real).value("complex", Field::Complex);
    py::enum_<Model>(m, "Model")
        .value("matrix_normal", Model::MatrixNormal)
        .value("proportional_covariance", Model::ProportionalCovariance);
    py::enum_<RootClass>(m, "RootClass")
        .value("real", RootClass::Real)
        .value("isotropic", RootClass::Isotropic)
        .value("imaginary", RootClass::ImaginaryNonIsotropic)
        .value("not_root", RootClass::NotRoot);
    py::enum_<MnmOutcome>(m, "MnmOutcome")
        .value("unbounded", MnmOutcome::LikelihoodUnbounded)
        .value("exists_not_unique", MnmOutcome::MleExistsNotAlmostSurelyUnique)
        .value("exists_unique", MnmOutcome::MleExistsUniqueAS);
    py::enum_<StabilityLevel>(m, "StabilityLevel")
        .value("unstable", StabilityLevel::Unstable)
        .value("semistable", StabilityLevel::SemistableOnly)
        .value("polystable", StabilityLevel::Polystable)
        .value("stable", StabilityLevel::Stable);
    py::enum_<MleStatus>(m, "MleStatus")
        .value("converged", MleStatus::Converged)
        .value("diverged", MleStatus::Diverged)
        .value("max_iter_reached", MleStatus::MaxIterReached);
    py::enum_<ProbeOutcome>(m, "ProbeOutcome")
        .value("all_agree", ProbeOutcome::AllAgree)
        .value("disagree", ProbeOutcome::Disagree)
        .value("not_applicable", ProbeOutcome::NotApplicable);
    py::enum_<EmpiricalOutcome>(m, "EmpiricalOutcome")
        .value("unbounded", EmpiricalOutcome::Unbounded)
        .value("exists_not_unique", EmpiricalOutcome::ExistsNotUnique)
        .value("exists_unique", EmpiricalOutcome::ExistsUnique)
        .value("inconclusive", EmpiricalOutcome::Inconclusive);
    py::enum_<Exactness>(m, "Exactness")
        .value("exact", Exactness::Exact)
        .value("numeric_generic", Exactness::NumericGeneric);
    py::enum_<IndecCheck>(m, "IndecCheck")
        .value("not_run", IndecCheck::NotRun)
        .value("passed", IndecCheck::Passed)
        .value("failed", IndecCheck::Failed);

    py::class_<DimVec2>(m, "DimVec2")
        .def(py::init<long long, long long>(), py::arg("a"), py::arg("b"))
        .def_readwrite("a", &DimVec2::a)
        .def_readwrite("b", &DimVec2::b)
        .def("__eq__", [](const DimVec2& x, const DimVec2& y) { return x == y; })
        .def("__repr__", [](const DimVec2& d) {
            return "DimVec2(" + std::to_string(d.a) + ", " + std::to_string(d.b) + ")";
        });
    py::class_<Weight2>(m, "Weight2")
        .def(py::init<long long, long long>(), py::arg("sx"), py::arg("sy"))
        .def_readwrite("sx", &Weight2::sx)
        .def_readwrite("sy", &Weight2::sy)
        .def("__eq__", [](const Weight2& x, const Weight2& y) { return x == y; })
        .def("__repr__", [](const Weight2& w) {
            return "Weight2(" + std::to_string(w.sx) + ", " + std::to_string(w.sy) + ")";
        });
    py::class_<StarDimVec>(m, "StarDimVec")
        .def(py::init<>())
        .def_readwrite("x", &StarDimVec::x)
        .def_readwrite("arms", &StarDimVec::arms)
        .def("__eq__", [](const StarDimVec& a, const StarDimVec& b) { return a == b; });

    m.def("euler_form", &euler_form, py::arg("m"), py::arg("beta"), py::arg("gamma"));
    m.def("tits_form", &tits_form, py::arg("m"), py::arg("beta"));
    m.def("classify_root", &classify_root, py::arg("m"), py::arg("beta"));
    m.def("is_schur_root", &is_schur_root, py::arg("m"), py::arg("beta"));
    m.def("canonical_weight", &canonical_weight, py::arg("p"), py::arg("q"));
    m.def("weight_value", &weight_value, py::arg("sigma"), py::arg("beta"));

    py::class_<MnmVerdict>(m, "MnmVerdict")
        .def_readonly("outcome", &MnmVerdict::outcome)
        .def_readonly("indeterminate_real_case", &MnmVerdict::indeterminate_real_case)
        .def_readonly("holds_for_all_inputs", &MnmVerdict::holds_for_all_inputs)
        .def("__repr__", [](const MnmVerdict& v) {
            return std::string("MnmVerdict(") + to_string(v.outcome) + ")";
        });
    py::class_<ThresholdReport>(m, "ThresholdReport")
        .def_readonly("p", &ThresholdReport::p)
        .def_readonly("q", &ThresholdReport::q)
        .def_readonly("mlt_b", &ThresholdReport::mlt_b)
        .def_readonly("mlt_e", &ThresholdReport::mlt_e)
        .def_readonly("mlt_u", &ThresholdReport::mlt_u)
        .def_readonly("model", &ThresholdReport::model)
        .def("__repr__", [](const ThresholdReport& r) {
            return "ThresholdReport(mlt_b=" + std::to_string(r.mlt_b) +
                   ", mlt_e=" + std::to_string(r.mlt_e) +
                   ", mlt_u=" + std::to_string(r.mlt_u) + ")";
        });

    m.def("classify_mnm", &classify_mnm, py::arg("p"), py::arg("q"), py::arg("m"));
    m.def("thresholds_mnm", &thresholds_mnm, py::arg("p"), py::arg("q"));
    m.def("classify_propcov", &classify_propcov, py::arg("p"), py::arg("q"), py::arg("m"));
    m.def("thresholds_propcov", &thresholds_propcov, py::arg("p"), py::arg("q"));

    py::class_<Tolerances>(m, "Tolerances")
        .def(py::init<>())
        .def_readwrite("rank", &Tolerances::rank)
        .def_readwrite("end", &Tolerances::end)
        .def_readwrite("eig", &Tolerances::eig)
        .def_readwrite("block", &Tolerances::block)
        .def_readwrite("collapse", &Tolerances::collapse)
        .def_readwrite("stat", &Tolerances::stat)
        .def_readwrite("unique", &Tolerances::unique);

    py::class_<RepTuple>(m, "RepTuple")
        .def(py::init(&tuple_from_matrices), py::arg("matrices"),
             py::arg("field") = Field::Real)
        .def_readonly("p", &RepTuple::p)
        .def_readonly("q", &RepTuple::q)
        .def_readonly("m", &RepTuple::m)
        .def_readonly("field", &RepTuple::field)
        .def_readonly("matrices", &RepTuple::matrices)
        .def("norm", &RepTuple::norm)
        .def("__repr__", [](const RepTuple& Y) {
            return "RepTuple(p=" + std::to_string(Y.p) + ", q=" + std::to_string(Y.q) +
                   ", m=" + std::to_string(Y.m) + ")";
        });
    m.def("sample_gaussian", &sample_gaussian, py::arg("p"), py::arg("q"), py::arg("m"),
          py::arg("field") = Field::Real, py::arg("seed") = kDefaultSeed);

    py::class_<EndAlgebra>(m, "EndAlgebra")
        .def_readonly("dimension", &EndAlgebra::dimension)
        .def_readonly("basis", &EndAlgebra::basis);
    m.def("end_algebra", &end_algebra, py::arg("Y"), py::arg("tols") = default_tols());
    m.def("stabilizer_dimension", &stabilizer_dimension, py::arg("Y"),
          py::arg("tols") = default_tols());

    py::class_<SummandSplit>(m, "SummandSplit")
        .def_readonly("field", &SummandSplit::field)
        .def_readonly("dims", &SummandSplit::dims)
        .def_readonly("row_basis", &SummandSplit::row_basis)
        .def_readonly("col_basis", &SummandSplit::col_basis);
    m.def("decompose_representation", &decompose_representation, py::arg("Y"),
          py::arg("rng_seed") = kDefaultSeed, py::arg("tols") = default_tols());
    m.def("dim_multiset", &dim_multiset);
    m.def("off_block_mass", &off_block_mass);
    m.def("star_decompose_dims", &star_decompose_dims, py::arg("Y"),
          py::arg("rng_seed") = kDefaultSeed, py::arg("tols") = default_tols());

    py::class_<CanDec>(m, "CanDec")
        .def_readonly("m", &CanDec::m)
        .def_readonly("p", &CanDec::p)
        .def_readonly("q", &CanDec::q)
        .def_readonly("summands", &CanDec::summands)
        .def_readonly("exactness", &CanDec::exactness)
        .def_readonly("confidence", &CanDec::confidence);
    py::class_<StarCanDec>(m, "StarCanDec")
        .def_readonly("m", &StarCanDec::m)
        .def_readonly("p", &StarCanDec::p)
        .def_readonly("q", &StarCanDec::q)
        .def_readonly("summands", &StarCanDec::summands)
        .def_readonly("exactness", &StarCanDec::exactness)
        .def_readonly("confidence", &StarCanDec::confidence);
    m.def("candec_kronecker", &candec_kronecker, py::arg("m"), py::arg("p"), py::arg("q"),
          py::arg("seed") = kDefaultSeed, py::arg("tols") = default_tols());
    m.def("scale_candec", &scale_candec, py::arg("m"), py::arg("base"), py::arg("k"));
    m.def("candec_star", &candec_star, py::arg("p"), py::arg("q"), py::arg("m"),
          py::arg("seed") = kDefaultSeed, py::arg("tols") = default_tols());

    py::class_<OnePSCertificate>(m, "OnePSCertificate")
        .def_readonly("row_basis", &OnePSCertificate::row_basis)
        .def_readonly("col_basis", &OnePSCertificate::col_basis)
        .def_readonly("row_weights", &OnePSCertificate::row_weights)
        .def_readonly("col_weights", &OnePSCertificate::col_weights);
    py::class_<SubsetWitness>(m, "SubsetWitness")
        .def_readonly("columns", &SubsetWitness::columns)
        .def_readonly("rank", &SubsetWitness::rank);
    py::class_<StabilityVerdict>(m, "StabilityVerdict")
        .def_readonly("conclusive", &StabilityVerdict::conclusive)
        .def_readonly("level", &StabilityVerdict::level)
        .def_readonly("certificate", &StabilityVerdict::certificate)
        .def_readonly("witness", &StabilityVerdict::witness)
        .def_readonly("star_summands", &StabilityVerdict::star_summands)
        .def_readonly("scaling_residual", &StabilityVerdict::scaling_residual)
        .def_readonly("iterations", &StabilityVerdict::iterations);
    py::class_<ScalingOptions>(m, "ScalingOptions")
        .def(py::init<>())
        .def_readwrite("eps", &ScalingOptions::eps)
        .def_readwrite("max_iter", &ScalingOptions::max_iter);

    m.def("scaling_semistability", &scaling_semistability, py::arg("Y"),
          py::arg("opts") = ScalingOptions{}, py::arg("tols") = default_tols());
    m.def("star_exact_stability", &star_exact_stability, py::arg("Y"),
          py::arg("tols") = default_tols());
    m.def("build_one_ps", &build_one_ps, py::arg("Y"), py::arg("U"), py::arg("W"),
          py::arg("tols") = default_tols());
    m.def("verify_one_ps", &verify_one_ps, py::arg("Y"), py::arg("cert"),
          py::arg("tols") = default_tols());
    m.def("assess_matrix_normal", &assess_matrix_normal, py::arg("Y"),
          py::arg("seed") = kDefaultSeed, py::arg("opts") = ScalingOptions{},
          py::arg("tols") = default_tols());
    m.def("destabilizing_witness", &destabilizing_witness, py::arg("Y"), py::arg("split"));

    py::class_<ConcentrationPair>(m, "ConcentrationPair")
        .def(py::init([](const Eigen::MatrixXcd& p1, const Eigen::MatrixXcd& p2) {
                 return ConcentrationPair{p1, p2};
             }),
             py::arg("psi1"), py::arg("psi2"))
        .def_readwrite("psi1", &ConcentrationPair::psi1)
        .def_readwrite("psi2", &ConcentrationPair::psi2);
    m.def("identity_pair", &identity_pair, py::arg("p"), py::arg("q"));
    m.def("random_pair", &random_pair, py::arg("p"), py::arg("q"), py::arg("model"),
          py::arg("field"), py::arg("seed"));

    py::class_<FlipFlopOptions>(m, "FlipFlopOptions")
        .def(py::init<>())
        .def_readwrite("tol", &FlipFlopOptions::tol)
        .def_readwrite("max_iter", &FlipFlopOptions::max_iter)
        .def_readwrite("divergence_guard", &FlipFlopOptions::divergence_guard)
        .def_readwrite("cond_guard", &FlipFlopOptions::cond_guard);
    py::class_<MleResult>(m, "MleResult")
        .def_readonly("status", &MleResult::status)
        .def_readonly("pair", &MleResult::pair)
        .def_readonly("loglik", &MleResult::loglik)
        .def_readonly("iterations", &MleResult::iterations)
        .def_readonly("history", &MleResult::history)
        .def_readonly("stationarity_residual", &MleResult::stationarity_residual);
    m.def("log_likelihood", &log_likelihood, py::arg("Y"), py::arg("pair"));
    m.def(
        "flip_flop",
        [](const RepTuple& Y, Model model, std::optional<ConcentrationPair> init,
           const FlipFlopOptions& opts, const Tolerances& tols) {
            return init ? flip_flop(Y, model, *init, opts, tols)
                        : flip_flop(Y, model, opts, tols);
        },
        py::arg("Y"), py::arg("model") = Model::MatrixNormal,
        py::arg("init") = std::nullopt, py::arg("opts") = FlipFlopOptions{},
        py::arg("tols") = default_tols());

    py::class_<UniquenessReport>(m, "UniquenessReport")
        .def_readonly("outcome", &UniquenessReport::outcome)
        .def_readonly("representative", &UniquenessReport::representative)
        .def_readonly("witness_a", &UniquenessReport::witness_a)
        .def_readonly("witness_b", &UniquenessReport::witness_b)
        .def_readonly("max_rel_distance", &UniquenessReport::max_rel_distance)
        .def_readonly("runs", &UniquenessReport::runs);
    m.def("uniqueness_probe", &uniqueness_probe, py::arg("Y"), py::arg("model"),
          py::arg("n_starts"), py::arg("seed") = kDefaultSeed,
          py::arg("opts") = FlipFlopOptions{}, py::arg("tols") = default_tols());

    py::class_<EmpiricalOptions>(m, "EmpiricalOptions")
        .def(py::init<>())
        .def_readwrite("n_starts", &EmpiricalOptions::n_starts)
        .def_readwrite("seed", &EmpiricalOptions::seed)
        .def_readwrite("flipflop", &EmpiricalOptions::flipflop)
        .def_readwrite("scaling", &EmpiricalOptions::scaling);
    py::class_<EmpiricalVerdict>(m, "EmpiricalVerdict")
        .def_readonly("outcome", &EmpiricalVerdict::outcome)
        .def_readonly("stability", &EmpiricalVerdict::stability)
        .def_readonly("stability_conclusive", &EmpiricalVerdict::stability_conclusive)
        .def_readonly("flipflop_status", &EmpiricalVerdict::flipflop_status)
        .def_readonly("probe", &EmpiricalVerdict::probe)
        .def_readonly("indecomposable_over_R", &EmpiricalVerdict::indecomposable_over_R)
        .def_readonly("iterations", &EmpiricalVerdict::iterations);
    m.def("classify_empirical", &classify_empirical, py::arg("Y"), py::arg("model"),
          py::arg("opts") = EmpiricalOptions{}, py::arg("tols") = default_tols());

    py::class_<Range>(m, "Range")
        .def(py::init<long long, long long>(), py::arg("lo"), py::arg("hi"))
        .def_readwrite("lo", &Range::lo)
        .def_readwrite("hi", &Range::hi);
    py::class_<SweepConfig>(m, "SweepConfig")
        .def(py::init<>())
        .def_readwrite("model", &SweepConfig::model)
        .def_readwrite("p", &SweepConfig::p)
        .def_readwrite("q", &SweepConfig::q)
        .def_readwrite("m", &SweepConfig::m)
        .def_readwrite("trials", &SweepConfig::trials)
        .def_readwrite("master_seed", &SweepConfig::master_seed)
        .def_readwrite("field", &SweepConfig::field)
        .def_readwrite("tols", &SweepConfig::tols)
        .def_readwrite("empirical", &SweepConfig::empirical)
        .def_readwrite("alarm_rate", &SweepConfig::alarm_rate)
        .def_readwrite("threads", &SweepConfig::threads);
    py::class_<CellRecord>(m, "CellRecord")
        .def_readonly("p", &CellRecord::p)
        .def_readonly("q", &CellRecord::q)
        .def_readonly("m", &CellRecord::m)
        .def_readonly("theory", &CellRecord::theory)
        .def_readonly("n_unbounded", &CellRecord::n_unbounded)
        .def_readonly("n_not_unique", &CellRecord::n_not_unique)
        .def_readonly("n_unique", &CellRecord::n_unique)
        .def_readonly("n_inconclusive", &CellRecord::n_inconclusive)
        .def_readonly("indec_checks_failed", &CellRecord::indec_checks_failed)
        .def_readonly("match_rate", &CellRecord::match_rate)
        .def_readonly("informational", &CellRecord::informational)
        .def_readonly("mean_iterations", &CellRecord::mean_iterations);
    py::class_<SweepReport>(m, "SweepReport")
        .def_readonly("format_version", &SweepReport::format_version)
        .def_readonly("model", &SweepReport::model)
        .def_readonly("field", &SweepReport::field)
        .def_readonly("master_seed", &SweepReport::master_seed)
        .def_readonly("trials", &SweepReport::trials)
        .def_readonly("cells", &SweepReport::cells)
        .def("worst_match_rate", &SweepReport::worst_match_rate);
    m.def("run_sweep", &run_sweep, py::arg("cfg"),
          py::call_guard<py::gil_scoped_release>());
    py::class_<DkhOptions>(m, "DkhOptions")
        .def(py::init<>())
        .def_readwrite("trials", &DkhOptions::trials)
        .def_readwrite("master_seed", &DkhOptions::master_seed)
        .def_readwrite("n_starts", &DkhOptions::n_starts)
        .def_readwrite("threads", &DkhOptions::threads);
    m.def("dkh_table", &dkh_table, py::arg("opts") = DkhOptions{},
          py::call_guard<py::gil_scoped_release>());

    m.def("rep_to_json", [](const RepTuple& Y) { return rep_to_json(Y).dump(); });
    m.def("rep_from_json", [](const std::string& s) { return rep_from_json(json::parse(s)); });

    m.attr("DEFAULT_SEED") = kDefaultSeed;
}
