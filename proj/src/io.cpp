#include "qmle/io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace qmle {

namespace {

Eigen::MatrixXd matrix_from_json(const json& j, int p, int q, const char* what) {
    Eigen::MatrixXd M(p, q);
    if (!j.is_array()) throw std::invalid_argument(std::string(what) + ": expected an array");
    if (!j.empty() && j[0].is_array()) {
        if (static_cast<int>(j.size()) != p)
            throw std::invalid_argument(std::string(what) + ": wrong row count");
        for (int i = 0; i < p; ++i) {
            if (static_cast<int>(j[i].size()) != q)
                throw std::invalid_argument(std::string(what) + ": wrong column count");
            for (int c = 0; c < q; ++c) M(i, c) = j[i][c].get<double>();
        }
    } else {
        if (static_cast<int>(j.size()) != p * q)
            throw std::invalid_argument(std::string(what) + ": wrong entry count");
        for (int i = 0; i < p; ++i)
            for (int c = 0; c < q; ++c) M(i, c) = j[i * q + c].get<double>();
    }
    return M;
}

json matrix_to_json(const Eigen::MatrixXd& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(i, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json cmatrix_to_json(const Eigen::MatrixXcd& M, bool imag) {
    return matrix_to_json(imag ? Eigen::MatrixXd(M.imag()) : Eigen::MatrixXd(M.real()));
}

json dim_to_json(const DimVec2& d) { return json::array({d.a, d.b}); }

json star_dim_to_json(const StarDimVec& d) {
    json arms = json::array();
    for (int a : d.arms) arms.push_back(a);
    return json{{"x", d.x}, {"arms", arms}};
}

}  // namespace

RepTuple rep_from_json(const json& j) {
    RepTuple Y;
    Y.p = j.at("p").get<int>();
    Y.q = j.at("q").get<int>();
    Y.m = j.at("m").get<int>();
    const std::string field = j.value("field", "real");
    if (field == "real")
        Y.field = Field::Real;
    else if (field == "complex")
        Y.field = Field::Complex;
    else
        throw std::invalid_argument("field must be \"real\" or \"complex\"");

    const auto& mats = j.at("matrices");
    if (static_cast<int>(mats.size()) != Y.m)
        throw std::invalid_argument("matrices: expected m entries");
    const bool has_imag = j.contains("matrices_imag");
    if (has_imag && Y.field == Field::Real)
        throw std::invalid_argument("matrices_imag given for a real tuple");
    for (int i = 0; i < Y.m; ++i) {
        Eigen::MatrixXcd M = matrix_from_json(mats[i], Y.p, Y.q, "matrices").cast<complexd>();
        if (has_imag)
            M.imag() = matrix_from_json(j.at("matrices_imag")[i], Y.p, Y.q, "matrices_imag");
        Y.matrices.push_back(std::move(M));
    }
    if (!Y.well_formed()) throw std::invalid_argument("malformed tuple");
    return Y;
}

json rep_to_json(const RepTuple& Y) {
    json j{{"p", Y.p}, {"q", Y.q}, {"m", Y.m},
           {"field", Y.field == Field::Real ? "real" : "complex"}};
    json mats = json::array();
    for (const auto& M : Y.matrices) mats.push_back(cmatrix_to_json(M, false));
    j["matrices"] = std::move(mats);
    if (Y.field == Field::Complex) {
        json imags = json::array();
        for (const auto& M : Y.matrices) imags.push_back(cmatrix_to_json(M, true));
        j["matrices_imag"] = std::move(imags);
    }
    return j;
}

RepTuple load_rep(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return rep_from_json(j);
}

void save_rep(const RepTuple& Y, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << rep_to_json(Y).dump(2) << "\n";
}

json to_json(const MnmVerdict& v) {
    return json{{"verdict", to_string(v.outcome)},
                {"indeterminate_real_case", v.indeterminate_real_case},
                {"holds_for_all_inputs", v.holds_for_all_inputs}};
}

json to_json(const ThresholdReport& r) {
    return json{{"model", to_string(r.model)}, {"p", r.p},         {"q", r.q},
                {"mlt_b", r.mlt_b},            {"mlt_e", r.mlt_e}, {"mlt_u", r.mlt_u}};
}

json to_json(const CanDec& c) {
    json summands = json::array();
    for (const auto& [d, mult] : c.summands)
        summands.push_back(json{{"dim", dim_to_json(d)}, {"multiplicity", mult}});
    return json{{"quiver", "kronecker"},
                {"m", c.m},
                {"p", c.p},
                {"q", c.q},
                {"summands", summands},
                {"exactness", c.exactness == Exactness::Exact ? "exact" : "numeric_generic"},
                {"confidence", c.confidence}};
}

json to_json(const StarCanDec& c) {
    json summands = json::array();
    for (const auto& [d, mult] : c.summands)
        summands.push_back(json{{"dim", star_dim_to_json(d)}, {"multiplicity", mult}});
    return json{{"quiver", "star"},
                {"m", c.m},
                {"p", c.p},
                {"q", c.q},
                {"summands", summands},
                {"exactness", c.exactness == Exactness::Exact ? "exact" : "numeric_generic"},
                {"confidence", c.confidence}};
}

json to_json(const OnePSCertificate& c) {
    json rw = json::array(), cw = json::array();
    for (Eigen::Index i = 0; i < c.row_weights.size(); ++i) rw.push_back(c.row_weights(i));
    for (Eigen::Index i = 0; i < c.col_weights.size(); ++i) cw.push_back(c.col_weights(i));
    return json{{"row_weights", rw},
                {"col_weights", cw},
                {"row_basis_real", cmatrix_to_json(c.row_basis, false)},
                {"row_basis_imag", cmatrix_to_json(c.row_basis, true)},
                {"col_basis_real", cmatrix_to_json(c.col_basis, false)},
                {"col_basis_imag", cmatrix_to_json(c.col_basis, true)}};
}

json to_json(const SummandSplit& s) {
    json dims = json::array();
    for (const auto& d : s.dims) dims.push_back(dim_to_json(d));
    return json{{"field", s.field == Field::Real ? "real" : "complex"},
                {"dims", dims},
                {"row_basis_real", cmatrix_to_json(s.row_basis, false)},
                {"row_basis_imag", cmatrix_to_json(s.row_basis, true)},
                {"col_basis_real", cmatrix_to_json(s.col_basis, false)},
                {"col_basis_imag", cmatrix_to_json(s.col_basis, true)}};
}

json to_json(const StabilityVerdict& v) {
    json j{{"conclusive", v.conclusive},
           {"level", to_string(v.level)},
           {"scaling_residual", v.scaling_residual},
           {"iterations", v.iterations}};
    if (v.witness) {
        json cols = json::array();
        for (int c : v.witness->columns) cols.push_back(c);
        j["witness"] = json{{"columns", cols}, {"rank", v.witness->rank}};
    }
    if (v.certificate) j["certificate"] = to_json(*v.certificate);
    if (!v.star_summands.empty()) {
        json s = json::array();
        for (const auto& d : v.star_summands) s.push_back(star_dim_to_json(d));
        j["star_summands"] = std::move(s);
    }
    if (v.split) j["split"] = to_json(*v.split);
    return j;
}

json to_json(const MleResult& r) {
    json j{{"status", to_string(r.status)},
           {"loglik", r.loglik},
           {"iterations", r.iterations},
           {"stationarity_residual", r.stationarity_residual}};
    j["psi1_real"] = cmatrix_to_json(r.pair.psi1, false);
    j["psi1_imag"] = cmatrix_to_json(r.pair.psi1, true);
    j["psi2_real"] = cmatrix_to_json(r.pair.psi2, false);
    j["psi2_imag"] = cmatrix_to_json(r.pair.psi2, true);
    j["history"] = r.history;
    return j;
}

json to_json(const UniquenessReport& r) {
    json j{{"outcome", to_string(r.outcome)},
           {"runs", r.runs},
           {"max_rel_distance", r.max_rel_distance}};
    if (r.outcome != ProbeOutcome::NotApplicable && r.representative.size() > 0)
        j["product_real"] = cmatrix_to_json(r.representative, false);
    if (r.outcome == ProbeOutcome::Disagree) {
        j["witness_a_real"] = cmatrix_to_json(r.witness_a, false);
        j["witness_b_real"] = cmatrix_to_json(r.witness_b, false);
    }
    return j;
}

json to_json(const EmpiricalVerdict& v) {
    const char* indec = v.indecomposable_over_R == IndecCheck::NotRun
                            ? "not_run"
                            : (v.indecomposable_over_R == IndecCheck::Passed ? "passed"
                                                                             : "failed");
    return json{{"outcome", to_string(v.outcome)},
                {"stability", to_string(v.stability)},
                {"stability_conclusive", v.stability_conclusive},
                {"flipflop_status", to_string(v.flipflop_status)},
                {"probe", to_string(v.probe)},
                {"indecomposable_over_R", indec},
                {"iterations", v.iterations}};
}

json to_json(const SweepReport& r) {
    json cells = json::array();
    for (const auto& c : r.cells) {
        cells.push_back(json{{"p", c.p},
                             {"q", c.q},
                             {"m", c.m},
                             {"theory", to_json(c.theory)},
                             {"counts",
                              json{{"unbounded", c.n_unbounded},
                                   {"exists_not_unique", c.n_not_unique},
                                   {"exists_unique", c.n_unique},
                                   {"inconclusive", c.n_inconclusive}}},
                             {"indec_checks_failed", c.indec_checks_failed},
                             {"match_rate", c.match_rate},
                             {"informational", c.informational},
                             {"mean_iterations", c.mean_iterations}});
    }
    return json{{"format_version", r.format_version},
                {"model", to_string(r.model)},
                {"field", r.field == Field::Real ? "real" : "complex"},
                {"master_seed", r.master_seed},
                {"trials", r.trials},
                {"cells", cells}};
}

std::string sweep_csv(const SweepReport& r) {
    std::ostringstream out;
    out << "p,q,m,theory,unbounded,exists_not_unique,exists_unique,inconclusive,"
           "match_rate,informational,mean_iterations\n";
    for (const auto& c : r.cells) {
        out << c.p << ',' << c.q << ',' << c.m << ',' << to_string(c.theory.outcome) << ','
            << c.n_unbounded << ',' << c.n_not_unique << ',' << c.n_unique << ','
            << c.n_inconclusive << ',' << c.match_rate << ','
            << (c.informational ? 1 : 0) << ',' << c.mean_iterations << '\n';
    }
    return out.str();
}

std::string threshold_csv(const ThresholdReport& r) {
    std::ostringstream out;
    out << "model,p,q,mlt_b,mlt_e,mlt_u\n"
        << to_string(r.model) << ',' << r.p << ',' << r.q << ',' << r.mlt_b << ','
        << r.mlt_e << ',' << r.mlt_u << '\n';
    return out.str();
}

}  // namespace qmle
