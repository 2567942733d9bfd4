#include "qmle/decompose.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "qmle/linalg.hpp"

namespace qmle {

namespace {

constexpr int kMaxDrawsReal = 14;
constexpr int kMaxDrawsComplex = 5;
// Clusters separated by less than this multiple of the clustering tolerance
// are treated as numerically ambiguous rather than silently split.
constexpr double kGapGuard = 10.0;

struct Cluster {
    std::vector<int> row_evs;  // indices into the A-spectrum
    std::vector<int> col_evs;  // indices into the B-spectrum
};

// Single-linkage clustering of the joint spectrum. Over the reals, an
// eigenvalue and the conjugate of another are also linked so every cluster is
// closed under conjugation.
std::vector<std::vector<int>> cluster_values(const std::vector<complexd>& vals, double tol,
                                             bool conjugate_pairs, double* min_gap_out) {
    const int n = static_cast<int>(vals.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    auto unite = [&](int i, int j) { parent[find(i)] = find(j); };

    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (std::abs(vals[i] - vals[j]) <= tol) unite(i, j);
            if (conjugate_pairs && std::abs(vals[i] - std::conj(vals[j])) <= tol) unite(i, j);
        }
    }

    std::map<int, std::vector<int>> groups;
    for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
    std::vector<std::vector<int>> clusters;
    for (auto& [root, members] : groups) clusters.push_back(std::move(members));

    double min_gap = std::numeric_limits<double>::infinity();
    for (size_t a = 0; a < clusters.size(); ++a) {
        for (size_t b = a + 1; b < clusters.size(); ++b) {
            for (int i : clusters[a]) {
                for (int j : clusters[b]) {
                    min_gap = std::min(min_gap, std::abs(vals[i] - vals[j]));
                    if (conjugate_pairs)
                        min_gap = std::min(min_gap, std::abs(vals[i] - std::conj(vals[j])));
                }
            }
        }
    }
    if (min_gap_out) *min_gap_out = min_gap;
    return clusters;
}

template <typename Scalar>
Eigen::VectorXcd spectrum(const DenseMatrix<Scalar>& M);

template <>
Eigen::VectorXcd spectrum<double>(const DenseMatrix<double>& M) {
    if (M.rows() == 0) return Eigen::VectorXcd(0);
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, /*computeEigenvectors=*/false);
    return es.eigenvalues();
}

template <>
Eigen::VectorXcd spectrum<complexd>(const DenseMatrix<complexd>& M) {
    if (M.rows() == 0) return Eigen::VectorXcd(0);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, /*computeEigenvectors=*/false);
    return es.eigenvalues();
}

// Basis of the invariant subspace of A belonging to a self-conjugate (in the
// real case) set of eigenvalues: the column space of the product of (A - t I)
// over the complementary eigenvalues, which kills every other generalized
// eigenspace. Each factor is normalized; only the column space matters.
template <typename Scalar>
DenseMatrix<Scalar> invariant_subspace(const DenseMatrix<Scalar>& A,
                                       const std::vector<complexd>& complement, int rank,
                                       double rank_tol) {
    const Eigen::Index n = A.rows();
    if (rank == 0) return DenseMatrix<Scalar>(n, 0);
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(n, n);
    const Eigen::MatrixXcd Ac = A.template cast<complexd>();
    for (const complexd& t : complement) {
        P = (Ac - t * Eigen::MatrixXcd::Identity(n, n)) * P;
        const double nrm = P.norm();
        if (nrm > 0) P /= nrm;
    }
    DenseMatrix<Scalar> Pf;
    if constexpr (std::is_same_v<Scalar, double>)
        Pf = P.real();  // complement is self-conjugate, so P is real up to roundoff
    else
        Pf = P;
    return column_space<Scalar>(Pf, rank_tol, rank);
}

template <typename Scalar>
struct SplitResult {
    std::vector<DimVec2> dims;
    DenseMatrix<Scalar> G;
    DenseMatrix<Scalar> H;
};

template <typename Scalar>
SplitResult<Scalar> trivial_split(int p, int q) {
    SplitResult<Scalar> r;
    r.G = DenseMatrix<Scalar>::Identity(p, p);
    r.H = DenseMatrix<Scalar>::Identity(q, q);
    for (int i = 0; i < p; ++i) r.dims.push_back({1, 0});
    for (int j = 0; j < q; ++j) r.dims.push_back({0, 1});
    return r;
}

template <typename Scalar>
SplitResult<Scalar> decompose_impl(const std::vector<DenseMatrix<Scalar>>& mats, int p, int q,
                                   std::mt19937_64& eng, const Tolerances& tols) {
    SplitResult<Scalar> single;
    single.dims = {DimVec2{p, q}};
    single.G = DenseMatrix<Scalar>::Identity(p, p);
    single.H = DenseMatrix<Scalar>::Identity(q, q);
    if (p + q <= 1) return single;
    if (p == 0 || q == 0) return trivial_split<Scalar>(p, q);

    double mass = 0;
    for (const auto& M : mats) mass += M.squaredNorm();
    if (mass == 0) return trivial_split<Scalar>(p, q);

    const auto basis = detail::end_basis<Scalar>(mats, tols.rank);
    if (basis.size() <= 1) return single;  // brick, hence indecomposable

    const bool real_field = std::is_same_v<Scalar, double>;
    const int max_draws = real_field ? kMaxDrawsReal : kMaxDrawsComplex;
    int clean_single = 0;
    int ambiguous = 0;
    double worst_gap = std::numeric_limits<double>::infinity();
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (int draw = 0; draw < max_draws; ++draw) {
        DenseMatrix<Scalar> A = DenseMatrix<Scalar>::Zero(p, p);
        DenseMatrix<Scalar> B = DenseMatrix<Scalar>::Zero(q, q);
        for (const auto& [Ab, Bb] : basis) {
            Scalar c;
            if constexpr (std::is_same_v<Scalar, double>)
                c = gauss(eng);
            else
                c = complexd(gauss(eng), gauss(eng));
            A += c * Ab;
            B += c * Bb;
        }

        const Eigen::VectorXcd evA = spectrum<Scalar>(A);
        const Eigen::VectorXcd evB = spectrum<Scalar>(B);
        std::vector<complexd> vals;
        vals.reserve(p + q);
        for (int i = 0; i < p; ++i) vals.push_back(evA(i));
        for (int j = 0; j < q; ++j) vals.push_back(evB(j));

        double scale = 0;
        for (const auto& v : vals) scale = std::max(scale, std::abs(v));
        if (scale == 0) {
            ++clean_single;
            continue;
        }

        double min_gap = 0;
        const auto clusters =
            cluster_values(vals, tols.eig * scale, real_field, &min_gap);
        if (clusters.size() == 1) {
            ++clean_single;
            continue;
        }
        if (min_gap < kGapGuard * tols.eig * scale) {
            ++ambiguous;
            worst_gap = std::min(worst_gap, min_gap / scale);
            continue;
        }

        // Per-cluster invariant subspaces on both sides.
        bool bad = false;
        std::vector<DenseMatrix<Scalar>> Us, Ws;
        std::vector<int> adim, bdim;
        for (const auto& cl : clusters) {
            std::vector<complexd> complement_A, complement_B;
            int a_c = 0, b_c = 0;
            std::vector<char> in_cluster(p + q, 0);
            for (int idx : cl) in_cluster[idx] = 1;
            for (int i = 0; i < p; ++i) {
                if (in_cluster[i]) ++a_c;
                else complement_A.push_back(vals[i]);
            }
            for (int j = 0; j < q; ++j) {
                if (in_cluster[p + j]) ++b_c;
                else complement_B.push_back(vals[p + j]);
            }
            Us.push_back(invariant_subspace<Scalar>(A, complement_A, a_c, tols.rank));
            Ws.push_back(invariant_subspace<Scalar>(B, complement_B, b_c, tols.rank));
            adim.push_back(a_c);
            bdim.push_back(b_c);
        }

        DenseMatrix<Scalar> G(p, p), H(q, q);
        int col = 0;
        for (const auto& U : Us) {
            G.middleCols(col, U.cols()) = U;
            col += static_cast<int>(U.cols());
        }
        col = 0;
        for (const auto& W : Ws) {
            H.middleCols(col, W.cols()) = W;
            col += static_cast<int>(W.cols());
        }

        Eigen::JacobiSVD<DenseMatrix<Scalar>> svdG(G), svdH(H);
        const double condG = svdG.singularValues()(0) /
                             std::max(svdG.singularValues()(p - 1), 1e-300);
        const double condH = svdH.singularValues()(0) /
                             std::max(svdH.singularValues()(q - 1), 1e-300);
        if (condG > 1e10 || condH > 1e10) {
            ++ambiguous;
            continue;
        }

        // Verify the block structure before trusting the split.
        auto Gsolver = G.partialPivLu();
        std::vector<DenseMatrix<Scalar>> Z;
        Z.reserve(mats.size());
        double znorm2 = 0, off2 = 0;
        for (const auto& M : mats) {
            Z.push_back(Gsolver.solve(M * H));
            znorm2 += Z.back().squaredNorm();
        }
        for (const auto& Zi : Z) {
            int r0 = 0;
            for (size_t ci = 0; ci < Us.size(); ++ci) {
                int c0 = 0;
                for (size_t cj = 0; cj < Ws.size(); ++cj) {
                    if (ci != cj)
                        off2 += Zi.block(r0, c0, adim[ci], bdim[cj]).squaredNorm();
                    c0 += bdim[cj];
                }
                r0 += adim[ci];
            }
        }
        if (off2 > tols.block * tols.block * znorm2) {
            ++ambiguous;
            continue;
        }

        // Recurse into the diagonal blocks and compose the bases.
        SplitResult<Scalar> out;
        out.G = DenseMatrix<Scalar>(p, p);
        out.H = DenseMatrix<Scalar>(q, q);
        int row0 = 0, col0 = 0;
        for (size_t c = 0; c < Us.size(); ++c) {
            std::vector<DenseMatrix<Scalar>> sub;
            sub.reserve(Z.size());
            for (const auto& Zi : Z) sub.push_back(Zi.block(row0, col0, adim[c], bdim[c]));
            SplitResult<Scalar> inner = decompose_impl<Scalar>(sub, adim[c], bdim[c], eng, tols);
            out.G.middleCols(row0, adim[c]) = Us[c] * inner.G;
            out.H.middleCols(col0, bdim[c]) = Ws[c] * inner.H;
            out.dims.insert(out.dims.end(), inner.dims.begin(), inner.dims.end());
            row0 += adim[c];
            col0 += bdim[c];
        }
        return out;
    }

    if (clean_single >= 2 && ambiguous <= clean_single) return single;
    throw AmbiguousSplit("eigenvalue clusters not separated at the clustering tolerance",
                         worst_gap);
}

}  // namespace

SummandSplit decompose_representation(const RepTuple& Y, std::uint64_t rng_seed,
                                      const Tolerances& tols) {
    if (!Y.well_formed())
        throw std::invalid_argument("decompose_representation: malformed tuple");
    auto eng = make_engine(rng_seed);
    SummandSplit out;
    out.field = Y.field;
    if (Y.field == Field::Real) {
        auto r = decompose_impl<double>(Y.real_matrices(), Y.p, Y.q, eng, tols);
        out.dims = std::move(r.dims);
        out.row_basis = r.G.cast<complexd>();
        out.col_basis = r.H.cast<complexd>();
    } else {
        auto r = decompose_impl<complexd>(
            std::vector<Eigen::MatrixXcd>(Y.matrices.begin(), Y.matrices.end()), Y.p, Y.q,
            eng, tols);
        out.dims = std::move(r.dims);
        out.row_basis = std::move(r.G);
        out.col_basis = std::move(r.H);
    }
    return out;
}

std::vector<std::pair<DimVec2, int>> dim_multiset(const SummandSplit& split) {
    std::map<DimVec2, int> counts;
    for (const auto& d : split.dims) counts[d]++;
    return {counts.begin(), counts.end()};
}

double off_block_mass(const RepTuple& Y, const SummandSplit& split) {
    auto solver = split.row_basis.partialPivLu();
    double off2 = 0, tot2 = 0;
    for (const auto& M : Y.matrices) {
        Eigen::MatrixXcd Z = solver.solve(M * split.col_basis);
        tot2 += Z.squaredNorm();
        int r0 = 0;
        for (size_t i = 0; i < split.dims.size(); ++i) {
            int c0 = 0;
            for (size_t j = 0; j < split.dims.size(); ++j) {
                if (i != j)
                    off2 += Z.block(r0, c0, split.dims[i].a, split.dims[j].b).squaredNorm();
                c0 += static_cast<int>(split.dims[j].b);
            }
            r0 += static_cast<int>(split.dims[i].a);
        }
    }
    return tot2 > 0 ? std::sqrt(off2 / tot2) : 0.0;
}

namespace {

// Star-quiver decomposition. Arms are one-dimensional, so an endomorphism is
// a matrix A at the sink plus one scalar per arm; the split groups arms with
// the A-eigenvalue cluster their scalar lands in.
template <typename Scalar>
void star_decompose_rec(const std::vector<DenseMatrix<Scalar>>& mats, int p,
                        const std::vector<int>& arm_ids, int total_arms,
                        std::mt19937_64& eng, const Tolerances& tols,
                        std::vector<StarDimVec>& out) {
    const int q = static_cast<int>(arm_ids.size());
    auto emit = [&](long long x, const std::vector<int>& arms) {
        StarDimVec d;
        d.x = x;
        d.arms.assign(total_arms, 0);
        for (int j : arms) d.arms[j] = 1;
        out.push_back(std::move(d));
    };

    if (q == 0) {
        for (int i = 0; i < p; ++i) emit(1, {});
        return;
    }
    if (p == 0) {
        for (int j : arm_ids) emit(0, {j});
        return;
    }

    // Zero columns split off as (0, e_j) summands immediately.
    {
        std::vector<int> zero_arms, live_arms, live_pos;
        double mass = 0;
        for (const auto& M : mats) mass += M.squaredNorm();
        const double col_tol = tols.rank * std::sqrt(std::max(mass, 1e-300));
        for (int j = 0; j < q; ++j) {
            double cn = 0;
            for (const auto& M : mats) cn += M.col(j).squaredNorm();
            if (std::sqrt(cn) <= col_tol) {
                zero_arms.push_back(arm_ids[j]);
            } else {
                live_arms.push_back(arm_ids[j]);
                live_pos.push_back(j);
            }
        }
        if (!zero_arms.empty()) {
            for (int j : zero_arms) emit(0, {j});
            std::vector<DenseMatrix<Scalar>> sub;
            for (const auto& M : mats) {
                DenseMatrix<Scalar> S(p, static_cast<int>(live_pos.size()));
                for (size_t c = 0; c < live_pos.size(); ++c) S.col(c) = M.col(live_pos[c]);
                sub.push_back(std::move(S));
            }
            star_decompose_rec<Scalar>(sub, p, live_arms, total_arms, eng, tols, out);
            return;
        }
    }

    const auto basis = detail::star_end_basis<Scalar>(mats, tols.rank);
    if (basis.size() <= 1) {
        emit(p, arm_ids);
        return;
    }

    const bool real_field = std::is_same_v<Scalar, double>;
    const int max_draws = real_field ? kMaxDrawsReal : kMaxDrawsComplex;
    int clean_single = 0;
    double worst_gap = std::numeric_limits<double>::infinity();
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (int draw = 0; draw < max_draws; ++draw) {
        DenseMatrix<Scalar> A = DenseMatrix<Scalar>::Zero(p, p);
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1> b =
            Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(q);
        for (const auto& [Ab, bb] : basis) {
            Scalar c;
            if constexpr (std::is_same_v<Scalar, double>)
                c = gauss(eng);
            else
                c = complexd(gauss(eng), gauss(eng));
            A += c * Ab;
            b += c * bb;
        }

        const Eigen::VectorXcd evA = spectrum<Scalar>(A);
        std::vector<complexd> vals;
        for (int i = 0; i < p; ++i) vals.push_back(evA(i));
        for (int j = 0; j < q; ++j) vals.push_back(complexd(b(j)));

        double scale = 0;
        for (const auto& v : vals) scale = std::max(scale, std::abs(v));
        if (scale == 0) {
            ++clean_single;
            continue;
        }
        double min_gap = 0;
        const auto clusters = cluster_values(vals, tols.eig * scale, real_field, &min_gap);
        if (clusters.size() == 1) {
            ++clean_single;
            continue;
        }
        if (min_gap < kGapGuard * tols.eig * scale) {
            worst_gap = std::min(worst_gap, min_gap / scale);
            continue;
        }

        std::vector<DenseMatrix<Scalar>> Us;
        std::vector<std::vector<int>> cluster_arms;  // positions within mats
        std::vector<int> adim;
        for (const auto& cl : clusters) {
            std::vector<char> in_cluster(p + q, 0);
            for (int idx : cl) in_cluster[idx] = 1;
            std::vector<complexd> complement;
            int a_c = 0;
            for (int i = 0; i < p; ++i) {
                if (in_cluster[i]) ++a_c;
                else complement.push_back(vals[i]);
            }
            std::vector<int> arms;
            for (int j = 0; j < q; ++j)
                if (in_cluster[p + j]) arms.push_back(j);
            Us.push_back(invariant_subspace<Scalar>(A, complement, a_c, tols.rank));
            cluster_arms.push_back(std::move(arms));
            adim.push_back(a_c);
        }

        DenseMatrix<Scalar> G(p, p);
        int col = 0;
        for (const auto& U : Us) {
            G.middleCols(col, U.cols()) = U;
            col += static_cast<int>(U.cols());
        }
        Eigen::JacobiSVD<DenseMatrix<Scalar>> svdG(G);
        if (svdG.singularValues()(0) /
                std::max(svdG.singularValues()(p - 1), 1e-300) > 1e10)
            continue;

        auto solver = G.partialPivLu();
        std::vector<DenseMatrix<Scalar>> Z;
        double znorm2 = 0, off2 = 0;
        for (const auto& M : mats) {
            Z.push_back(solver.solve(M));
            znorm2 += Z.back().squaredNorm();
        }
        for (const auto& Zi : Z) {
            int r0 = 0;
            for (size_t ci = 0; ci < Us.size(); ++ci) {
                for (size_t cj = 0; cj < cluster_arms.size(); ++cj) {
                    if (ci == cj) continue;
                    for (int j : cluster_arms[cj])
                        off2 += Zi.col(j).segment(r0, adim[ci]).squaredNorm();
                }
                r0 += adim[ci];
            }
        }
        if (off2 > tols.block * tols.block * znorm2) continue;

        int r0 = 0;
        for (size_t c = 0; c < Us.size(); ++c) {
            std::vector<DenseMatrix<Scalar>> sub;
            std::vector<int> sub_ids;
            for (int j : cluster_arms[c]) sub_ids.push_back(arm_ids[j]);
            for (const auto& Zi : Z) {
                DenseMatrix<Scalar> S(adim[c], static_cast<int>(cluster_arms[c].size()));
                for (size_t k = 0; k < cluster_arms[c].size(); ++k)
                    S.col(k) = Zi.col(cluster_arms[c][k]).segment(r0, adim[c]);
                sub.push_back(std::move(S));
            }
            star_decompose_rec<Scalar>(sub, adim[c], sub_ids, total_arms, eng, tols, out);
            r0 += adim[c];
        }
        return;
    }

    if (clean_single >= 2) {
        emit(p, arm_ids);
        return;
    }
    throw AmbiguousSplit("star split: eigenvalue clusters not separated", worst_gap);
}

}  // namespace

std::vector<StarDimVec> star_decompose_dims(const RepTuple& Y, std::uint64_t rng_seed,
                                            const Tolerances& tols) {
    if (!Y.well_formed()) throw std::invalid_argument("star_decompose_dims: malformed tuple");
    auto eng = make_engine(rng_seed);
    std::vector<int> ids(Y.q);
    std::iota(ids.begin(), ids.end(), 0);
    std::vector<StarDimVec> out;
    if (Y.field == Field::Real)
        star_decompose_rec<double>(Y.real_matrices(), Y.p, ids, Y.q, eng, tols, out);
    else
        star_decompose_rec<complexd>(
            std::vector<Eigen::MatrixXcd>(Y.matrices.begin(), Y.matrices.end()), Y.p, ids,
            Y.q, eng, tols, out);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace qmle
