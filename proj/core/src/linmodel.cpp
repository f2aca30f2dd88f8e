#include "levyou/linmodel.hpp"

#include <cmath>
#include <limits>

#include "levyou/errors.hpp"

namespace levyou {

namespace {

// Diagonal Pade coefficient tables (Higham 2005).
constexpr double kPade3[] = {120.0, 60.0, 12.0, 1.0};
constexpr double kPade5[] = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr double kPade7[] = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                             25200.0,    1512.0,    56.0,      1.0};
constexpr double kPade9[] = {17643225600.0, 8821612800.0, 2075673600.0,
                             302702400.0,   30270240.0,   2162160.0,
                             110880.0,      3960.0,       90.0,
                             1.0};
constexpr double kPade13[] = {64764752532480000.0,
                              32382376266240000.0,
                              7771770303897600.0,
                              1187353796428800.0,
                              129060195264000.0,
                              10559470521600.0,
                              670442572800.0,
                              33522128640.0,
                              1323241920.0,
                              40840800.0,
                              960960.0,
                              16380.0,
                              182.0,
                              1.0};

// theta_m thresholds on ||A||_1 for double precision.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068;
constexpr double kTheta13 = 5.371920351148152;

// Solve (-U + V) X = (U + V) for the Pade quotient.
Eigen::MatrixXd pade_solve(const Eigen::MatrixXd& U, const Eigen::MatrixXd& V) {
    return (-U + V).partialPivLu().solve(U + V);
}

Eigen::MatrixXd pade_low_order(const Eigen::MatrixXd& M, const double* b, int m) {
    const int n = static_cast<int>(M.rows());
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd M2 = M * M;
    // U = M * (odd terms), V = even terms.
    Eigen::MatrixXd Uacc = b[1] * I;
    Eigen::MatrixXd Vacc = b[0] * I;
    Eigen::MatrixXd P = I;  // M^{2k}
    for (int k = 1; 2 * k <= m; ++k) {
        P = P * M2;
        Vacc += b[2 * k] * P;
        if (2 * k + 1 <= m) Uacc += b[2 * k + 1] * P;
    }
    return pade_solve(M * Uacc, Vacc);
}

Eigen::MatrixXd pade13(const Eigen::MatrixXd& M) {
    const int n = static_cast<int>(M.rows());
    const double* b = kPade13;
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd M2 = M * M;
    const Eigen::MatrixXd M4 = M2 * M2;
    const Eigen::MatrixXd M6 = M4 * M2;
    const Eigen::MatrixXd U =
        M * (M6 * (b[13] * M6 + b[11] * M4 + b[9] * M2) + b[7] * M6 +
             b[5] * M4 + b[3] * M2 + b[1] * I);
    const Eigen::MatrixXd V = M6 * (b[12] * M6 + b[10] * M4 + b[8] * M2) +
                              b[6] * M6 + b[4] * M4 + b[2] * M2 + b[0] * I;
    return pade_solve(U, V);
}

}  // namespace

void OUModel::validate() const {
    if (A.rows() < 1 || A.rows() != A.cols()) {
        throw InvalidInput("OUModel: A must be square with n >= 1");
    }
    if (B.rows() != A.rows() || B.cols() < 1) {
        throw InvalidInput("OUModel: B must be n x d with d >= 1");
    }
    if (!A.allFinite() || !B.allFinite()) {
        throw InvalidInput("OUModel: non-finite entries");
    }
}

Eigen::VectorXd ColumnSplit::embed(const Eigen::VectorXd& w) const {
    const int d = static_cast<int>(permutation.size());
    const int n = static_cast<int>(B1.rows());
    Eigen::VectorXd z = Eigen::VectorXd::Zero(d);
    for (int j = 0; j < n; ++j) z(permutation[j]) = w(j);
    return z;
}

Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& A, double s) {
    if (A.rows() != A.cols() || A.rows() < 1) {
        throw InvalidInput("matrix_exp: A must be square");
    }
    if (!A.allFinite() || !std::isfinite(s)) {
        throw InvalidInput("matrix_exp: non-finite input");
    }
    const int n = static_cast<int>(A.rows());
    if (n == 1) {
        Eigen::MatrixXd E(1, 1);
        E(0, 0) = std::exp(s * A(0, 0));
        return E;
    }
    Eigen::MatrixXd M = s * A;
    const double norm1 = M.cwiseAbs().colwise().sum().maxCoeff();
    if (norm1 == 0.0) return Eigen::MatrixXd::Identity(n, n);
    if (norm1 <= kTheta3) return pade_low_order(M, kPade3, 3);
    if (norm1 <= kTheta5) return pade_low_order(M, kPade5, 5);
    if (norm1 <= kTheta7) return pade_low_order(M, kPade7, 7);
    if (norm1 <= kTheta9) return pade_low_order(M, kPade9, 9);
    int squarings = 0;
    if (norm1 > kTheta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm1 / kTheta13)));
        M /= std::ldexp(1.0, squarings);
    }
    Eigen::MatrixXd E = pade13(M);
    for (int k = 0; k < squarings; ++k) E = E * E;
    return E;
}

bool check_dissipative(const Eigen::MatrixXd& A, double tol) {
    if (A.rows() != A.cols() || !A.allFinite()) {
        throw InvalidInput("check_dissipative: A must be square and finite");
    }
    if (tol < 0.0) throw InvalidInput("check_dissipative: tol must be >= 0");
    const Eigen::MatrixXd S = 0.5 * (A + A.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff() <= tol;
}

ColumnSplit column_split(const Eigen::MatrixXd& B) {
    const int n = static_cast<int>(B.rows());
    const int d = static_cast<int>(B.cols());
    if (n < 1 || d < 1 || !B.allFinite()) {
        throw InvalidInput("column_split: B must be n x d and finite");
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
    const double smax = svd.singularValues()(0);
    const int rank =
        (svd.singularValues().array() > std::max(n, d) * smax * 1e-12).count();
    if (d < n || rank < n) {
        throw RankDeficientError("column_split: Rank(B) < n");
    }

    // Count C(d, n) without overflow worry at desk scale.
    double subsets = 1.0;
    for (int i = 0; i < n; ++i) subsets *= static_cast<double>(d - i) / (i + 1);

    std::vector<int> best;
    double best_inv_norm = std::numeric_limits<double>::infinity();
    auto consider = [&](const std::vector<int>& cols) {
        Eigen::MatrixXd B1(n, n);
        for (int j = 0; j < n; ++j) B1.col(j) = B.col(cols[j]);
        Eigen::JacobiSVD<Eigen::MatrixXd> s1(B1);
        const double smin = s1.singularValues()(n - 1);
        if (smin <= s1.singularValues()(0) * 1e-12 || smin == 0.0) return;
        const double inv_norm = 1.0 / smin;
        if (inv_norm < best_inv_norm) {
            best_inv_norm = inv_norm;
            best = cols;
        }
    };

    if (subsets <= 200.0) {
        std::vector<int> cols(n);
        // iterate all n-subsets of {0..d-1} in lexicographic order
        for (int i = 0; i < n; ++i) cols[i] = i;
        for (;;) {
            consider(cols);
            int i = n - 1;
            while (i >= 0 && cols[i] == d - n + i) --i;
            if (i < 0) break;
            ++cols[i];
            for (int j = i + 1; j < n; ++j) cols[j] = cols[j - 1] + 1;
        }
    } else {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(B);
        const auto& perm = qr.colsPermutation().indices();
        std::vector<int> cols(n);
        for (int j = 0; j < n; ++j) cols[j] = perm(j);
        consider(cols);
    }
    if (best.empty()) {
        throw RankDeficientError("column_split: no invertible n-column subset found");
    }

    ColumnSplit out;
    out.permutation = best;
    std::vector<bool> used(d, false);
    for (int c : best) used[c] = true;
    for (int c = 0; c < d; ++c) {
        if (!used[c]) out.permutation.push_back(c);
    }
    out.B1.resize(n, n);
    for (int j = 0; j < n; ++j) out.B1.col(j) = B.col(out.permutation[j]);
    out.B2.resize(n, d - n);
    for (int j = n; j < d; ++j) out.B2.col(j - n) = B.col(out.permutation[j]);
    out.B1_inv = out.B1.partialPivLu().inverse();
    out.b1_inv_norm = operator_norm(out.B1_inv);
    return out;
}

double operator_norm(const Eigen::MatrixXd& A) {
    if (!A.allFinite()) throw InvalidInput("operator_norm: non-finite entries");
    if (A.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    return svd.singularValues()(0);
}

}  // namespace levyou
