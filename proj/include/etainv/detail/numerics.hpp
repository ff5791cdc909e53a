#pragma once

// Small numerics toolbox shared by the spectral modules: Legendre evaluation,
// Gauss-Legendre rules, Hermitian eigensolvers (LAPACKE when available) and a
// chunked parallel_for.

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

#ifdef ETAINV_HAVE_LAPACKE
#include <lapacke.h>
#endif

namespace etainv {

using cxd = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using VecD = Eigen::VectorXd;

namespace detail {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// Legendre P_0..P_n at x, standard recurrence.
inline void legendre_all(int n, double x, double* P) {
    P[0] = 1.0;
    if (n == 0) return;
    P[1] = x;
    for (int k = 2; k <= n; ++k)
        P[k] = ((2 * k - 1) * x * P[k - 1] - (k - 1) * P[k - 2]) / k;
}

// P_n and P_n' at x (for Newton iteration on Gauss nodes).
inline void legendre_pd(int n, double x, double& p, double& dp) {
    double p0 = 1.0, p1 = x;
    if (n == 0) { p = 1.0; dp = 0.0; return; }
    for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1; p1 = p2;
    }
    p = p1;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
}

struct GaussRule {
    std::vector<double> x, w;  // nodes/weights on [-1,1]
};

// Gauss-Legendre rule by Newton from Chebyshev initial guesses.
inline GaussRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1 required");
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double p, dp;
        for (int it = 0; it < 100; ++it) {
            legendre_pd(n, x, p, dp);
            double dx = -p / dp;
            x += dx;
            if (std::abs(dx) < 1e-15) break;
        }
        legendre_pd(n, x, p, dp);
        r.x[n - 1 - i] = x;
        r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

// Eigenvalues (and optionally vectors) of a Hermitian matrix.
inline VecD eigh(const MatC& A, MatC* vectors = nullptr) {
    const int n = static_cast<int>(A.rows());
#ifdef ETAINV_HAVE_LAPACKE
    MatC work = A;
    VecD w(n);
    int info = LAPACKE_zheev(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'L', n,
                             reinterpret_cast<lapack_complex_double*>(work.data()), n, w.data());
    if (info != 0) throw std::runtime_error("zheev failed, info=" + std::to_string(info));
    if (vectors) *vectors = work;
    return w;
#else
    Eigen::SelfAdjointEigenSolver<MatC> es(A, vectors ? Eigen::ComputeEigenvectors
                                                      : Eigen::EigenvaluesOnly);
    if (vectors) *vectors = es.eigenvectors();
    return es.eigenvalues();
#endif
}

// Generalized Hermitian eigenproblem A v = lambda M v, M positive definite.
inline VecD eigh_gen(const MatC& A, const MatC& M, MatC* vectors = nullptr) {
    const int n = static_cast<int>(A.rows());
#ifdef ETAINV_HAVE_LAPACKE
    MatC a = A, b = M;
    VecD w(n);
    int info = LAPACKE_zhegv(LAPACK_COL_MAJOR, 1, vectors ? 'V' : 'N', 'L', n,
                             reinterpret_cast<lapack_complex_double*>(a.data()), n,
                             reinterpret_cast<lapack_complex_double*>(b.data()), n, w.data());
    if (info != 0) throw std::runtime_error("zhegv failed, info=" + std::to_string(info));
    if (vectors) *vectors = a;
    return w;
#else
    Eigen::LLT<MatC> llt(M);
    if (llt.info() != Eigen::Success) throw std::runtime_error("mass matrix not positive definite");
    MatC L = llt.matrixL();
    MatC Ared = L.triangularView<Eigen::Lower>().solve(A);
    Ared = L.triangularView<Eigen::Lower>().solve(Ared.adjoint()).adjoint();
    Eigen::SelfAdjointEigenSolver<MatC> es(Ared, vectors ? Eigen::ComputeEigenvectors
                                                         : Eigen::EigenvaluesOnly);
    if (vectors)
        *vectors = L.adjoint().triangularView<Eigen::Upper>().solve(es.eigenvectors());
    return es.eigenvalues();
#endif
}

inline void parallel_for(int n, const std::function<void(int)>& body) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw <= 1 || n < 4) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    unsigned nt = std::min<unsigned>(hw, static_cast<unsigned>(n));
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (unsigned t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= n) return;
                body(i);
            }
        });
    for (auto& th : pool) th.join();
}

}  // namespace detail
}  // namespace etainv
