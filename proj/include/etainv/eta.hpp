#pragma once

// Regularized eta invariants from finite spectra, and spectral flow for
// Hermitian operator families.
//
// The eta function is evaluated through its heat-kernel smoothing
//   eta(tau) = sum_{lambda != 0} sign(lambda) erfc(sqrt(tau) |lambda|),
// sampled on a window of tau values and extrapolated to tau = 0 by a low
// order polynomial fit in sqrt(tau). A truncated spectrum is only accepted
// when the smoothing cannot see past the truncation radius:
//   erfc(sqrt(tau_min) * lambda_max) < 1e-12.

#include "etainv/spectral_data.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace etainv {

struct EtaResult {
    double eta = 0.0;
    double reduced_eta = 0.0;  // (kernel_dimension + eta)/2, exact
    int kernel_dimension = 0;
    double error_estimate = 0.0;
    // regularization record
    std::vector<double> window;
    int extrapolation_order = 0;
    int cutoff = 0;
    std::vector<double> smoothed_values;
};

struct EtaOptions {
    std::vector<double> window;  // tau values, descending
    int extrapolation_order = 2;
    double error_ceiling = 2e-2;
    bool enforce_truncation_coupling = true;

    static std::vector<double> default_window() {
        std::vector<double> w;
        for (double c : {0.05, 0.04, 0.03, 0.02, 0.01})
            w.push_back(c / (detail::two_pi * detail::two_pi));
        return w;
    }

    // window matched to a spectrum complete up to |lambda| = lambda_complete:
    // tau_min = (z / lambda_complete)^2 with erfc(z) < 1e-12.
    static std::vector<double> window_for_radius(double lambda_complete, double z = 5.2) {
        double tmin = (z / lambda_complete) * (z / lambda_complete);
        return {5 * tmin, 4 * tmin, 3 * tmin, 2 * tmin, tmin};
    }

    EtaOptions() : window(default_window()) {}
};

inline double smoothed_eta(const SpectralData& spectrum, double tau) {
    if (tau <= 0) throw std::invalid_argument("smoothed_eta: tau must be positive");
    double s = 0;
    const double st = std::sqrt(tau);
    for (double l : spectrum.eigenvalues) {
        if (std::abs(l) < spectrum.kernel_tolerance) continue;
        s += (l > 0 ? 1.0 : -1.0) * std::erfc(st * std::abs(l));
    }
    return s;
}

namespace detail {

// least-squares polynomial fit y ~ p(w), returns coefficients (constant first)
inline VecD polyfit(const std::vector<double>& w, const std::vector<double>& y, int order) {
    const int n = static_cast<int>(w.size());
    Eigen::MatrixXd V(n, order + 1);
    for (int i = 0; i < n; ++i) {
        double t = 1.0;
        for (int j = 0; j <= order; ++j) {
            V(i, j) = t;
            t *= w[i];
        }
    }
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) rhs(i) = y[i];
    return V.colPivHouseholderQr().solve(rhs);
}

}  // namespace detail

inline EtaResult eta_invariant(const SpectralData& spectrum, const EtaOptions& opt = {}) {
    if (opt.window.size() < static_cast<size_t>(opt.extrapolation_order + 1))
        throw std::invalid_argument("eta_invariant: window smaller than fit order + 1");
    std::vector<double> window = opt.window;
    std::sort(window.begin(), window.end(), std::greater<>());
    const double tau_min = window.back();
    if (opt.enforce_truncation_coupling) {
        double lmax = spectrum.max_abs();
        if (std::erfc(std::sqrt(tau_min) * lmax) >= 1e-12)
            throw std::runtime_error(
                "eta_invariant: smoothing window sees past the truncation radius "
                "(erfc(sqrt(tau_min)*lambda_max) >= 1e-12); increase the cutoff or widen the "
                "window");
    }

    std::vector<double> ys, wroot;
    for (double tau : window) {
        ys.push_back(smoothed_eta(spectrum, tau));
        wroot.push_back(std::sqrt(tau));
    }
    VecD coef = detail::polyfit(wroot, ys, opt.extrapolation_order);
    double eta = coef[0];

    // residual of the fit
    double res = 0;
    for (size_t i = 0; i < ys.size(); ++i) {
        double p = 0, t = 1;
        for (int j = 0; j <= opt.extrapolation_order; ++j) {
            p += coef[j] * t;
            t *= wroot[i];
        }
        res = std::max(res, std::abs(p - ys[i]));
    }
    // variation across window halves
    double half_var = 0;
    const int n = static_cast<int>(ys.size());
    const int need = opt.extrapolation_order + 1;
    if (n >= need + 1) {
        int h = std::max(need, (n + 1) / 2);
        std::vector<double> w1(wroot.begin(), wroot.begin() + h), y1(ys.begin(), ys.begin() + h);
        std::vector<double> w2(wroot.end() - h, wroot.end()), y2(ys.end() - h, ys.end());
        double e1 = detail::polyfit(w1, y1, opt.extrapolation_order)[0];
        double e2 = detail::polyfit(w2, y2, opt.extrapolation_order)[0];
        half_var = std::abs(e1 - e2);
    }

    EtaResult r;
    r.eta = eta;
    r.kernel_dimension = spectrum.kernel_dimension();
    r.reduced_eta = (r.kernel_dimension + r.eta) / 2.0;
    r.error_estimate = std::max(res, half_var);
    r.window = window;
    r.extrapolation_order = opt.extrapolation_order;
    r.cutoff = spectrum.cutoff;
    r.smoothed_values = ys;
    if (r.error_estimate > opt.error_ceiling)
        throw std::runtime_error(
            "eta_invariant: non-convergent smoothing window (error estimate " +
            std::to_string(r.error_estimate) + "); increase the cutoff or widen the window");
    return r;
}

// ---------------------------------------------------------------------------
// spectral flow
// ---------------------------------------------------------------------------

struct FlowOptions {
    double margin = 1e-3;    // |lambda| below this at a cell endpoint forces bisection
    int max_depth = 28;
    double zero_tol = 1e-11;
    double overlap_floor = 0.6;  // eigenvector matching quality threshold
};

struct FlowCertificate {
    int cells = 0;
    int refinements = 0;
    double min_endpoint_gap = std::numeric_limits<double>::infinity();
    bool clean = true;
};

namespace detail {

struct EigPair {
    VecD values;
    MatC vectors;
};

inline EigPair eig_of(const MatC& A) {
    EigPair p;
    MatC V;
    p.values = eigh(A, &V);
    p.vectors = V;
    return p;
}

// match columns of b to columns of a by maximal overlap (greedy)
inline std::vector<int> match_branches(const EigPair& a, const EigPair& b, double& worst) {
    const int n = static_cast<int>(a.values.size());
    std::vector<int> perm(n, -1);
    std::vector<bool> used(n, false);
    worst = 1.0;
    for (int i = 0; i < n; ++i) {
        int best = -1;
        double bv = -1;
        for (int j = 0; j < n; ++j) {
            if (used[j]) continue;
            double ov = std::abs(a.vectors.col(i).dot(b.vectors.col(j)));
            if (ov > bv) {
                bv = ov;
                best = j;
            }
        }
        perm[i] = best;
        used[best] = true;
        worst = std::min(worst, bv);
    }
    return perm;
}

inline int flow_on_cell(const std::function<MatC(double)>& family, double s0, double s1,
                        const EigPair& e0, const EigPair& e1, const FlowOptions& opt,
                        FlowCertificate& cert, int depth) {
    double worst;
    std::vector<int> perm = match_branches(e0, e1, worst);
    const int n = static_cast<int>(e0.values.size());

    const double gap0 = e0.values.cwiseAbs().minCoeff();
    const double gap1 = e1.values.cwiseAbs().minCoeff();
    const double gap = std::min(gap0, gap1);

    int count = 0;
    for (int i = 0; i < n; ++i) {
        double l0 = e0.values[i], l1 = e1.values[perm[i]];
        if (std::abs(l0) < opt.zero_tol || std::abs(l1) < opt.zero_tol) continue;
        if (l0 < 0 && l1 > 0) count += 1;
        if (l0 > 0 && l1 < 0) count -= 1;
    }

    const bool degenerate = gap < opt.zero_tol;
    const bool poor_match = worst < opt.overlap_floor;
    const bool confirm_crossing = count != 0 && depth < 2;  // localize before counting
    const bool dip_hunt = count == 0 && gap < opt.margin && depth < 8;

    if ((degenerate || poor_match || confirm_crossing || dip_hunt) && depth < opt.max_depth) {
        double sm = 0.5 * (s0 + s1);
        EigPair em = eig_of(family(sm));
        cert.refinements += 1;
        return flow_on_cell(family, s0, sm, e0, em, opt, cert, depth + 1) +
               flow_on_cell(family, sm, s1, em, e1, opt, cert, depth + 1);
    }
    if (degenerate)
        throw std::runtime_error(
            "spectral_flow: unresolved degeneracy (eigenvalue pinned at zero after max "
            "refinement); supply a finer s grid");
    if (poor_match) cert.clean = false;
    cert.cells += 1;
    cert.min_endpoint_gap = std::min(cert.min_endpoint_gap, gap);
    return count;
}

}  // namespace detail

// Signed count of eigenvalue zero crossings (upward minus downward) along a
// Hermitian family sampled through `family`. Endpoint zeros are counted via
// one-sided limits: an eigenvalue exactly at zero at s=0 or s=1 takes the
// sign it has just inside the interval.
inline int spectral_flow(const std::function<MatC(double)>& family, std::vector<double> s_grid,
                         const FlowOptions& opt = {}, FlowCertificate* certificate = nullptr) {
    if (s_grid.size() < 2) throw std::invalid_argument("spectral_flow: need at least two s values");
    std::sort(s_grid.begin(), s_grid.end());
    FlowCertificate cert;

    // endpoint convention: nudge exact endpoint kernels one-sided
    auto sample_at = [&](double s, double inward) -> detail::EigPair {
        detail::EigPair e = detail::eig_of(family(s));
        if (e.values.cwiseAbs().minCoeff() < opt.zero_tol) {
            double step = (s_grid.back() - s_grid.front()) * 1e-7;
            e = detail::eig_of(family(s + inward * step));
        }
        return e;
    };

    int sf = 0;
    detail::EigPair left = sample_at(s_grid.front(), +1.0);
    for (size_t i = 0; i + 1 < s_grid.size(); ++i) {
        double s1 = s_grid[i + 1];
        detail::EigPair right =
            (i + 2 == s_grid.size()) ? sample_at(s1, -1.0) : detail::eig_of(family(s1));
        sf += detail::flow_on_cell(family, s_grid[i], s1, left, right, opt, cert, 0);
        left = right;
    }
    if (certificate) *certificate = cert;
    return sf;
}

// Flow from precomputed spectra only (no refinement, sorted-order matching).
inline int spectral_flow(const std::vector<std::pair<double, SpectralData>>& samples) {
    if (samples.size() < 2) throw std::invalid_argument("spectral_flow: need at least two samples");
    int sf = 0;
    for (size_t i = 0; i + 1 < samples.size(); ++i) {
        const auto& a = samples[i].second.eigenvalues;
        const auto& b = samples[i + 1].second.eigenvalues;
        if (a.size() != b.size())
            throw std::invalid_argument("spectral_flow: sample dimensions differ");
        for (size_t j = 0; j < a.size(); ++j) {
            if (a[j] < 0 && b[j] > 0) sf += 1;
            if (a[j] > 0 && b[j] < 0) sf -= 1;
        }
    }
    return sf;
}

}  // namespace etainv
