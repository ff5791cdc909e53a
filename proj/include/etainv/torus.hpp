#pragma once

// Flat-torus geometry: spin structures, flat twists, truncated dual-lattice
// mode sets, and U(N)-valued maps given as finite Fourier series together
// with their Maurer-Cartan forms and winding data.
//
// Conventions: coordinates x_j in [0,1), Fourier modes e^{2 pi i k.x} with
// k = n + eps + theta, n integer. A character map is g(x) = e^{2 pi i m.x} I.

#include "etainv/detail/numerics.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace etainv {

struct TorusSpec {
    int dim = 2;
    VecD spin_structure;  // entries 0 or 1/2
    VecD flat_twist;      // entries in [0,1)

    TorusSpec() = default;
    TorusSpec(int d, VecD eps, VecD theta)
        : dim(d), spin_structure(std::move(eps)), flat_twist(std::move(theta)) {
        validate();
    }

    void validate() const {
        if (dim < 1 || dim > 3) throw std::invalid_argument("TorusSpec: dim must be 1..3");
        if (spin_structure.size() != dim || flat_twist.size() != dim)
            throw std::invalid_argument("TorusSpec: eps/theta must have dim entries");
        for (int j = 0; j < dim; ++j) {
            double e = spin_structure[j];
            if (e != 0.0 && e != 0.5)
                throw std::invalid_argument("TorusSpec: spin structure entries must be 0 or 1/2");
            double t = flat_twist[j];
            if (t < 0.0 || t >= 1.0)
                throw std::invalid_argument("TorusSpec: twist entries must lie in [0,1)");
        }
    }

    // momentum of integer point n: k = n + eps + theta
    VecD momentum(const std::vector<int>& n) const {
        VecD k(dim);
        for (int j = 0; j < dim; ++j) k[j] = n[j] + spin_structure[j] + flat_twist[j];
        return k;
    }
};

struct ModeSet {
    int cutoff = 0;
    std::vector<VecD> momenta;  // lexicographic in n
};

// All shifted lattice momenta with max-norm of n at most Lambda.
inline ModeSet mode_set(const TorusSpec& spec, int Lambda) {
    if (Lambda < 0) throw std::invalid_argument("mode_set: Lambda must be >= 0");
    spec.validate();
    ModeSet ms;
    ms.cutoff = Lambda;
    std::vector<int> n(spec.dim, -Lambda);
    const int count = static_cast<int>(std::pow(2 * Lambda + 1, spec.dim) + 0.5);
    ms.momenta.reserve(count);
    for (;;) {
        ms.momenta.push_back(spec.momentum(n));
        int j = spec.dim - 1;
        while (j >= 0 && ++n[j] > Lambda) n[j--] = -Lambda;
        if (j < 0) break;
    }
    return ms;
}

// A K^1 representative g: T^dim -> U(N) as a finite Fourier series.
struct UnitaryMapSpec {
    int dim = 2;
    int N = 1;
    std::map<std::vector<int>, MatC> coefficients;    // frequency -> N x N matrix
    std::optional<std::vector<int>> character_shortcut;  // g = e^{2 pi i m.x} I
    double unitarity_tol = 1e-10;

    static UnitaryMapSpec character(int dim, std::vector<int> m) {
        if (static_cast<int>(m.size()) != dim)
            throw std::invalid_argument("character: frequency vector has wrong dimension");
        UnitaryMapSpec g;
        g.dim = dim;
        g.N = 1;
        MatC one = MatC::Identity(1, 1);
        g.coefficients[m] = one;
        g.character_shortcut = std::move(m);
        return g;
    }

    static UnitaryMapSpec constant(int dim, const MatC& U) {
        UnitaryMapSpec g;
        g.dim = dim;
        g.N = static_cast<int>(U.rows());
        g.coefficients[std::vector<int>(dim, 0)] = U;
        return g;
    }

    bool is_character() const { return character_shortcut.has_value(); }

    int max_abs_freq() const {
        int f = 0;
        for (const auto& [w, c] : coefficients)
            for (int wj : w) f = std::max(f, std::abs(wj));
        return f;
    }

    MatC evaluate(const VecD& x) const {
        MatC g = MatC::Zero(N, N);
        for (const auto& [w, c] : coefficients) {
            double ph = 0;
            for (int j = 0; j < dim; ++j) ph += w[j] * x[j];
            g += std::exp(cxd(0, detail::two_pi * ph)) * c;
        }
        return g;
    }

    // partial_j g at x, exact on coefficients
    MatC evaluate_derivative(const VecD& x, int j) const {
        MatC d = MatC::Zero(N, N);
        for (const auto& [w, c] : coefficients) {
            double ph = 0;
            for (int i = 0; i < dim; ++i) ph += w[i] * x[i];
            d += cxd(0, detail::two_pi * w[j]) * std::exp(cxd(0, detail::two_pi * ph)) * c;
        }
        return d;
    }
};

struct MapSamples {
    std::vector<MatC> values;  // row-major over the uniform grid
    int resolution = 0;
    double unitarity_residual = 0.0;
};

// Evaluate g on the uniform grid (resolution points per axis) and report the
// worst unitarity defect max_x ||g(x)^* g(x) - I||_F.
inline MapSamples evaluate_map(const UnitaryMapSpec& g, int resolution) {
    const int need = 2 * g.max_abs_freq() + 1;
    if (resolution < need)
        throw std::invalid_argument("evaluate_map: grid resolution " + std::to_string(resolution) +
                                    " too coarse for frequency content (need >= " +
                                    std::to_string(need) + ")");
    MapSamples out;
    out.resolution = resolution;
    const int total = static_cast<int>(std::pow(resolution, g.dim) + 0.5);
    out.values.resize(total);
    const MatC id = MatC::Identity(g.N, g.N);
    double worst = 0.0;
    std::vector<int> idx(g.dim, 0);
    VecD x(g.dim);
    for (int t = 0; t < total; ++t) {
        for (int j = 0; j < g.dim; ++j) x[j] = double(idx[j]) / resolution;
        MatC val = g.evaluate(x);
        out.values[t] = val;
        worst = std::max(worst, (val.adjoint() * val - id).norm());
        int j = g.dim - 1;
        while (j >= 0 && ++idx[j] >= resolution) idx[j--] = 0;
    }
    out.unitarity_residual = worst;
    return out;
}

// Maurer-Cartan form omega = g^{-1} dg as Fourier coefficients per direction.
struct MaurerCartanForm {
    int dim = 0;
    int N = 1;
    // component j: frequency -> N x N coefficient of omega_j
    std::vector<std::map<std::vector<int>, MatC>> comps;

    MatC evaluate(int j, const VecD& x) const {
        MatC v = MatC::Zero(N, N);
        for (const auto& [w, c] : comps[j]) {
            double ph = 0;
            for (int i = 0; i < dim; ++i) ph += w[i] * x[i];
            v += std::exp(cxd(0, detail::two_pi * ph)) * c;
        }
        return v;
    }
};

// omega_j = g^* (partial_j g), computed by exact coefficient convolution.
// For a character m this is the constant 2 pi i m_j.
inline MaurerCartanForm maurer_cartan(const UnitaryMapSpec& g, int grid_resolution = 0) {
    const int res = grid_resolution > 0 ? grid_resolution : 2 * g.max_abs_freq() + 2;
    MapSamples chk = evaluate_map(g, std::max(res, 2 * g.max_abs_freq() + 1));
    if (chk.unitarity_residual > g.unitarity_tol)
        throw std::runtime_error("maurer_cartan: map fails unitarity tolerance (residual " +
                                 std::to_string(chk.unitarity_residual) + ")");
    MaurerCartanForm mc;
    mc.dim = g.dim;
    mc.N = g.N;
    mc.comps.resize(g.dim);
    for (const auto& [w, cw] : g.coefficients) {
        for (const auto& [v, cv] : g.coefficients) {
            // (g^*)_{w-v-ish}: coefficient of e^{2 pi i (v - w).x} is cw^*
            std::vector<int> u(g.dim);
            for (int j = 0; j < g.dim; ++j) u[j] = v[j] - w[j];
            MatC prod = cw.adjoint() * cv;
            for (int j = 0; j < g.dim; ++j) {
                if (v[j] == 0) continue;
                MatC term = cxd(0, detail::two_pi * v[j]) * prod;
                auto it = mc.comps[j].find(u);
                if (it == mc.comps[j].end())
                    mc.comps[j][u] = term;
                else
                    it->second += term;
            }
        }
    }
    // prune numerically zero entries
    for (int j = 0; j < g.dim; ++j) {
        for (auto it = mc.comps[j].begin(); it != mc.comps[j].end();) {
            if (it->second.norm() < 1e-14)
                it = mc.comps[j].erase(it);
            else
                ++it;
        }
    }
    return mc;
}

struct WindingResult {
    std::vector<int> winding;
    double residual = 0.0;  // max deviation from the nearest integer before rounding
};

// Winding vector of an N=1 map: m_j = (1/2 pi i) circ-int g^{-1} d_j g.
inline WindingResult winding(const UnitaryMapSpec& g, int grid_resolution = 0) {
    if (g.N != 1) throw std::invalid_argument("winding: defined for N=1 maps only");
    const int res = std::max(grid_resolution, 4 * g.max_abs_freq() + 8);
    WindingResult out;
    out.winding.resize(g.dim);
    const int total = static_cast<int>(std::pow(res, g.dim) + 0.5);
    for (int j = 0; j < g.dim; ++j) {
        cxd acc = 0;
        std::vector<int> idx(g.dim, 0);
        VecD x(g.dim);
        for (int t = 0; t < total; ++t) {
            for (int i = 0; i < g.dim; ++i) x[i] = double(idx[i]) / res;
            cxd gv = g.evaluate(x)(0, 0);
            cxd dg = g.evaluate_derivative(x, j)(0, 0);
            acc += dg / gv;
            int i = g.dim - 1;
            while (i >= 0 && ++idx[i] >= res) idx[i--] = 0;
        }
        cxd mj = acc / (cxd(0, detail::two_pi) * double(total));
        double rounded = std::round(mj.real());
        double resid = std::abs(mj - cxd(rounded, 0));
        out.residual = std::max(out.residual, resid);
        if (resid > 0.01)
            throw std::runtime_error("winding: non-integer winding (residual " +
                                     std::to_string(resid) + "); not a valid loop or grid too coarse");
        out.winding[j] = static_cast<int>(rounded);
    }
    return out;
}

// Coefficient-file ingestion. Format (documented in the README):
//   first non-comment line:  N dim
//   then one line per entry: w_1 ... w_dim  a b  re im     (a,b zero-based)
inline UnitaryMapSpec parse_map_file(std::istream& in) {
    UnitaryMapSpec g;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        auto h = line.find('#');
        if (h != std::string::npos) line = line.substr(0, h);
        std::istringstream ls(line);
        if (!header) {
            int N, dim;
            if (!(ls >> N >> dim)) {
                if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
                throw std::runtime_error("map file: malformed header (want 'N dim')");
            }
            if (N < 1 || dim < 1 || dim > 3)
                throw std::runtime_error("map file: invalid N or dim in header");
            g.N = N;
            g.dim = dim;
            header = true;
            continue;
        }
        std::vector<int> w(g.dim);
        int a, b;
        double re, im;
        if (!(ls >> w[0])) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw std::runtime_error("map file: malformed entry line");
        }
        for (int j = 1; j < g.dim; ++j)
            if (!(ls >> w[j])) throw std::runtime_error("map file: truncated frequency vector");
        if (!(ls >> a >> b >> re >> im))
            throw std::runtime_error("map file: entry line needs 'a b re im' after frequencies");
        if (a < 0 || a >= g.N || b < 0 || b >= g.N)
            throw std::runtime_error("map file: matrix index out of range");
        auto it = g.coefficients.find(w);
        if (it == g.coefficients.end()) {
            MatC c = MatC::Zero(g.N, g.N);
            c(a, b) = cxd(re, im);
            g.coefficients[w] = c;
        } else {
            it->second(a, b) += cxd(re, im);
        }
    }
    if (!header) throw std::runtime_error("map file: empty file");
    return g;
}

}  // namespace etainv
