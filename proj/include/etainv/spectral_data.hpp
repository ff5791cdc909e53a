#pragma once

// SpectralData: the common currency between operator builders and the eta
// engine. A finite sorted list of eigenvalues plus truncation metadata.

#include "etainv/detail/numerics.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace etainv {

inline constexpr double default_kernel_tol = 1e-6 * detail::two_pi;

struct SpectralData {
    std::vector<double> eigenvalues;  // ascending, one entry per multiplicity
    int cutoff = 0;                   // transverse truncation Lambda
    std::string method;               // e.g. "character", "galerkin", "cylinder-permode"
    double kernel_tolerance = default_kernel_tol;
    int truncated_orbits = 0;         // mapping-torus bookkeeping
    std::vector<std::string> warnings;

    void sort() { std::sort(eigenvalues.begin(), eigenvalues.end()); }

    int kernel_dimension() const {
        int k = 0;
        for (double l : eigenvalues)
            if (std::abs(l) < kernel_tolerance) ++k;
        return k;
    }

    double max_abs() const {
        double m = 0;
        for (double l : eigenvalues) m = std::max(m, std::abs(l));
        return m;
    }

    double min_abs() const {
        double m = std::numeric_limits<double>::infinity();
        for (double l : eigenvalues) m = std::min(m, std::abs(l));
        return m;
    }

    void append(const SpectralData& other) {
        eigenvalues.insert(eigenvalues.end(), other.eigenvalues.begin(), other.eigenvalues.end());
        truncated_orbits += other.truncated_orbits;
        for (const auto& w : other.warnings) warnings.push_back(w);
    }

    // spectrum negation (used by symmetry oracles in tests)
    SpectralData negated() const {
        SpectralData s = *this;
        for (double& l : s.eigenvalues) l = -l;
        s.sort();
        return s;
    }

    void validate() const {
        if (!std::is_sorted(eigenvalues.begin(), eigenvalues.end()))
            throw std::logic_error("SpectralData: eigenvalues not sorted");
    }
};

// symmetry defect under lambda -> -lambda, as max mismatch of sorted lists
inline double symmetry_defect(const SpectralData& s) {
    std::vector<double> neg;
    neg.reserve(s.eigenvalues.size());
    for (auto it = s.eigenvalues.rbegin(); it != s.eigenvalues.rend(); ++it) neg.push_back(-*it);
    double d = 0;
    for (size_t i = 0; i < neg.size(); ++i) d = std::max(d, std::abs(neg[i] - s.eigenvalues[i]));
    return d;
}

}  // namespace etainv
