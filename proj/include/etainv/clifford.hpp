#pragma once

// Concrete Clifford representations in dimensions 1..3 with chirality grading.
// Every sign convention used downstream is fixed here:
//   dim 1: c1 = i                     (1x1)
//   dim 2: c1 = i s1, c2 = i s2, chirality = s3
//   dim 3: cj = i sj
// Generators are skew-adjoint with cj ck + ck cj = -2 delta_jk.

#include "etainv/detail/numerics.hpp"

#include <stdexcept>
#include <vector>

namespace etainv {

inline MatC pauli(int j) {
    MatC s(2, 2);
    switch (j) {
        case 1: s << 0, 1, 1, 0; break;
        case 2: s << 0, cxd(0, -1), cxd(0, 1), 0; break;
        case 3: s << 1, 0, 0, -1; break;
        default: throw std::invalid_argument("pauli: j must be 1..3");
    }
    return s;
}

struct CliffordRep {
    int dim = 0;
    std::vector<MatC> generators;
    MatC chirality;  // present iff dim even

    int spinor_size() const { return dim >= 2 ? 2 : 1; }
    bool has_chirality() const { return dim % 2 == 0; }
};

inline CliffordRep build_clifford(int dim) {
    if (dim < 1 || dim > 3)
        throw std::invalid_argument("build_clifford: supported dimensions are 1..3, got " +
                                    std::to_string(dim));
    CliffordRep rep;
    rep.dim = dim;
    const cxd I(0, 1);
    if (dim == 1) {
        MatC c(1, 1);
        c(0, 0) = I;
        rep.generators.push_back(c);
    } else {
        for (int j = 1; j <= dim; ++j) rep.generators.push_back(I * pauli(j));
        if (dim == 2) rep.chirality = pauli(3);
    }
    return rep;
}

// c(v) = sum_j v_j c_j for a (complex) covector v.
inline MatC clifford_mult(const CliffordRep& rep, const VecC& v) {
    if (static_cast<int>(v.size()) != rep.dim)
        throw std::invalid_argument("clifford_mult: covector has wrong dimension");
    const int n = rep.spinor_size();
    MatC m = MatC::Zero(n, n);
    for (int j = 0; j < rep.dim; ++j) m += v[j] * rep.generators[j];
    return m;
}

inline MatC clifford_mult(const CliffordRep& rep, const VecD& v) {
    return clifford_mult(rep, VecC(v.cast<cxd>()));
}

// tr_s(M) = tr(chirality * M); defined for even dim only.
inline cxd supertrace(const CliffordRep& rep, const MatC& M) {
    if (!rep.has_chirality())
        throw std::invalid_argument("supertrace: no grading in odd dimension");
    if (M.rows() != rep.spinor_size() || M.cols() != rep.spinor_size())
        throw std::invalid_argument("supertrace: matrix size mismatch");
    return (rep.chirality * M).trace();
}

}  // namespace etainv
