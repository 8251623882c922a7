#pragma once

#include <map>
#include <string>
#include <vector>

#include "hmf4/apfloat.hpp"
#include "hmf4/forms.hpp"

namespace hmf4 {

// Coefficients of T(p^2) f for odd prime p on weight k + 1/2:
//   b(n) = a(p^2 n) + ((-1)^k n | p) p^(k-1) a(n) + p^(2k-1) a(n / p^2)
// with the Legendre symbol and a(n/p^2) := 0 unless p^2 | n.
// Requires f.prec >= p^2 * prec_out.
Series t_p2_coeffs(const Series& f, long p, long k, long prec_out);

// Exact matrix of T(p^2) in a space's echelon basis: column j holds the
// coordinates of the image of basis element j. The space must outlive
// the matrix.
struct HeckeMatrix {
    long p = 0;
    long k = 0;
    const FormSpace* space = nullptr;
    std::vector<std::vector<Rat>> entries;  // entries[i][j]

    long dim() const { return static_cast<long>(entries.size()); }
};

HeckeMatrix t_p2_matrix(const FormSpace& space, long p);

// Exact product of two matrices on the same space.
HeckeMatrix hecke_mul(const HeckeMatrix& a, const HeckeMatrix& b);

// Exact characteristic polynomial det(xI - M), coefficients listed from
// the constant term up; the leading coefficient is 1.
std::vector<Rat> characteristic_polynomial(const HeckeMatrix& m);

// Simultaneous eigenvector of the T(p^2), embedded at a chosen bit
// precision. Coordinates are over the space's echelon basis; when the
// decomposition stayed in exact arithmetic the rational data is kept and
// `exact` is set. Coefficients are normalized so the first nonzero one
// is 1. The space must outlive the eigenform.
struct Eigenform {
    const FormSpace* space = nullptr;
    long bits = 0;
    bool exact = false;
    std::vector<APReal> coords;
    std::vector<Rat> coords_exact;            // filled iff exact
    std::map<long, APReal> eigenvalues;       // prime -> lambda_p
    std::map<long, Rat> eigenvalues_exact;    // filled iff exact
    std::vector<APReal> coeffs;               // a(n), n < space->prec
    std::string label;

    // a(n) as a Series of exact rationals; only valid when exact.
    Series series() const;
};

// Simultaneous eigenbasis of {T(p^2) : p in primes} on the space.
// The first prime's exact characteristic polynomial drives the split;
// repeated rational eigenvalues recurse on their exact eigenspaces with
// the next prime; a block that no prime separates is reported in a
// ConsistencyError. Results are sorted by eigenvalue tuples, ascending.
std::vector<Eigenform> eigen_decompose(const FormSpace& space,
                                       const std::vector<long>& primes, long bits);

// Coordinates c with f = sum c_i basis_i to embedding tolerance, where f
// must lie in the eigenbasis' space (exact membership checked first).
std::vector<APReal> express_in_eigenbasis(const FormSpace& space,
                                          const std::vector<Eigenform>& basis,
                                          const Series& f, long bits);

}  // namespace hmf4
