#pragma once

#include <cstdlib>
#include <vector>

namespace ruth {
namespace signs {

/*
** Single source of truth for every graded sign convention used by the
** engine.  All modules take their signs from here; nothing else hard-codes
** a (-1)^... rule.  The conventions:
**   - standard Koszul rule: interchanging graded objects of degrees p, q
**     costs (-1)^{pq};
**   - wedge of valued forms: omega (p-form, internal degree i) with eta
**     (q-form): global prefactor (-1)^{q i} times the shuffle sign;
**   - a complex differential acts on p-forms with an extra (-1)^p;
**   - contracting homotopies of exact complexes satisfy h d + d h = -Id.
*/

constexpr int pow_m1(long n) { return (n % 2 == 0) ? 1 : -1; }

// (-1)^{pq} for moving degree-p past degree-q.
constexpr int swap_sign(long p, long q) { return pow_m1(p * q); }

// Prefactor of omega ^_h eta for a term of omega with internal degree i
// against a term of eta of form degree q.
constexpr int wedge_prefactor(long eta_form_degree, long omega_internal_degree) {
    return pow_m1(eta_form_degree * omega_internal_degree);
}

// Sign of the shuffle merging two disjoint strictly increasing index tuples
// (the permutation sorting the concatenation I|J).
inline int merge_sign(const std::vector<int>& lhs, const std::vector<int>& rhs) {
    long inversions = 0;
    for (int a : lhs)
        for (int b : rhs)
            if (b < a) ++inversions;
    return pow_m1(inversions);
}

// Koszul formula signs, 1-based argument positions.
constexpr int koszul_pair(long i, long j) { return pow_m1(i + j); }
constexpr int koszul_single(long i) { return pow_m1(i + 1); }

// Graded Leibniz: D(xy) = D(x)y + (-1)^{|D||x|} x D(y).
constexpr int leibniz(long op_degree, long x_degree) { return pow_m1(op_degree * x_degree); }

// Dual structure operator components, for eta in (E^k)^*:
//   partial^*(eta) = dual_partial(k) * eta o partial
//   omega_p^*(...)(eta) = dual_omega(k, p) * eta o omega_p(...)
constexpr int dual_partial(long k) { return -pow_m1(k); }
constexpr int dual_omega(long k, long p) { return -pow_m1(k * (p + 1)); }

// Conjugation isomorphism Phi_0 = (-1)^n on degree n.
constexpr int conjugation(long n) { return pow_m1(n); }

// Graded tensor product of maps: (S (x) T)(v (x) w) = sign * S(v) (x) T(w),
// T of internal degree t applied past v of degree |v|.
constexpr int tensor_map(long t, long v_degree) { return pow_m1(t * v_degree); }

// Deformation-to-adjoint bridge: c_D picks up (-1)^{k-1} (-1)^i on the i-th
// connection correction term, and the symbol slot carries a global minus.
constexpr int psi_correction(long k, long i) { return pow_m1(k - 1 + i); }
constexpr int psi_symbol() { return -1; }

// Exact-complex contraction convention: h d + d h = -Id.
constexpr int contraction_identity() { return -1; }

// Resolved sign placements (pinned by the structure equations):
// the double D_{E,nabla} carries omega_2 = double_omega * R_nabla, the Serre
// representation carries omega_2(u,v) = serre_iota * iota_{R^sigma(u,v)}, and
// the extension bracket of a length-1 representation uses K = extension_k *
// omega_2.
constexpr int double_omega() { return -1; }
constexpr int serre_iota() { return -1; }
constexpr int extension_k() { return -1; }

// Schouten bracket conventions (degree -1 Gerstenhaber bracket on
// multivector fields):
//   [X_1^...^X_p, Y_1^...^Y_q] = sum schouten_pair(s,t) [X_s,Y_t]^rest,
//   [X_1^...^X_p, f[ = sum schouten_fn(p,s) rho(X_s)(f) rest,
//   [f, Q] = schouten_flip0(q) [Q, f],
//   [P, Q] = schouten_antisym(p, q) [Q, P],
//   [fP, Q] = f[P,Q] + schouten_coeff(p, q) [f,Q]^P.
constexpr int schouten_pair(long s, long t) { return pow_m1(s + t); }
constexpr int schouten_fn(long p, long s) { return pow_m1(p - s); }
constexpr int schouten_flip0(long q) { return pow_m1(q); }
constexpr int schouten_antisym(long p, long q) { return -pow_m1((p - 1) * (q - 1)); }
constexpr int schouten_coeff(long p, long q) { return pow_m1(p * (q - 1)); }

}  // namespace signs
}  // namespace ruth
