"""Sign and ordering conventions fixed by this package.

Every identity verified in the repository holds exactly once these
choices are made; changing any single entry flips signs (or reorders
results) in a correlated way across modules.  The dictionary below is
the authoritative statement of what the code does, and its hash is
embedded in every suite report so that reports are comparable only
between builds that agree on the conventions.
"""

import hashlib
import json

CONVENTIONS = {
    "bracket_sign": (
        "The odd bracket is (f,g) = (-1)^(|f|+1) X_f(g) with X_f the "
        "hamiltonian field of f; in a standard chart this is "
        "(f,g) = (-1)^(|f|+1) d^i f d_i g - d_i f d^i g with d_i = "
        "left d/dq^i and d^i = left d/dp_i.  Fundamental value: "
        "(q1, p1) = -1."
    ),
    "laplacian_order": (
        "The flat Laplacian is sum_i d/dp_i d/dq^i acting by left "
        "derivatives, momentum derivative applied first.  Value: "
        "laplacian(q1*p1) = 1."
    ),
    "berezin_order": (
        "berezin_integral(f, names) applies the LAST listed odd name "
        "first (innermost nesting), matching iterated one-variable "
        "integrals; a single odd integral is the left derivative, so "
        "the integral of theta d theta is 1."
    ),
    "chart_order": (
        "chart_integral integrates odd positions in ascending slot "
        "order then odd momenta in ascending slot order (handed to "
        "berezin_integral in that listing), and even directions by "
        "Gaussian moment calculus."
    ),
    "gauge_substitution": (
        "restrict_to_lagrangian uses x_i = (-1)^(|x_i|) * (left "
        "derivative of psi by y^i); with this sign the restriction of "
        "x_i dy^i equals d psi on the gauge surface."
    ),
    "lagrangian_measure": (
        "integrate_over_lagrangian Berezin-integrates the odd y "
        "variables in descending slot order, so the ascending product "
        "y^{j1}*...*y^{jr} (j1 < ... < jr) extracts with sign +1."
    ),
    "form_parities": (
        "dq^i is odd and dp_i is even; the de Rham differential acts "
        "from the left; the symplectic form is sum_i dp_i dq^i."
    ),
    "jacobian_layout": (
        "Jacobian rows are indexed by source generators and columns by "
        "target generators, entries J[nu][mu] = left d_nu(Psi^mu); the "
        "chain rule reads J(Psi o Phi) = J(Phi) . Phi^*(J(Psi))."
    ),
    "multivector_correspondence": (
        "The multivector/form correspondence applies the rightmost "
        "interior product first: f*p_{i1}*...*p_{ik} maps to "
        "f * i_{d_{i1}}(...(i_{d_{ik}}(d^n q))...)."
    ),
    "conormal_orientation": (
        "The coordinate-subspace comparison integrates over C = "
        "{q^j = 0, j in J} with the orientation whose positive frame "
        "is i_{d_{j1}}...i_{d_{jr}} d^n q, i.e. sign (-1)^(sum of "
        "0-based indices in J) relative to the ascending frame."
    ),
    "weighted_operator_normalization": (
        "Delta_mu = flat Laplacian minus one half bracket with log mu; "
        "the obstruction is F = laplacian(S) - (1/4)(S,S) for mu = "
        "e^S mu_std; the corrected operator on functions adds (1/2) F, "
        "which is the unique multiple that squares to zero and matches "
        "conjugation of the flat Laplacian by e^(S/2)."
    ),
    "gaussian_value_equality": (
        "A moment integral is stored as coefficient * prod_i "
        "sqrt(2 pi / a_i); two values compare equal when they agree "
        "after extracting the squarefree radical part of the product "
        "of scales, so profiles differing by rational squares compare."
    ),
}


def ledger_hash() -> str:
    """Hash of the canonical serialization of the convention ledger."""
    blob = json.dumps(CONVENTIONS, sort_keys=True,
                      separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()
