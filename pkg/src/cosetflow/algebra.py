"""Lie-algebra utilities for traceless 3x3 Hermitian generators.

Every Hamiltonian in this package is written as

    H = (trace_part / 3) * I + sum_i a_i * lambda_i,      i = 1..8,

where the lambda_i are the standard Gell-Mann matrices ordered the usual way
(lambda_1..lambda_3 act on levels 1-2, lambda_4..lambda_7 couple level 3,
lambda_8 is the diagonal hypercharge-like generator) and normalized so that
Tr(lambda_i lambda_j) = 2 delta_ij.  The coefficient vector `a` is real for a
Hermitian H; the trace is carried explicitly rather than dropped so that
global phases survive a round trip through the coefficient picture.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonHermitianInput, NotPositiveDefinite

__all__ = [
    "CoefficientVector",
    "gellmann_basis",
    "assemble_su3_hamiltonian",
    "coefficients_of",
    "hermitian_inv_sqrt",
    "inv_sqrt_with_derivative",
    "unitarity_residual",
    "HERMITICITY_TOL",
]

#: Largest max-abs-entry of H - H^dag that still counts as Hermitian.
HERMITICITY_TOL = 1e-12

_SQRT3 = np.sqrt(3.0)


@dataclass(frozen=True)
class CoefficientVector:
    """Real expansion coefficients of a 3x3 Hermitian matrix.

    Attributes
    ----------
    a : numpy.ndarray
        Shape (8,), the coefficients of lambda_1..lambda_8.
    trace_part : float
        Tr(H); the identity component is trace_part/3.
    """

    a: np.ndarray = field(default_factory=lambda: np.zeros(8))
    trace_part: float = 0.0

    def __post_init__(self):
        arr = np.asarray(self.a, dtype=float)
        if arr.shape != (8,):
            raise ValueError(f"coefficient vector must have shape (8,), got {arr.shape}")
        object.__setattr__(self, "a", arr)
        object.__setattr__(self, "trace_part", float(self.trace_part))


def gellmann_basis() -> np.ndarray:
    """Return the eight Gell-Mann matrices as a (8, 3, 3) complex array.

    Ordering and normalization follow the module docstring:
    Tr(lambda_i lambda_j) = 2 delta_ij and all matrices are traceless
    Hermitian.
    """
    l = np.zeros((8, 3, 3), dtype=complex)
    l[0, 0, 1] = l[0, 1, 0] = 1.0
    l[1, 0, 1] = -1j
    l[1, 1, 0] = 1j
    l[2, 0, 0] = 1.0
    l[2, 1, 1] = -1.0
    l[3, 0, 2] = l[3, 2, 0] = 1.0
    l[4, 0, 2] = -1j
    l[4, 2, 0] = 1j
    l[5, 1, 2] = l[5, 2, 1] = 1.0
    l[6, 1, 2] = -1j
    l[6, 2, 1] = 1j
    l[7, 0, 0] = l[7, 1, 1] = 1.0 / _SQRT3
    l[7, 2, 2] = -2.0 / _SQRT3
    return l


# Built once; small enough that module-level caching is the simplest policy.
_LAMBDA = gellmann_basis()
# Flattened copy laid out so that (_LAMBDA_FLAT @ h.ravel())[k] = Tr(lambda_k h);
# a single 8x9 matvec is noticeably cheaper than einsum in integrator hot loops.
_LAMBDA_FLAT = np.ascontiguousarray(_LAMBDA.transpose(0, 2, 1).reshape(8, 9))


def assemble_su3_hamiltonian(coeffs: CoefficientVector) -> np.ndarray:
    """Build the 3x3 Hermitian matrix for a coefficient vector.

    The inverse of :func:`coefficients_of`.
    """
    h = np.tensordot(coeffs.a, _LAMBDA, axes=(0, 0))
    h += (coeffs.trace_part / 3.0) * np.eye(3)
    return h


def coefficients_of(h: np.ndarray) -> CoefficientVector:
    """Project a 3x3 Hermitian matrix onto the Gell-Mann basis.

    Uses a_i = Tr(H lambda_i) / 2 together with the explicit trace part.

    Raises
    ------
    NonHermitianInput
        If any entry of H - H^dag exceeds ``HERMITICITY_TOL`` in magnitude.
    """
    h = np.asarray(h, dtype=complex)
    if h.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {h.shape}")
    drift = np.max(np.abs(h - h.conj().T))
    if drift > HERMITICITY_TOL:
        raise NonHermitianInput(
            f"matrix is not Hermitian: max |H - H^dag| = {drift:.3e} exceeds {HERMITICITY_TOL:.0e}"
        )
    a = (_LAMBDA_FLAT @ h.ravel()).real / 2.0
    return CoefficientVector(a=a, trace_part=float(np.trace(h).real))


def hermitian_inv_sqrt(m: np.ndarray) -> np.ndarray:
    """Inverse square root of a Hermitian positive-definite matrix.

    Computed by eigendecomposition; the result S is Hermitian and satisfies
    S M S = I to rounding accuracy.

    Raises
    ------
    NotPositiveDefinite
        If any eigenvalue is at or below 1e-12.
    """
    m = np.asarray(m, dtype=complex)
    w, q = np.linalg.eigh(m)
    if np.min(w) <= 1e-12:
        raise NotPositiveDefinite(
            f"matrix has eigenvalue {np.min(w):.3e} <= 1e-12; inverse square root undefined"
        )
    s = (q / np.sqrt(w)) @ q.conj().T
    # Symmetrize away the rounding skew so downstream Hermiticity checks are clean.
    return 0.5 * (s + s.conj().T)


def inv_sqrt_with_derivative(
    m: np.ndarray, mdot: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Inverse square root of Hermitian PD m, its time derivative, and sqrt(m).

    Given m(t) and its known derivative mdot, the derivative of R = m^{1/2}
    solves the Sylvester relation Rdot R + R Rdot = mdot, which is diagonal in
    the eigenbasis of m:  (Rdot)_ij = (mdot)_ij / (sqrt(w_i) + sqrt(w_j)).
    The derivative of S = m^{-1/2} then follows from Sdot = -S Rdot S.  This
    is exact up to rounding, with no finite-difference truncation error.

    Returns
    -------
    (s, sdot, r) : tuple of ndarrays
        s = m^{-1/2}, its derivative, and r = m^{1/2}.
    """
    m = np.asarray(m, dtype=complex)
    mdot = np.asarray(mdot, dtype=complex)
    n = m.shape[0]
    if n == 1:
        # Scalar block: everything is elementary.
        a = m[0, 0].real
        if a <= 1e-12:
            raise NotPositiveDefinite(
                f"matrix has eigenvalue {a:.3e} <= 1e-12; inverse square root undefined"
            )
        rt = np.sqrt(a)
        s = np.array([[1.0 / rt]], dtype=complex)
        r = np.array([[rt]], dtype=complex)
        sdot = np.array([[-mdot[0, 0].real / (2.0 * a * rt)]], dtype=complex)
        return s, sdot, r
    if n == 2:
        # Closed form via Cayley-Hamilton: r = sqrt(m) = (m + g*I)/q with
        # g = sqrt(det m) and q = tr(r) = sqrt(tr m + 2g), and the Sylvester
        # relation r*rdot + rdot*r = mdot has the explicit 2x2 solution
        # rdot = (1/(2q) + q/(2g))*mdot + (r mdot r)/(2gq) - (r mdot + mdot r)/(2g),
        # obtained by eliminating r^2 through r^2 = q*r - g*I.
        tr_m = m[0, 0].real + m[1, 1].real
        det_m = (m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]).real
        if det_m <= 0.0:
            raise NotPositiveDefinite(
                "matrix has a non-positive eigenvalue; inverse square root undefined"
            )
        half = 0.5 * tr_m
        lam_min = half - np.sqrt(max(half * half - det_m, 0.0))
        if lam_min <= 1e-12:
            raise NotPositiveDefinite(
                f"matrix has eigenvalue {lam_min:.3e} <= 1e-12; inverse square root undefined"
            )
        g = np.sqrt(det_m)
        q2 = np.sqrt(tr_m + 2.0 * g)
        r = (m + g * np.eye(2)) / q2
        # r is 2x2 with det r = g, so r^{-1} = (tr(r)*I - r)/g.
        s = (q2 * np.eye(2) - r) / g
        rm = r @ mdot
        mr = mdot @ r
        rdot = (
            (0.5 / q2 + 0.5 * q2 / g) * mdot
            + (r @ mr) / (2.0 * g * q2)
            - (rm + mr) / (2.0 * g)
        )
        sdot = -s @ rdot @ s
        sdot = 0.5 * (sdot + sdot.conj().T)
        return s, sdot, r
    w, q = np.linalg.eigh(m)
    if np.min(w) <= 1e-12:
        raise NotPositiveDefinite(
            f"matrix has eigenvalue {np.min(w):.3e} <= 1e-12; inverse square root undefined"
        )
    sq = np.sqrt(w)
    qh = q.conj().T
    s = (q / sq) @ qh
    s = 0.5 * (s + s.conj().T)
    r = (q * sq) @ qh
    r = 0.5 * (r + r.conj().T)
    rdot = q @ ((qh @ mdot @ q) / (sq[:, None] + sq[None, :])) @ qh
    sdot = -s @ rdot @ s
    sdot = 0.5 * (sdot + sdot.conj().T)
    return s, sdot, r


def unitarity_residual(u: np.ndarray) -> float:
    """Frobenius norm of U^dag U - I; zero for an exactly unitary U."""
    u = np.asarray(u, dtype=complex)
    eye = np.eye(u.shape[-1])
    return float(np.linalg.norm(u.conj().T @ u - eye))
