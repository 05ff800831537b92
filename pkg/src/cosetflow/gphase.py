"""Geometric and dynamic phases of the factored evolution.

The block factorization separates a trajectory into base-manifold motion
and fiber phases.  When the base point is dragged around a closed loop,
the fiber picks up an anholonomy on top of the usual energy-driven
phase, and for the diagonal generator treated here that anholonomy is
Abelian: a single real number per loop obtained by integrating a
connection one-form.

Two levels of machinery live here.  For a two-level system with the
frame parameterized by polar angles (theta, eps) the loop integral has
the closed form pi (1 - cos theta), and a quadrature routine reproduces
it from the frame matrix alone.  For the three-level system the loop
lives in the four angles (theta1, theta2, eps1, eps2); its one-form is
integrated along sampled paths, either from the angles directly or from
state samples through the connection.  Both routes agree, which is one
of the package's acceptance checks.

Angle paths must be supplied with unwrapped (continuous) epsilon
histories.  A full circuit in eps1 accumulates 2 pi in the array even
though the underlying frame returns to itself; closure of a path is
checked modulo 2 pi.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NormalizationDrift, OutOfRange
from .su3 import PolarAngles

__all__ = [
    "AnglePath",
    "su2_frame",
    "su2_geometric_phase",
    "su2_loop_integral_numeric",
    "connection_one_form",
    "geometric_phase_from_states",
    "state_from_angles",
    "su3_geometric_phase",
    "su3_geometric_phase_alt",
    "alt_angles_path",
    "dynamic_phase",
    "wrap_to_pi",
]

_CLOSURE_TOL = 1e-9


def wrap_to_pi(x: float) -> float:
    """Representative of x modulo 2 pi in the interval (-pi, pi]."""
    y = np.remainder(x, 2.0 * np.pi)
    if y > np.pi:
        y -= 2.0 * np.pi
    return float(y)


def _circular_gap(a: float, b: float) -> float:
    return abs(wrap_to_pi(a - b))


@dataclass(frozen=True)
class AnglePath:
    """Sampled path in the four frame angles.

    The four angle arrays share the time grid and hold unwrapped values.
    With closed=True the endpoints must coincide: exactly (to 1e-9) in
    the latitudes, modulo 2 pi in the phases.
    """

    times: np.ndarray
    theta1: np.ndarray
    theta2: np.ndarray
    eps1: np.ndarray
    eps2: np.ndarray
    closed: bool = False

    def __post_init__(self):
        arrays = {}
        for name in ("times", "theta1", "theta2", "eps1", "eps2"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.ndim != 1:
                raise DimensionMismatch(f"{name} must be one-dimensional")
            arrays[name] = arr
        k = arrays["times"].size
        if k < 2:
            raise DimensionMismatch("a path needs at least two samples")
        for name, arr in arrays.items():
            if arr.size != k:
                raise DimensionMismatch(
                    f"{name} has {arr.size} samples, times has {k}"
                )
            object.__setattr__(self, name, arr)
        if np.any(np.diff(arrays["times"]) <= 0.0):
            raise ValueError("times must be strictly increasing")
        if self.closed:
            for name in ("theta1", "theta2"):
                gap = abs(arrays[name][0] - arrays[name][-1])
                if gap > _CLOSURE_TOL:
                    raise ValueError(
                        f"closed path: {name} endpoints differ by {gap:.3e}"
                    )
            for name in ("eps1", "eps2"):
                gap = _circular_gap(arrays[name][0], arrays[name][-1])
                if gap > _CLOSURE_TOL:
                    raise ValueError(
                        f"closed path: {name} endpoints differ by {gap:.3e} mod 2 pi"
                    )

    @classmethod
    def from_samples(
        cls, times: np.ndarray, samples: Sequence[PolarAngles], closed: bool = False
    ) -> "AnglePath":
        """Assemble a path from PolarAngles records on a time grid."""
        return cls(
            times=np.asarray(times, dtype=float),
            theta1=np.array([s.theta1 for s in samples]),
            theta2=np.array([s.theta2 for s in samples]),
            eps1=np.array([s.eps1 for s in samples]),
            eps2=np.array([s.eps2 for s in samples]),
            closed=closed,
        )

    def __len__(self) -> int:
        return int(self.times.size)


# ---------------------------------------------------------------------------
# Two-level loop


def su2_frame(theta: float, eps: float) -> np.ndarray:
    """Base-lifting frame of the two-level factorization at polar angles
    (theta, eps): rows mix cos(theta/2) with sin(theta/2) e^{+-i eps}.
    """
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array(
        [
            [c, -s * np.exp(-1j * eps)],
            [s * np.exp(1j * eps), c],
        ]
    )


def su2_geometric_phase(theta: float) -> float:
    """Closed-form anholonomy of one constant-latitude circuit,
    pi (1 - cos theta) for the upper level (the lower is its negative).

    Meaningful for 0 <= theta <= pi; the formula is evaluated as given.
    """
    return float(np.pi * (1.0 - np.cos(theta)))


def su2_loop_integral_numeric(theta: float, n_steps: int) -> float:
    """Quadrature of the upper-level loop integrand on a constant-theta
    circuit, from frame samples alone.

    The eps-derivative of the frame is taken with a five-point periodic
    stencil and the (1, 1) entry of -i U1^dag (dU1/d eps) is summed over
    the uniform grid (the periodic trapezoid rule).  Converges to
    :func:`su2_geometric_phase` rapidly; the stencil keeps the
    derivative error below quadrature noise at moderate n_steps.
    """
    if n_steps < 16:
        raise OutOfRange(f"n_steps must be at least 16, got {n_steps}")
    n = int(n_steps)
    h = 2.0 * np.pi / n
    eps = h * np.arange(n)
    frames = np.empty((n, 2, 2), dtype=complex)
    for k in range(n):
        frames[k] = su2_frame(theta, eps[k])
    dframes = (
        -np.roll(frames, -2, axis=0)
        + 8.0 * np.roll(frames, -1, axis=0)
        - 8.0 * np.roll(frames, 1, axis=0)
        + np.roll(frames, 2, axis=0)
    ) / (12.0 * h)
    vals = np.einsum("kji,kjl->kil", frames.conj(), dframes)
    integrand = (-1j * vals[:, 0, 0]).real
    return float(np.sum(integrand) * h)


# ---------------------------------------------------------------------------
# Connection route


def connection_one_form(psi: np.ndarray, dpsi: np.ndarray) -> float:
    """Connection sample Re(-i <psi|dpsi>) for a normalized state.

    The imaginary part of -i <psi|dpsi> equals -Re <psi|dpsi>, which
    vanishes for norm-preserving differentials and is second-order small
    for finite differences of normalized samples; it is discarded here.
    A normalization defect beyond 1e-8 raises instead of silently
    skewing the result.
    """
    psi = np.asarray(psi, dtype=complex)
    dpsi = np.asarray(dpsi, dtype=complex)
    norm_err = abs(np.vdot(psi, psi).real - 1.0)
    if norm_err > 1e-8:
        raise NormalizationDrift(f"state norm off by {norm_err:.3e}")
    return float((-1j * np.vdot(psi, dpsi)).real)


def geometric_phase_from_states(psis: np.ndarray) -> float:
    """Discrete geometric phase of a sampled state path.

    Midpoint scheme: each segment contributes the connection evaluated
    at the normalized midpoint against the endpoint difference, and the
    phase is the negated sum (the loop integral i times <psi|dpsi> for
    the conventions used here).  For closed loops pass a path whose
    first and last samples coincide.
    """
    psis = np.asarray(psis, dtype=complex)
    if psis.ndim != 2 or psis.shape[0] < 2:
        raise DimensionMismatch("need a (k, dim) array with k >= 2 state samples")
    total = 0.0
    for k in range(psis.shape[0] - 1):
        mid = psis[k] + psis[k + 1]
        mid = mid / np.linalg.norm(mid)
        total += connection_one_form(mid, psis[k + 1] - psis[k])
    return -total


def state_from_angles(angles: PolarAngles) -> np.ndarray:
    """Third frame column at the given angles, the state whose
    anholonomy the printed one-form tracks:

    (-sin(t1/2) cos(t2/2) e^{i e1}, -sin(t1/2) sin(t2/2) e^{i e2},
     cos(t1/2)).
    """
    s, c = np.sin(angles.theta1 / 2.0), np.cos(angles.theta1 / 2.0)
    return np.array(
        [
            -s * np.cos(angles.theta2 / 2.0) * np.exp(1j * angles.eps1),
            -s * np.sin(angles.theta2 / 2.0) * np.exp(1j * angles.eps2),
            c,
        ]
    )


# ---------------------------------------------------------------------------
# Three-level loop


def su3_geometric_phase(path: AnglePath) -> float:
    """Trapezoid integral of the three-level one-form along a path.

    The form is -1/2 sin^2(theta1/2) [(d eps1 + d eps2)
    + cos(theta2) (d eps1 - d eps2)].  Returns the raw accumulated
    value; apply :func:`wrap_to_pi` for a principal representative.
    Paths should be sampled densely enough that adjacent angle
    differences stay below about 0.1 rad, or the trapezoid rule
    degrades.
    """
    s2 = np.sin(path.theta1 / 2.0) ** 2
    f1 = -0.5 * s2 * (1.0 + np.cos(path.theta2))
    f2 = -0.5 * s2 * (1.0 - np.cos(path.theta2))
    de1 = np.diff(path.eps1)
    de2 = np.diff(path.eps2)
    seg = 0.5 * (f1[:-1] + f1[1:]) * de1 + 0.5 * (f2[:-1] + f2[1:]) * de2
    return float(np.sum(seg))


def alt_angles_path(
    times: np.ndarray,
    theta: np.ndarray,
    beta: np.ndarray,
    alpha: np.ndarray,
    gamma: np.ndarray,
    closed: bool = False,
) -> AnglePath:
    """Path built from the alternative angle names used in older
    parameterizations of the same frame: theta1 = 2 theta,
    theta2 = 2 beta, eps1 = -gamma - alpha, eps2 = -gamma + alpha.
    """
    theta = np.asarray(theta, dtype=float)
    beta = np.asarray(beta, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    return AnglePath(
        times=np.asarray(times, dtype=float),
        theta1=2.0 * theta,
        theta2=2.0 * beta,
        eps1=-gamma - alpha,
        eps2=-gamma + alpha,
        closed=closed,
    )


def su3_geometric_phase_alt(
    times: np.ndarray,
    theta: np.ndarray,
    beta: np.ndarray,
    alpha: np.ndarray,
    gamma: np.ndarray,
) -> float:
    """One-form of :func:`su3_geometric_phase` rewritten in the
    alternative angles, sin^2(theta) (d gamma + cos(2 beta) d alpha),
    integrated by the same trapezoid rule.  Substituting the angle map
    of :func:`alt_angles_path` into the printed form reproduces this
    expression exactly, so the two integrals agree to rounding.
    """
    theta = np.asarray(theta, dtype=float)
    beta = np.asarray(beta, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    s2 = np.sin(theta) ** 2
    g_gamma = s2
    g_alpha = s2 * np.cos(2.0 * beta)
    seg = 0.5 * (g_gamma[:-1] + g_gamma[1:]) * np.diff(gamma)
    seg += 0.5 * (g_alpha[:-1] + g_alpha[1:]) * np.diff(alpha)
    return float(np.sum(seg))


# ---------------------------------------------------------------------------
# Dynamic contribution


def dynamic_phase(
    times: np.ndarray,
    u1: np.ndarray,
    h: np.ndarray,
    block_sizes: tuple[int, int] = (2, 1),
) -> np.ndarray:
    """Time integral of the block-diagonal part of U1^dag H U1.

    times is a (k,) grid, u1 and h are (k, d, d) sample stacks, and
    block_sizes splits d into the upper and lower fiber blocks (for a
    two-level frame use (1, 1)).  The off-block rectangles are what the
    coset coordinate absorbs, so only the diagonal blocks accumulate
    phase; they are integrated sample-wise by the trapezoid rule and
    returned as one d x d matrix.  The fiber propagator over the window
    is generated by this matrix with the usual -i.
    """
    times = np.asarray(times, dtype=float)
    u1 = np.asarray(u1, dtype=complex)
    h = np.asarray(h, dtype=complex)
    if u1.shape != h.shape or u1.ndim != 3 or u1.shape[0] != times.size:
        raise DimensionMismatch(
            f"need matching (k, d, d) stacks on the time grid, got {u1.shape} and {h.shape}"
        )
    d = u1.shape[1]
    n_up, n_lo = block_sizes
    if n_up + n_lo != d:
        raise DimensionMismatch(
            f"block sizes {block_sizes} do not tile dimension {d}"
        )
    rotated = np.einsum("kji,kjl,klm->kim", u1.conj(), h, u1)
    rotated[:, :n_up, n_up:] = 0.0
    rotated[:, n_up:, :n_up] = 0.0
    return np.trapezoid(rotated, times, axis=0)
