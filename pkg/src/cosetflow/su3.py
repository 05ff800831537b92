"""Three-level specialization of the base/fiber factorization.

For a 3x3 Hamiltonian split into a 2x2 upper block, a scalar lower block and
a coupling column, the coset coordinate is a complex pair z = (z1, z2).  Its
Riccati flow linearizes after mapping to a unit complex 3-vector

    m_mu = -z_mu / (D e^{i phi}),   m_3 = 1 / (D e^{i phi}),
    D = sqrt(1 + |z1|^2 + |z2|^2),

where the auxiliary phase phi obeys phi_dot = 2 Re(V^dag z).  In the real
6-vector view (m1r, m2r, m3r, m1i, m2i, m3i) the flow is a rotation,
m_dot = G(a) m with G antisymmetric, so |m| = 1 is preserved exactly and the
m chart covers points where z blows up.  This module holds the coefficient
maps, the z and m flows, the polar-angle chart and the closed-form coset
factor; the fiber lives in :mod:`cosetflow.engine`.

Conventions for degenerate angles: theta1 = 0 zeroes every other angle, and
z2 = 0 zeroes eps2 (the azimuths are undefined there, so the chart pins them).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import CoefficientVector
from .errors import BaseSingularity

__all__ = [
    "PolarAngles",
    "M3_CHART_FLOOR",
    "su3_v_f",
    "su3_z_rhs",
    "phi_rhs",
    "z_to_m",
    "m_to_z",
    "m_rotation_generator",
    "m_flow",
    "m_to_real",
    "m_from_real",
    "polar_from_z",
    "z_from_polar",
    "build_u1_su3",
    "base_trajectory",
]

_SQRT3 = np.sqrt(3.0)

#: Smallest |m3| for which the z chart is still considered usable.
M3_CHART_FLOOR = 1e-9


@dataclass(frozen=True)
class PolarAngles:
    """Polar chart of the coset coordinate.

    theta1, theta2 lie in [0, pi); eps1, eps2 in [0, 2 pi).  theta2 can reach
    pi exactly when z1 = 0; the chart tolerates that edge.
    """

    theta1: float
    theta2: float
    eps1: float
    eps2: float


def su3_v_f(coeffs: CoefficientVector) -> tuple[np.ndarray, np.ndarray]:
    """Coupling vector V and Hermitian 2x2 matrix F of the z flow.

    V = (a4 - i a5, a6 - i a7); F carries the traceless diagonal data,
    F = [[a3 + sqrt(3) a8, a1 - i a2], [a1 + i a2, -a3 + sqrt(3) a8]].
    The trace part never enters: it cancels between the two diagonal blocks.
    """
    a = coeffs.a
    v = np.array([a[3] - 1j * a[4], a[5] - 1j * a[6]])
    f = np.array(
        [
            [a[2] + _SQRT3 * a[7], a[0] - 1j * a[1]],
            [a[0] + 1j * a[1], -a[2] + _SQRT3 * a[7]],
        ]
    )
    return v, f


def su3_z_rhs(coeffs: CoefficientVector, z: np.ndarray) -> np.ndarray:
    """Riccati right-hand side for the complex pair z.

    z_dot_mu = -i V_mu - i F_{mu nu} z_nu + i (V^dag z) z_mu.
    """
    z = np.asarray(z, dtype=complex)
    v, f = su3_v_f(coeffs)
    return -1j * v - 1j * (f @ z) + 1j * np.vdot(v, z) * z


def phi_rhs(coeffs: CoefficientVector, z: np.ndarray) -> float:
    """Rate of the linearizing phase: phi_dot = Re(V^dag z).

    This is the unique rate that makes the transformed vector
    (-z1, -z2, 1) / (D e^{i phi}) obey the linear rotation of
    :func:`m_rotation_generator`: differentiating m3 = e^{-i phi}/D along
    the Riccati flow gives dm3/dt = (Im - i Re)(V^dag z) m3, whose
    imaginary part is -Re(V^dag z) m3, and the upper components then close
    automatically.
    """
    v, _ = su3_v_f(coeffs)
    return float(np.vdot(v, np.asarray(z, dtype=complex)).real)


def z_to_m(z: np.ndarray, phi: float) -> np.ndarray:
    """Map (z, phi) to the unit complex 3-vector m."""
    z = np.asarray(z, dtype=complex)
    scale = 1.0 / (np.sqrt(1.0 + np.sum(np.abs(z) ** 2)) * np.exp(1j * phi))
    return np.array([-z[0] * scale, -z[1] * scale, scale])


def m_to_z(m: np.ndarray) -> tuple[np.ndarray, float]:
    """Invert :func:`z_to_m`, returning (z, phi) with phi = -arg(m3).

    Raises
    ------
    BaseSingularity
        If |m3| <= 1e-9, where the z chart degenerates.
    """
    m = np.asarray(m, dtype=complex)
    if abs(m[2]) <= M3_CHART_FLOOR:
        raise BaseSingularity(
            f"|m3| = {abs(m[2]):.3e} is at or below {M3_CHART_FLOOR:.0e}; z chart degenerate"
        )
    z = np.array([-m[0] / m[2], -m[1] / m[2]])
    return z, float(-np.angle(m[2]))


def m_to_real(m: np.ndarray) -> np.ndarray:
    """Real 6-vector view (m1r, m2r, m3r, m1i, m2i, m3i)."""
    m = np.asarray(m, dtype=complex)
    return np.concatenate([m.real, m.imag])


def m_from_real(m6: np.ndarray) -> np.ndarray:
    """Inverse of :func:`m_to_real`."""
    m6 = np.asarray(m6, dtype=float)
    return m6[:3] + 1j * m6[3:]


def m_rotation_generator(coeffs: CoefficientVector) -> np.ndarray:
    """Antisymmetric 6x6 generator of the linear m flow, m_dot = G m.

    Acts on the real 6-vector view.  Only the traceless coefficients enter.
    """
    a1, a2, a3, a4, a5, a6, a7, a8 = coeffs.a
    r = a3 + _SQRT3 * a8
    s = -a3 + _SQRT3 * a8
    return np.array(
        [
            [0.0, -a2, a5, r, a1, -a4],
            [a2, 0.0, a7, a1, s, -a6],
            [-a5, -a7, 0.0, -a4, -a6, 0.0],
            [-r, -a1, a4, 0.0, -a2, a5],
            [-a1, -s, a6, a2, 0.0, a7],
            [a4, a6, 0.0, -a5, -a7, 0.0],
        ]
    )


def m_flow(
    schedule,
    t0: float,
    t1: float,
    *,
    tol: float = 1e-9,
    samples: int = 1001,
    method: str = "DOP853",
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate the linear m flow from m(t0) = (0, 0, 1).

    Parameters
    ----------
    schedule : callable
        t -> CoefficientVector.
    tol : float
        Relative tolerance passed to the integrator.

    Returns
    -------
    (times, m) : tuple of arrays
        times has shape (samples,), m has shape (samples, 3) complex.
    """
    from .engine import _solve  # local import; engine owns the integrator policy

    def rhs(t, y):
        return m_rotation_generator(schedule(t)) @ y

    y0 = np.array([0.0, 0.0, 1.0, 0.0, 0.0, 0.0])
    times, ys = _solve(rhs, t0, t1, y0, tol=tol, samples=samples, method=method)
    return times, ys[:, :3] + 1j * ys[:, 3:]


def polar_from_z(z: np.ndarray) -> PolarAngles:
    """Polar angles of a coset coordinate.

    tan(theta1/2) = |z|, tan(theta2/2) = |z2|/|z1|, eps_mu = arg(-z_mu),
    with the degenerate-angle conventions from the module docstring.
    """
    z = np.asarray(z, dtype=complex)
    r = float(np.sqrt(np.sum(np.abs(z) ** 2)))
    if r == 0.0:
        return PolarAngles(0.0, 0.0, 0.0, 0.0)
    theta1 = 2.0 * np.arctan(r)
    theta2 = 2.0 * np.arctan2(abs(z[1]), abs(z[0]))
    eps1 = float(np.angle(-z[0])) % (2.0 * np.pi) if z[0] != 0 else 0.0
    eps2 = float(np.angle(-z[1])) % (2.0 * np.pi) if z[1] != 0 else 0.0
    return PolarAngles(float(theta1), float(theta2), eps1, eps2)


def z_from_polar(angles: PolarAngles) -> np.ndarray:
    """Coset coordinate for given polar angles.

    z1 = -tan(theta1/2) cos(theta2/2) e^{i eps1},
    z2 = -tan(theta1/2) sin(theta2/2) e^{i eps2}.
    """
    t = np.tan(angles.theta1 / 2.0)
    return np.array(
        [
            -t * np.cos(angles.theta2 / 2.0) * np.exp(1j * angles.eps1),
            -t * np.sin(angles.theta2 / 2.0) * np.exp(1j * angles.eps2),
        ]
    )


def build_u1_su3(angles: PolarAngles) -> np.ndarray:
    """Closed-form unitary coset factor in the polar chart.

    The (3,3) entry is cos(theta1/2); the off-blocks carry the azimuths.
    Agrees with the generic z-based construction in the engine.
    """
    th1, th2 = angles.theta1, angles.theta2
    e1, e2 = angles.eps1, angles.eps2
    s14sq = np.sin(th1 / 4.0) ** 2
    s12 = np.sin(th1 / 2.0)
    return np.array(
        [
            [
                1.0 - 2.0 * s14sq * np.cos(th2 / 2.0) ** 2,
                -s14sq * np.sin(th2) * np.exp(1j * (e1 - e2)),
                -s12 * np.cos(th2 / 2.0) * np.exp(1j * e1),
            ],
            [
                -s14sq * np.sin(th2) * np.exp(-1j * (e1 - e2)),
                1.0 - 2.0 * s14sq * np.sin(th2 / 2.0) ** 2,
                -s12 * np.sin(th2 / 2.0) * np.exp(1j * e2),
            ],
            [
                s12 * np.cos(th2 / 2.0) * np.exp(-1j * e1),
                s12 * np.sin(th2 / 2.0) * np.exp(-1j * e2),
                np.cos(th1 / 2.0),
            ],
        ]
    )


def base_trajectory(traj) -> dict[str, np.ndarray]:
    """Angle time series of an m trajectory, for latitude/azimuth plots.

    Accepts anything with an ``m`` attribute of shape (samples, 3), such as
    an engine trajectory from a three-level run, or that array itself.

    Angles are read directly off m, so no z-chart guard is needed:
    theta1 from |m3|, theta2 from the |m1| : |m2| ratio, azimuths from the
    phases of m relative to m3.  Azimuths come back both unwrapped (continuous,
    suitable for phase integrals) and wrapped to [0, 2 pi).

    Returns a dict with keys theta1, theta2, eps1, eps2, eps1_wrapped,
    eps2_wrapped, phi; each an array over the sample times.
    """
    m = getattr(traj, "m", traj)
    if m is None:
        raise ValueError("trajectory has no m samples (not a three-level run)")
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[1] != 3:
        raise ValueError(f"expected m with shape (samples, 3), got {m.shape}")
    absm = np.abs(m)
    theta1 = 2.0 * np.arccos(np.clip(absm[:, 2], 0.0, 1.0))
    theta2 = 2.0 * np.arctan2(absm[:, 1], absm[:, 0])
    phi = -np.angle(m[:, 2])

    def azimuth(col: np.ndarray, defined: np.ndarray) -> np.ndarray:
        raw = np.where(defined, np.angle(col) + phi, 0.0)
        # Unwrap only through the defined stretch; degenerate points hold 0.
        out = raw.copy()
        idx = np.flatnonzero(defined)
        if idx.size > 1:
            out[idx] = raw[idx[0]] + np.concatenate(
                [[0.0], np.cumsum(_principal(np.diff(raw[idx])))]
            )
        return out

    tiny = 1e-12
    eps1 = azimuth(m[:, 0], absm[:, 0] > tiny)
    eps2 = azimuth(m[:, 1], absm[:, 1] > tiny)
    return {
        "theta1": theta1,
        "theta2": theta2,
        "eps1": eps1,
        "eps2": eps2,
        "eps1_wrapped": eps1 % (2.0 * np.pi),
        "eps2_wrapped": eps2 % (2.0 * np.pi),
        "phi": np.unwrap(phi),
    }


def _principal(d: np.ndarray) -> np.ndarray:
    """Fold angle increments into (-pi, pi]."""
    return (d + np.pi) % (2.0 * np.pi) - np.pi
