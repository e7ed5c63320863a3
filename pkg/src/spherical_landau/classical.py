"""Classical orbits of the charge on the sphere.

In the gauge ``A_theta = 0, A_phi = b r theta`` the Hamiltonian

    H = p_theta^2 / (2 mu r^2) + (p_phi - e b r theta)^2 / (2 mu r^2 cos^2 theta)

does not depend on ``phi``, so ``p_phi`` is a constant of motion and the
polar motion is one-dimensional.  Orbits started near the pole stay within

    |theta| < (|p_phi| + sqrt(2 mu r^2 H)) / (e b r),

which is what :func:`check_confinement` tests.

Two fixed-step 4th-order integrators are available.  The default,
``"gauss4"``, is the two-stage Gauss-Legendre collocation method (implicit,
symmetric, symplectic): energy errors stay bounded and scale as ``dt**4``.
``"rk4"`` is the classical explicit Runge-Kutta scheme, whose energy decays
secularly on these fast cyclotron orbits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numba import njit

from .core import NumericalError, PhysicalParams, ValidationError

Method = Literal["gauss4", "rk4"]

CHART_MARGIN = 1e-6
_CHART_LIMIT = math.pi / 2 - CHART_MARGIN


class ChartBoundary(ValidationError):
    pass


class ChartExit(NumericalError):
    def __init__(self, message: str, trajectory: "Trajectory | None" = None):
        super().__init__(message)
        self.trajectory = trajectory


@dataclass(frozen=True)
class ClassicalState:
    theta: float
    phi: float
    p_theta: float
    p_phi: float

    def as_array(self) -> np.ndarray:
        return np.array([self.theta, self.phi, self.p_theta, self.p_phi])


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled orbit; ``states`` columns are theta, phi, p_theta, p_phi."""

    times: np.ndarray
    states: np.ndarray
    energy: np.ndarray
    p_phi_drift: float
    chart_exit: bool = False
    method: str = "gauss4"

    def state(self, i: int) -> ClassicalState:
        return ClassicalState(*map(float, self.states[i]))

    @property
    def relative_energy_drift(self) -> float:
        e0 = self.energy[0]
        return float(np.max(np.abs(self.energy - e0)) / abs(e0)) if e0 != 0 else float(np.max(np.abs(self.energy)))


@njit(cache=True)
def _rhs(theta, p_theta, p_phi, ebr, mr2):
    c = math.cos(theta)
    u = p_phi - ebr * theta
    c2 = c * c
    d_theta = p_theta / mr2
    d_phi = u / (mr2 * c2)
    d_ptheta = ebr * u / (mr2 * c2) - u * u * math.sin(theta) / (mr2 * c2 * c)
    return d_theta, d_phi, d_ptheta


@njit(cache=True)
def _energy(theta, p_theta, p_phi, ebr, mr2):
    c = math.cos(theta)
    u = p_phi - ebr * theta
    return p_theta * p_theta / (2.0 * mr2) + u * u / (2.0 * mr2 * c * c)


@njit(cache=True)
def _gauss4(y0, p_phi, ebr, mr2, dt, steps, limit):
    r3 = math.sqrt(3.0)
    a11 = 0.25
    a12 = 0.25 - r3 / 6.0
    a21 = 0.25 + r3 / 6.0
    a22 = 0.25
    out = np.empty((steps + 1, 3))
    out[0, :] = y0
    th, ph, pt = y0[0], y0[1], y0[2]
    k1t, k1f, k1p = _rhs(th, pt, p_phi, ebr, mr2)
    k2t, k2f, k2p = k1t, k1f, k1p
    done = 0
    for i in range(steps):
        for _ in range(200):
            t1 = th + dt * (a11 * k1t + a12 * k2t)
            p1 = pt + dt * (a11 * k1p + a12 * k2p)
            t2 = th + dt * (a21 * k1t + a22 * k2t)
            p2 = pt + dt * (a21 * k1p + a22 * k2p)
            n1t, n1f, n1p = _rhs(t1, p1, p_phi, ebr, mr2)
            n2t, n2f, n2p = _rhs(t2, p2, p_phi, ebr, mr2)
            change = abs(n1t - k1t) + abs(n1p - k1p) + abs(n2t - k2t) + abs(n2p - k2p)
            size = abs(n1t) + abs(n1p) + abs(n2t) + abs(n2p)
            k1t, k1f, k1p = n1t, n1f, n1p
            k2t, k2f, k2p = n2t, n2f, n2p
            if change <= 4e-16 * size:
                break
        th = th + dt * 0.5 * (k1t + k2t)
        ph = ph + dt * 0.5 * (k1f + k2f)
        pt = pt + dt * 0.5 * (k1p + k2p)
        out[i + 1, 0] = th
        out[i + 1, 1] = ph
        out[i + 1, 2] = pt
        done = i + 1
        if abs(th) >= limit:
            break
    return out[: done + 1]


@njit(cache=True)
def _rk4(y0, p_phi, ebr, mr2, dt, steps, limit):
    out = np.empty((steps + 1, 3))
    out[0, :] = y0
    th, ph, pt = y0[0], y0[1], y0[2]
    done = 0
    for i in range(steps):
        a1, b1, c1 = _rhs(th, pt, p_phi, ebr, mr2)
        a2, b2, c2 = _rhs(th + 0.5 * dt * a1, pt + 0.5 * dt * c1, p_phi, ebr, mr2)
        a3, b3, c3 = _rhs(th + 0.5 * dt * a2, pt + 0.5 * dt * c2, p_phi, ebr, mr2)
        a4, b4, c4 = _rhs(th + dt * a3, pt + dt * c3, p_phi, ebr, mr2)
        th = th + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        ph = ph + dt / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        pt = pt + dt / 6.0 * (c1 + 2.0 * c2 + 2.0 * c3 + c4)
        out[i + 1, 0] = th
        out[i + 1, 1] = ph
        out[i + 1, 2] = pt
        done = i + 1
        if abs(th) >= limit:
            break
    return out[: done + 1]


@njit(cache=True)
def _energies(path, p_phi, ebr, mr2):
    out = np.empty(path.shape[0])
    for i in range(path.shape[0]):
        out[i] = _energy(path[i, 0], path[i, 2], p_phi, ebr, mr2)
    return out


def hamiltonian(params: PhysicalParams, b: float, s: ClassicalState) -> float:
    if abs(s.theta) >= _CHART_LIMIT:
        raise ChartBoundary(f"|theta| = {abs(s.theta)} is outside the coordinate chart")
    return _energy(float(s.theta), float(s.p_theta), float(s.p_phi), params.e * b * params.r, params.mu * params.r**2)


def integrate(
    params: PhysicalParams,
    b: float,
    s0: ClassicalState,
    dt: float,
    steps: int,
    *,
    method: Method = "gauss4",
    backward: bool = False,
) -> Trajectory:
    """Integrate the canonical equations for ``steps`` fixed steps of size ``dt``.

    ``backward=True`` runs time in reverse from ``s0``.  If ``|theta|``
    reaches the chart limit the trajectory is cut there and flagged with
    ``chart_exit=True``.
    """
    if not dt > 0:
        raise ValidationError(f"dt must be positive, got {dt}")
    if steps < 1:
        raise ValidationError(f"steps must be >= 1, got {steps}")
    hamiltonian(params, b, s0)
    kernel = {"gauss4": _gauss4, "rk4": _rk4}.get(method)
    if kernel is None:
        raise ValidationError(f"unknown method {method!r}")
    ebr = params.e * b * params.r
    mr2 = params.mu * params.r**2
    signed = -dt if backward else dt
    y0 = np.array([s0.theta, s0.phi, s0.p_theta], dtype=float)
    path = kernel(y0, float(s0.p_phi), ebr, mr2, signed, int(steps), _CHART_LIMIT)
    states = np.column_stack([path, np.full(path.shape[0], float(s0.p_phi))])
    energy = _energies(path, float(s0.p_phi), ebr, mr2)
    times = signed * np.arange(path.shape[0])
    drift = float(np.max(np.abs(states[:, 3] - s0.p_phi)))
    chart_exit = bool(abs(path[-1, 0]) >= _CHART_LIMIT)
    return Trajectory(times, states, energy, drift, chart_exit, method)


@dataclass(frozen=True)
class ConfinementReport:
    max_theta: float
    bound: float
    holds: bool


def confinement_bound(params: PhysicalParams, b: float, s0: ClassicalState) -> float:
    """``(|p_phi| + sqrt(2 mu r^2 H)) / (e b r)`` for the initial state."""
    energy = params.r**2 * hamiltonian(params, b, s0)
    return (abs(s0.p_phi) + math.sqrt(2.0 * params.mu * energy)) / (params.e * b * params.r)


def check_confinement(traj: Trajectory, params: PhysicalParams, b: float) -> ConfinementReport:
    if traj.chart_exit:
        raise ChartExit("trajectory left the coordinate chart; confinement is undefined", traj)
    max_theta = float(np.max(np.abs(traj.states[:, 0])))
    bound = confinement_bound(params, b, traj.state(0))
    return ConfinementReport(max_theta, bound, max_theta < bound)


def random_initial_states(params: PhysicalParams, count: int, h_max: float, seed: int = 0) -> list[ClassicalState]:
    """States at the pole with energy uniformly distributed over the disc ``H <= h_max``."""
    rng = np.random.default_rng(seed)
    radius = math.sqrt(2.0 * params.mu * params.r**2 * h_max)
    rho = radius * np.sqrt(rng.uniform(0.0, 1.0, count))
    angle = rng.uniform(0.0, 2.0 * math.pi, count)
    return [ClassicalState(0.0, 0.0, float(r * math.cos(a)), float(r * math.sin(a))) for r, a in zip(rho, angle)]
