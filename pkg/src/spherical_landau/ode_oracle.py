"""Finite-difference eigensolver for the polar mode equation.

Independent check on the closed-form levels: the mode equation is
discretised with second-order central differences and Dirichlet ends, the
lowest eigenvalues of the symmetric tridiagonal matrix are extracted by
Sturm-sequence bisection (LAPACK ``stebz`` via
:func:`scipy.linalg.eigh_tridiagonal`), and two grids are combined by
Richardson extrapolation.

Three algebraically equivalent forms of the equation can be discretised:

``"theta"``
    the equation in the polar angle itself,
    ``-T'' + ((mu omega_m/hbar)**2 theta**2 + (2 e m b r/hbar**2) theta) T = (2 mu/hbar**2) E~ T``;
``"unshifted"``
    after scaling ``theta = rho_m y``: ``-Y'' + (y**2 + lambda_m y) Y = sigma Y``;
``"shifted"``
    after completing the square, ``x = y + lambda_m/2``: ``-X'' + x**2 X = eps X``.

Whatever the form, results are reported as the dimensionless ``eps`` of the
shifted equation, whose exact values are ``2 l + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .core import NumericalError, PhysicalParams, ValidationError
from .spectrum import (
    EigenvalueOmega,
    energy_level,
    lambda_shift,
    mode_frequency,
    oscillator_length,
)

Form = Literal["theta", "unshifted", "shifted"]


class GridTooCoarse(NumericalError):
    pass


class NonConvergence(NumericalError):
    pass


@dataclass(frozen=True)
class GridSpec:
    """Grid over ``x in [-half_width, half_width]`` (units of ``rho_m``)."""

    half_width: float = 12.0
    points: int = 2001

    def __post_init__(self):
        if self.half_width < 8:
            raise ValidationError(f"half_width must be >= 8, got {self.half_width}")
        if self.points < 201 or self.points % 2 == 0:
            raise ValidationError(f"points must be odd and >= 201, got {self.points}")

    def refined(self) -> "GridSpec":
        return GridSpec(self.half_width, 2 * self.points - 1)


@dataclass(frozen=True)
class EigenResult:
    m: int
    eigenvalues: np.ndarray
    grid: GridSpec
    estimated_error: np.ndarray
    lambda_m: float
    omega_m: float


def _lowest(diag: np.ndarray, off: np.ndarray, k: int) -> np.ndarray:
    try:
        vals = eigh_tridiagonal(diag, off, eigvals_only=True, select="i", select_range=(0, k - 1))
    except LinAlgError as exc:
        raise NonConvergence(str(exc)) from exc
    if vals.shape != (k,) or not np.all(np.isfinite(vals)):
        raise NonConvergence(f"bisection returned {vals!r}")
    return vals


def grid_eigenvalues(params: PhysicalParams, b: float, m: int, k: int, grid: GridSpec, form: Form = "shifted") -> np.ndarray:
    """Lowest ``k`` values of ``eps`` on a single grid, no extrapolation."""
    if k < 1:
        raise ValidationError("k must be >= 1")
    lam = float(lambda_shift(params, b, m))
    x = np.linspace(-grid.half_width, grid.half_width, grid.points)[1:-1]
    h = 2.0 * grid.half_width / (grid.points - 1)
    if form == "shifted":
        diag = 2.0 / h**2 + x**2
        off = np.full(x.size - 1, -1.0 / h**2)
        return _lowest(diag, off, k)
    if form == "unshifted":
        y = x - lam / 2.0
        diag = 2.0 / h**2 + (y**2 + lam * y)
        off = np.full(x.size - 1, -1.0 / h**2)
        return _lowest(diag, off, k) + lam**2 / 4.0
    if form == "theta":
        rho = float(oscillator_length(params, b, m))
        omega_m = float(mode_frequency(params, b, m))
        theta = rho * (x - lam / 2.0)
        dt = rho * h
        quad = (params.mu * omega_m / params.hbar) ** 2
        lin = 2.0 * params.e * m * b * params.r / params.hbar**2
        diag = 2.0 / dt**2 + quad * theta**2 + lin * theta
        off = np.full(x.size - 1, -1.0 / dt**2)
        kappa = _lowest(diag, off, k)
        return kappa * rho**2 + lam**2 / 4.0
    raise ValidationError(f"unknown form {form!r}")


def solve_mode(
    params: PhysicalParams,
    b: float,
    m: int,
    k: int,
    grid: GridSpec | None = None,
    *,
    form: Form = "shifted",
    richardson: bool = True,
    max_error: float = 1e-4,
) -> EigenResult:
    """Lowest ``k`` eigenvalues ``eps`` of mode ``m``.

    Solves on ``grid`` and on its refinement (``2*points - 1`` nodes, half
    the spacing) and combines them as ``(4 fine - coarse) / 3``.  The
    error estimate is the size of that correction, ``|fine - coarse| / 3``.

    Raises
    ------
    GridTooCoarse
        If any estimate exceeds ``max_error`` times the level spacing (2).
    NonConvergence
        If the tridiagonal bisection fails.
    """
    grid = grid or GridSpec()
    coarse = grid_eigenvalues(params, b, m, k, grid, form)
    fine = grid_eigenvalues(params, b, m, k, grid.refined(), form)
    estimate = np.abs(fine - coarse) / 3.0
    if np.any(estimate > max_error * 2.0):
        worst = int(np.argmax(estimate))
        raise GridTooCoarse(f"m={m}: error estimate {estimate[worst]:.3e} at level {worst} exceeds tolerance")
    values = (4.0 * fine - coarse) / 3.0 if richardson else coarse
    if np.any(np.diff(values) <= 0):
        raise NonConvergence(f"m={m}: eigenvalues not strictly increasing")
    return EigenResult(
        m=int(m),
        eigenvalues=values,
        grid=grid,
        estimated_error=estimate,
        lambda_m=float(lambda_shift(params, b, m)),
        omega_m=float(mode_frequency(params, b, m)),
    )


def energies_from_eigenvalues(params: PhysicalParams, result: EigenResult) -> np.ndarray:
    """``E = (eps - lambda**2/4) hbar omega_m / 2 + hbar**2 m**2 / (2 mu)``."""
    reduced = (result.eigenvalues - result.lambda_m**2 / 4.0) * params.hbar * result.omega_m / 2.0
    return reduced + params.hbar**2 * result.m**2 / (2.0 * params.mu)


@dataclass(frozen=True)
class CertifyRow:
    m: int
    l: int
    closed_form: float
    fd: float
    rel_dev: float


@dataclass(frozen=True)
class Certification:
    max_rel_dev: float
    worst: tuple[int, int]
    rows: tuple[CertifyRow, ...]


def certify_spectrum(
    params: PhysicalParams,
    b: float,
    m_list: Sequence[int],
    l_list: Sequence[int],
    grid: GridSpec | None = None,
    *,
    form: Form = "theta",
    eigenvalue_omega: EigenvalueOmega = "mode",
) -> Certification:
    """Worst relative deviation between closed-form and finite-difference energies."""
    m_list = list(m_list)
    l_list = sorted(set(int(l) for l in l_list))
    if not m_list or not l_list:
        raise ValidationError("m_list and l_list must be non-empty")
    if l_list[0] < 0:
        raise ValidationError("l values must be non-negative")
    k = l_list[-1] + 1
    rows = []
    for m in m_list:
        fd = energies_from_eigenvalues(params, solve_mode(params, b, m, k, grid, form=form))
        for l in l_list:
            closed = float(energy_level(params, b, m, l, eigenvalue_omega))
            rel = abs(fd[l] - closed) / abs(closed)
            rows.append(CertifyRow(int(m), l, closed, float(fd[l]), float(rel)))
    worst = max(rows, key=lambda row: row.rel_dev)
    return Certification(worst.rel_dev, (worst.m, worst.l), tuple(rows))
