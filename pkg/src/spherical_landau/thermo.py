"""Grand-canonical thermodynamics of the level spectrum.

Two independent routes to the free energy per unit area are provided:

* :func:`free_energy_direct` sums ``ln(1 + exp(beta (nu - E)))`` over an
  explicit :class:`~spherical_landau.spectrum.LevelTable`;
* :func:`free_energy_analytic` evaluates the closed form obtained from the
  pole expansion of the partition function: a smooth part quadratic in
  ``nu`` plus temperature-damped harmonics periodic in ``nu / (hbar omega_m)``.

The two agree on oscillation periods and phases, not on absolute
normalisation (the closed form counts each ladder with a different factor).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit, logsumexp

from .core import NumericalError, PhysicalParams, Truncation, ValidationError
from .spectrum import (
    EigenvalueOmega,
    LevelTable,
    alpha_shift,
    cyclotron_frequency,
    energy_level,
    free_cyclotron_frequency,
    lambda_shift,
    mode_frequency,
)

PhaseConvention = Literal["derivation_consistent", "paper_literal"]
LSum = Literal["paper_literal", "geometric_exact"]
Exponent = Literal["spectrum", "paper_literal"]
ZeemanFactor = Literal["printed", "with_g"]

PHASE_CONVENTIONS = ("derivation_consistent", "paper_literal")


class Unbracketable(NumericalError):
    pass


@dataclass(frozen=True)
class FermiParams:
    nu: float
    beta: float

    def __post_init__(self):
        if not self.beta > 0:
            raise ValidationError(f"beta must be positive, got {self.beta}")


@dataclass(frozen=True)
class FreeEnergyBreakdown:
    smooth: float
    harmonics: tuple[float, ...]
    total: float
    convention: str


def fermi(energy, fp: FermiParams):
    """Occupation ``1 / (1 + exp(beta (E - nu)))``; saturates cleanly at 0 and 1."""
    return expit(-fp.beta * (np.asarray(energy, dtype=float) - fp.nu))


def log_sinh(x):
    """``log(sinh(x))`` for ``x > 0`` without overflow."""
    x = np.asarray(x, dtype=float)
    return x + np.log1p(-np.exp(-2.0 * x)) - math.log(2.0)


def inv_sinh(x):
    """``1 / sinh(x)`` for ``x > 0``, underflowing to 0 instead of overflowing."""
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore"):
        big = 2.0 * np.exp(-x) / -np.expm1(-2.0 * np.maximum(x, 1e-300))
        return np.where(x > 20.0, big, 1.0 / np.sinh(np.where(x > 20.0, 1.0, x)))


def _prefactor(table: LevelTable, prefactor: float | None) -> float:
    return table.params.areal_prefactor(table.b) if prefactor is None else prefactor


def occupation(table: LevelTable, fp: FermiParams, prefactor: float | None = None) -> float:
    """Particle number per unit area at chemical potential ``fp.nu``."""
    return _prefactor(table, prefactor) * math.fsum(fermi(table.energies, fp))


def free_energy_direct(table: LevelTable, fp: FermiParams, n_electrons: float, prefactor: float | None = None) -> float:
    """``N nu - (P / beta) sum ln(1 + exp(beta (nu - E)))`` with ``P = e b / (4 pi hbar^2)``."""
    if len(table) == 0:
        raise ValueError("empty level table")
    log_terms = np.logaddexp(0.0, fp.beta * (fp.nu - table.energies))
    return n_electrons * fp.nu - _prefactor(table, prefactor) / fp.beta * math.fsum(log_terms)


def chemical_potential(table: LevelTable, beta: float, n_electrons: float, prefactor: float | None = None) -> float:
    """Solve ``P sum f(E; nu, beta) = N`` for ``nu``.

    The occupation is strictly increasing in ``nu``, so the root inside
    ``[min E - 50/beta, max E + 50/beta]`` is unique.

    Raises
    ------
    Unbracketable
        If ``N`` is not strictly between 0 and the number of available states.
    """
    weight = _prefactor(table, prefactor)
    capacity = weight * len(table)
    if not (0.0 < n_electrons < capacity):
        raise Unbracketable(f"N={n_electrons} outside (0, {capacity}) for this table")
    energies = table.energies

    def excess(nu):
        return weight * math.fsum(fermi(energies, FermiParams(nu, beta))) - n_electrons

    lo = energies.min() - 50.0 / beta
    hi = energies.max() + 50.0 / beta
    if excess(lo) > 0 or excess(hi) < 0:
        raise Unbracketable(f"N={n_electrons} not bracketed by [{lo}, {hi}]")
    return brentq(excess, lo, hi, xtol=1e-15, rtol=1e-12, maxiter=500)


def _modes(truncation: Truncation, m_values: Sequence[int] | None, even_m_only: bool) -> np.ndarray:
    ms = truncation.mode_numbers(even_m_only) if m_values is None else list(m_values)
    return np.asarray(ms, dtype=float)


def log_partition_function(
    params: PhysicalParams,
    b: float,
    beta: float,
    truncation: Truncation,
    *,
    l_sum: LSum = "paper_literal",
    with_spin: bool = True,
    exponent: Exponent = "spectrum",
    eigenvalue_omega: EigenvalueOmega = "mode",
    m_values: Sequence[int] | None = None,
    even_m_only: bool = False,
) -> float:
    """Natural log of :func:`partition_function`, evaluated in log space."""
    ms = _modes(truncation, m_values, even_m_only)
    omega_m = mode_frequency(params, b, ms)
    if exponent == "spectrum":
        ladder = omega_m if eigenvalue_omega == "mode" else np.full_like(omega_m, cyclotron_frequency(params, b))
        offset = energy_level(params, b, ms, 0, eigenvalue_omega) - params.hbar * ladder / 2.0
    elif exponent == "paper_literal":
        ladder = omega_m
        lam = lambda_shift(params, b, ms)
        offset = params.hbar**2 * ms**2 / (2.0 * params.mu) + lam**2 * params.hbar * omega_m / 2.0
    else:
        raise ValueError(f"unknown exponent convention {exponent!r}")
    z = beta * params.hbar * ladder / 2.0
    if l_sum == "paper_literal":
        log_ladder = -log_sinh(z)
    elif l_sum == "geometric_exact":
        log_ladder = -log_sinh(z) - math.log(2.0)
    else:
        raise ValueError(f"unknown l_sum convention {l_sum!r}")
    log_z = math.log(params.areal_prefactor(b)) + float(logsumexp(-beta * offset + log_ladder))
    if with_spin:
        y = abs(beta * params.g_factor * params.hbar * free_cyclotron_frequency(params, b) / 4.0)
        log_z += y + math.log1p(math.exp(-2.0 * y))
    return log_z


def partition_function(params: PhysicalParams, b: float, beta: float, truncation: Truncation, **kwargs) -> float:
    """Partition function per unit area with the ladder summed in closed form.

    ``P * [2 cosh(beta g hbar omega_0 / 4)] * sum_m exp(-beta a_m) * S_m``
    where the ladder sum ``S_m`` is ``1/sinh(beta hbar omega/2)`` for
    ``l_sum="paper_literal"`` and the exact geometric value
    ``1/(2 sinh(beta hbar omega/2))`` for ``l_sum="geometric_exact"``.
    With ``exponent="spectrum"`` the offset ``a_m`` is the ladder origin of
    the closed-form levels; ``"paper_literal"`` uses
    ``hbar^2 m^2/(2 mu) + lambda_m^2 hbar omega_m / 2``.
    Returns ``inf`` if the value overflows a double.
    """
    log_z = log_partition_function(params, b, beta, truncation, **kwargs)
    return math.exp(log_z) if log_z < 709.0 else math.inf


def _harmonic_indices(n_max: int) -> np.ndarray:
    return np.arange(1, n_max + 1, dtype=float)


def oscillation_phase(params: PhysicalParams, b, nu, m, n, convention: PhaseConvention = "derivation_consistent"):
    """Argument of the ``n``-th harmonic's sine.

    ``derivation_consistent``: ``(2 n pi / (hbar omega_m)) (nu - alpha_m)``;
    ``paper_literal``: ``2 n pi nu / (hbar omega_m) - alpha_m / (hbar omega_m)``.
    Both reduce to ``(2 n pi / (hbar omega_m)) nu`` with identical arithmetic at ``m = 0``.
    """
    m = np.asarray(m, dtype=float)
    n = np.asarray(n, dtype=float)
    hw = params.hbar * mode_frequency(params, b, m)
    alpha = alpha_shift(params, b, m)
    k = 2.0 * n * math.pi / hw
    if convention == "derivation_consistent":
        return k * (nu - alpha)
    if convention == "paper_literal":
        return k * nu - alpha / hw
    raise ValueError(f"unknown phase convention {convention!r}")


def zeeman_cosine(params: PhysicalParams, b, m, n, zeeman: ZeemanFactor = "printed"):
    """Spin factor of the ``n``-th harmonic.

    ``printed``: ``cos(n pi omega_0 / (2 omega_m))``.  ``with_g``:
    ``cos(n pi g omega_0 / (2 omega_m))``, the value the residue of
    ``2 cosh(beta g hbar omega_0 / 4)`` actually takes; the two coincide
    only for ``g = 1``.
    """
    if zeeman == "printed":
        coupling = 1.0
    elif zeeman == "with_g":
        coupling = params.g_factor
    else:
        raise ValueError(f"unknown zeeman factor {zeeman!r}")
    n = np.asarray(n, dtype=float)
    omega_0 = free_cyclotron_frequency(params, b)
    return np.cos(n * math.pi * (coupling * omega_0) / (2.0 * mode_frequency(params, b, m)))


def damping_argument(params: PhysicalParams, b, beta, m, n):
    """``2 pi^2 n / (beta hbar omega_m)``."""
    return 2.0 * math.pi**2 * np.asarray(n, dtype=float) / (beta * params.hbar * mode_frequency(params, b, m))


def harmonic_terms(
    params: PhysicalParams,
    b: float,
    beta: float,
    nu: float,
    ms: np.ndarray,
    n_max: int,
    convention: PhaseConvention = "derivation_consistent",
    frozen_b: float | None = None,
    zeeman: ZeemanFactor = "printed",
) -> np.ndarray:
    """Array ``[m, n]`` of ``(-1)^n/(4 beta n) sin(phase) cos(n pi omega_0/(2 omega_m)) / sinh(x)``.

    No areal prefactor.  With ``frozen_b`` the phase, the Zeeman cosine and
    ``1/(4 beta n)`` are evaluated at ``frozen_b`` and only the damping
    follows ``b``.
    """
    ms = np.asarray(ms, dtype=float)[:, None]
    n = _harmonic_indices(n_max)[None, :]
    b_osc = b if frozen_b is None else frozen_b
    sign = np.where(n % 2 == 0, 1.0, -1.0)
    spin = zeeman_cosine(params, b_osc, ms, n, zeeman)
    phase = oscillation_phase(params, b_osc, nu, ms, n, convention)
    return sign / (4.0 * beta * n) * np.sin(phase) * spin * inv_sinh(damping_argument(params, b, beta, ms, n))


def smooth_free_energy(params: PhysicalParams, b: float, nu: float, ms: np.ndarray) -> np.ndarray:
    """Per-mode smooth part ``(nu - alpha_m)^2/(hbar w_m) + [(g w_0/(2 w_m))^2/2 - 1/6] hbar w_m``."""
    hw = params.hbar * mode_frequency(params, b, ms)
    ratio = params.g_factor * free_cyclotron_frequency(params, b) * params.hbar / (2.0 * hw)
    return (nu - alpha_shift(params, b, ms)) ** 2 / hw + (0.5 * ratio**2 - 1.0 / 6.0) * hw


def free_energy_analytic(
    params: PhysicalParams,
    b: float,
    fp: FermiParams,
    n_electrons: float,
    truncation: Truncation,
    convention: PhaseConvention = "derivation_consistent",
    *,
    m_values: Sequence[int] | None = None,
    even_m_only: bool = False,
    zeeman: ZeemanFactor = "printed",
) -> FreeEnergyBreakdown:
    """Closed-form free energy per unit area, split into smooth part and harmonics.

    ``harmonics[n-1]`` is the ``n``-th harmonic summed over modes, including
    the areal prefactor.
    """
    ms = _modes(truncation, m_values, even_m_only)
    weight = params.areal_prefactor(b)
    smooth = n_electrons * fp.nu + weight * math.fsum(smooth_free_energy(params, b, fp.nu, ms))
    terms = harmonic_terms(params, b, fp.beta, fp.nu, ms, truncation.n_max, convention, zeeman=zeeman)
    harmonics = tuple(float(v) for v in weight * terms.sum(axis=0))
    return FreeEnergyBreakdown(smooth, harmonics, smooth + math.fsum(harmonics), convention)


def free_energy_oscillatory(
    params: PhysicalParams,
    b: float,
    fp: FermiParams,
    truncation: Truncation,
    convention: PhaseConvention = "derivation_consistent",
    *,
    frozen_b: float | None = None,
    m_values: Sequence[int] | None = None,
    even_m_only: bool = False,
    zeeman: ZeemanFactor = "printed",
) -> float:
    """Oscillatory part of :func:`free_energy_analytic` alone (its low-temperature leading term).

    ``frozen_b`` freezes everything except the areal prefactor and the
    damping, so that the ``b``-derivative keeps only those two dependences.
    """
    ms = _modes(truncation, m_values, even_m_only)
    terms = harmonic_terms(params, b, fp.beta, fp.nu, ms, truncation.n_max, convention, frozen_b, zeeman)
    return params.areal_prefactor(b) * math.fsum(terms.ravel())


def z_density(
    params: PhysicalParams,
    b: float,
    energy,
    truncation: Truncation,
    *,
    m_values: Sequence[int] | None = None,
    even_m_only: bool = False,
    zeeman: ZeemanFactor = "printed",
):
    """Inverse Laplace transform of ``Z(beta)/beta^2`` from the pole sum.

    Per mode: ``(E - alpha_m)^2/(hbar w_m) + [(g w_0/(2 w_m))^2/2 - 1/6] hbar w_m``
    minus ``(hbar w_m / 2) sum_n (-1)^n cos(n pi w_0/(2 w_m)) cos(2 n pi (E - alpha_m)/(hbar w_m)) / (n pi)^2``,
    all times ``e b / (4 pi hbar^2)``.  Broadcasts over ``energy``.
    """
    energy = np.asarray(energy, dtype=float)
    if np.any(energy < 0):
        raise ValueError("z_density is defined for E >= 0")
    ms = _modes(truncation, m_values, even_m_only)
    n = _harmonic_indices(truncation.n_max)
    sign = np.where(n % 2 == 0, 1.0, -1.0)
    flat = energy.reshape(-1, 1)
    total = np.zeros(flat.shape[0])
    for m in ms:
        hw = params.hbar * float(mode_frequency(params, b, m))
        alpha = float(alpha_shift(params, b, m))
        smooth = smooth_free_energy(params, b, flat[:, 0], np.array([m]))
        coeff = sign * zeeman_cosine(params, b, m, n, zeeman) / (n * math.pi) ** 2
        osc = np.cos(2.0 * n * math.pi * (flat - alpha) / hw) @ coeff
        total += smooth - hw / 2.0 * osc
    out = params.areal_prefactor(b) * total
    return out.reshape(energy.shape) if energy.ndim else float(out[0])
