"""
Grand-canonical free energy: level sum against closed form
==========================================================

The free energy per unit area can be summed directly over the spin-split
levels, or written as a smooth part plus harmonics damped by
1/sinh(2 pi^2 n / (beta hbar omega_m)).  Both oscillate with period
hbar omega_c in the chemical potential.
"""

import numpy as np

from spherical_landau import PhysicalParams, Truncation, build_spectrum
from spherical_landau.magnetization import spectral_peaks
from spherical_landau.spectrum import harmonic_cutoff
from spherical_landau.thermo import (
    FermiParams,
    chemical_potential,
    free_energy_analytic,
    free_energy_direct,
    partition_function,
)

params = PhysicalParams.natural()
b, beta = 100.0, 50.0

# Harmonics are kept until the damping ratio drops below 1e-12
n_max = harmonic_cutoff(params, b, beta)
trunc = Truncation(m_max=5, l_max=25, n_max=n_max)
print("n_max =", n_max)

# Closed form, split into its parts
fe = free_energy_analytic(params, b, FermiParams(nu=130.0, beta=beta), 0.0, trunc)
print(f"smooth {fe.smooth:.6f}, first harmonics {np.round(fe.harmonics[:4], 8)}, total {fe.total:.6f}")

# The chemical potential that holds a given number of electrons
table = build_spectrum(params, b, trunc, with_spin=True)
nu = chemical_potential(table, beta, n_electrons=20.0)
print(f"nu for N = 20: {nu:.6f}")

# Direct sum over a wide window of nu: twenty periods of hbar omega_c
nus = np.linspace(5.0, 2005.0, 1024, endpoint=False)
f_direct = np.array([free_energy_direct(table, FermiParams(x, beta), 0.0) for x in nus])
peaks = spectral_peaks(nus, f_direct, detrend_order=2)
print(f"period in nu from the level sum: {1 / peaks.frequencies[0]:.2f} (hbar omega_c = {b})")

# Partition function: the printed ladder sum is twice the geometric series
z_lit = partition_function(params, 10.0, 1.0, Truncation(3, 0, 1), l_sum="paper_literal")
z_geo = partition_function(params, 10.0, 1.0, Truncation(3, 0, 1), l_sum="geometric_exact")
print(f"Z printed / Z geometric = {z_lit / z_geo:.12f}")
