"""
Landau levels near the pole, checked by finite differences
==========================================================

Closed-form levels of an electron on a sphere in a strong normal field,
compared against a direct numerical solution of the polar mode equation.
Natural units throughout (e = mu = m0 = hbar = r = 1, g = 2).
"""

import numpy as np

from spherical_landau import PhysicalParams, Truncation, build_spectrum, energy_level, mode_frequency
from spherical_landau.ode_oracle import GridSpec, certify_spectrum, grid_eigenvalues
from spherical_landau.spectrum import lambda_shift, truncation_for

params = PhysicalParams.natural()
b = 50.0

# The mode frequency grows with |m| but stays close to the cyclotron value
m = np.arange(0, 6)
print("omega_m / omega_c:", mode_frequency(params, b, m) / b)

# so every ladder is nearly the flat one, shifted by m^4 / (2 omega_m^2)
for mm in (0, 2, 5):
    print(f"m={mm}:", [round(float(energy_level(params, b, mm, l)), 6) for l in range(4)])

# The shift lambda_m that couples m to the polar motion fades like b^-1/2
for bb in (1e2, 1e4, 1e6):
    print(f"lambda_1({bb:g}) = {float(lambda_shift(params, bb, 1)):.3e}")

# A level table, spin-split, sorted by energy
table = build_spectrum(params, b, Truncation(m_max=1, l_max=1, n_max=1), with_spin=True)
for level in list(table)[:6]:
    print(level.m, level.l, level.spin.value, round(level.energy, 6))

# How many modes are trustworthy?  Keep states inside theta < 0.3
trunc = truncation_for(params, b, theta_cut=0.3, e_max=np.inf, beta=50.0)
print("admissible truncation:", trunc)

# Independent check: finite differences plus Richardson extrapolation
cert = certify_spectrum(params, b, m_list=range(-2, 3), l_list=range(4))
print(f"worst relative deviation {cert.max_rel_dev:.2e} at (m, l) = {cert.worst}")

# The raw grid error is second order: halving the spacing divides it by 4
grid = GridSpec()
exact = 2 * np.arange(4) + 1.0
coarse = grid_eigenvalues(params, b, 0, 4, grid) - exact
fine = grid_eigenvalues(params, b, 0, 4, grid.refined()) - exact
print("refinement factors:", coarse / fine)
