"""A weak permittivity grating lit beyond its Brewster angle.

The grating is eps = 1 + z0 + z1 exp(i K y) inside a strip of thickness ell.
Above the Brewster angle of the homogeneous part, the zeroth-order
reflection vanishes at first and second order in k ell, and a first
diffraction channel opens once k passes a threshold kappa0.
"""

import math

from bergmann2d import grating, lowfreq

spec = grating.GratingSpec(z0=10.58, z1=0.07, K=math.pi, ell=0.1)
setup = grating.brewster_setup(spec)
print(f"Brewster angle {setup.theta_B_deg:.3f} deg, incidence at {setup.theta0_deg:.3f} deg")
print(f"channel 1 opens at k = {setup.kappa0 / spec.K:.4f} K")

# Closed-form channel weights at a wavenumber where only j = 0 is open.
k = 0.45 * spec.K
for sign, name in ((1, "reflected"), (-1, "transmitted")):
    t1 = grating.tau(1, 0, sign, k, setup.theta0, spec)
    t2 = grating.tau(2, 0, sign, k, setup.theta0, spec)
    print(f"{name:>11}: tau1 = {t1.real:+.6f}{t1.imag:+.6f}i   tau2 = {t2.real:+.6f}{t2.imag:+.6f}i")

# The same weights fall out of the general amplitude formulas applied to
# the grating's line spectrum.
kin = lowfreq.ScatterKinematics(k, setup.theta0)
amp = lowfreq.amplitude(kin, spec.alpha_beta(), k * spec.ell)
for ch in amp.dirac:
    print(f"channel at {ch.theta_deg:8.3f} deg: weight {ch.weight.real:+.3e}{ch.weight.imag:+.3e}i")

# Once k > kappa0 the first-order channel carries a small amount of power.
k = 0.8 * spec.K
chans = grating.channels(k, setup.theta0, spec)
print(f"k = 0.8 K: J = {chans.J}, theta_1+ = {chans.theta_plus_deg[1]:.2f} deg")
for sign in (1, -1):
    w = grating.tau_series(1, sign, k, setup.theta0, spec, order=2)
    print(f"  |tau_1{'+' if sign > 0 else '-'}|^2 = {abs(w) ** 2:.3e}")
