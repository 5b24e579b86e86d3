"""Hiding a lossless slab from low-frequency waves with two thin coatings.

The slab has eps = 1 + 0.4 exp(-3x) exp(-y^2 / 50) over a depth of 1/3.  Two
Gaussian-profiled layers of equal thickness are added behind it; their
permittivities are solved column by column so that the whole strip has no
first-order scattering for either polarisation.
"""

import numpy as np

from bergmann2d import cloak, lowfreq, media

y = np.linspace(-15.0, 15.0, 21)
design = cloak.gaussian_exp_design(z=0.4, kappa=3.0, L=5.0, alpha_ratio=1.0, ell_star=1 / 3, sigma=-1, y_samples=y)

print(f"common real part of both coatings: {design.rho:.6f}")
print("    y     eps_-                 eps_+")
for yi, em, ep in zip(y[::4], design.eps_minus[::4], design.eps_plus[::4]):
    print(f"{yi:6.1f}  {em.real:.4f}{em.imag:+.4f}i   {ep.real:.4f}{ep.imag:+.4f}i")
print("inner layer is lossy, outer layer has gain" if np.all(design.eps_plus.imag < 0) else "")

# Check the invisibility conditions column by column.
coated = media.to_alpha_beta(design.composite(), media.ModeKind.TM)
res = cloak.invisibility_residuals(coated, y)
print(f"largest residual: {np.max(np.abs(res)):.1e} (units of length)")

# Compare the first-order amplitude of the coated and bare strips.
bare = media.to_alpha_beta(design.bare_slab(), media.ModeKind.TM)
kin = lowfreq.ScatterKinematics(1.0, np.radians(20.0), np.radians(np.linspace(-175, 175, 37)))
f_bare = lowfreq.f1(kin, lowfreq.moment_table(bare))
f_coat = lowfreq.f1(kin, lowfreq.moment_table(coated))
print(f"peak |f1|: bare {np.max(np.abs(f_bare)):.3e}, coated {np.max(np.abs(f_coat)):.1e}")

# Lossless coatings cannot do the job: the feasibility report says so.
print("real positive coatings possible:", design.report.real_positive_possible)
