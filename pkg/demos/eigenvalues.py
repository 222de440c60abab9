"""
Local convergence rates on the axis
===================================

Freezing the dynamics at (x, 0, 0) gives a 3x3 Jacobian with one eigenvalue
along the axis and a pair governing the lateral motion. The closed forms are
checked against finite differences, and the sign of the axis eigenvalue is
compared with and without the rate term.
"""

# %%
import math

import numpy as np

from braitenberg3a import ParabolicStimulus, VehicleConfig
from braitenberg3a.analysis import eigen_compare

field = ParabolicStimulus()

# %%
# Closed form vs numerics. Three sign conventions for the lateral pair are
# evaluated; only one agrees with the Jacobian.
for x in (-6.0, -3.0, -1.0):
    rep = eigen_compare(x, field, VehicleConfig(alpha=3.0))
    print(f"x = {x:4.1f}  lambda1 = {rep.lambda1_numeric:+.5f} (rel err {rep.lambda1_rel_err:.1e})")
    for name, err in rep.variant_rel_err.items():
        print(f"          Re lambda2,3 [{name:>19}] rel err {err:.2e}")

# %%
# The rate term is guaranteed to make the axis eigenvalue more negative while
# s'(q) + 2 sigma_x x^2 s''(q) < 0, which for the Gaussian profile means
# |x| < 1 / sqrt(2 sigma_x). The condition is sufficient but not necessary:
# the actual crossover lies a little further out. Far from the source the
# ordering reverses.
edge = 1 / math.sqrt(2 * field.sigma_x)
print(f"edge of the guaranteed region: |x| = {edge:.3f}")
for x in np.linspace(-6.0, -0.5, 12):
    l0 = eigen_compare(x, field, VehicleConfig(alpha=0.0)).lambda1_numeric
    l3 = eigen_compare(x, field, VehicleConfig(alpha=3.0)).lambda1_numeric
    print(f"x = {x:5.2f}  lambda1: {l0:+.4f} -> {l3:+.4f}  {'faster' if l3 < l0 else 'slower'}")
