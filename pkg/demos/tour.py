"""A short walk through the package at desk scale.

Run with ``python demos/tour.py``; it prints a handful of the quantities that
the verification suites check, for the standard parameters.
"""

import numpy as np

from slgluing import ModelParams
from slgluing.asymptotics import sobolev_partition_curves, verify_quantity
from slgluing.flat_model import DomainPoint, sl_residual
from slgluing.gluing import cutoff_for, glued_profile
from slgluing.regions import predicted_exponent
from slgluing.spectral import build_branched_mesh, eigenvalue_comparison

params = ModelParams()
t = 2.0 ** -8

# the model special Lagrangian is calibrated
x = DomainPoint(0.4, -0.3, 1.0)
print("sL residuals at one point:", sl_residual(x, t, params))

# the cut-off and the glued profile
cut = cutoff_for(t, params)
r1 = np.linspace(0.0, 1.2 * cut.b2, 7)
print(f"b1 = {cut.b1:.4g}, b2 = {cut.b2:.4g}, C0 = {cut.C0:.3f}")
print("profile r2(r1):", np.array2string(glued_profile(r1, t, params, cut), precision=4))

# one table prediction and the measured curve
pred = predicted_exponent("eps_L65", params.m, params.c1, params.c2)
v, curve = verify_quantity("epsL65_Q", params)
print(f"region ({pred.region}): predicted exponent {float(pred.exponent):.4f}, "
      f"fitted {curve.fitted_exponent:.4f}, upper bound holds: {v.passed}")

# the logarithmic partition of unity
res = sobolev_partition_curves(params.replace(eta1=0.1, eta2=0.2), a=0.4, b=0.5)
print(f"||1 - F||: fitted {res.one_minus_F.fitted_exponent:.3f} "
      f"vs {res.target_one_minus_F:.3f}")

# eigenvalue comparison on the branched solid torus
c = eigenvalue_comparison(build_branched_mesh(2, params.l, 1.0, 16, 12, 8))
print(f"lam1(g') = {c.lam_primed:.4f} >= lam1(g)/c^8 = {c.lam_smooth / c.divisor:.4f}")
