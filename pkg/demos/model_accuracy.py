"""
Accuracy of the reduced model
=============================

The reduced equations of motion come from a first-order expansion of the
stimulus around the vehicle centre. This script integrates the exact
sensor-level wheel law next to the reduced (DAE) model from the same start and
shows how the gap depends on the sensor spacing.
"""

# %%
# Setup: the default elliptic field and the vehicle used throughout.
import numpy as np

from braitenberg3a import IntegratorConfig, ParabolicStimulus, VehicleConfig, integrate
from braitenberg3a.analysis import sup_norm_gap
from braitenberg3a.output import write_svg

field = ParabolicStimulus()
start = (-6.0, 1.0, 0.0)

# %%
# Both models from (-6, 1, 0) with delta = d = 0.25 and alpha = 3.
cfg = VehicleConfig(delta=0.25, wheelbase=0.25, alpha=3.0)
icfg = IntegratorConfig(t_max=1000.0)
exact = integrate(start, "wheel_exact", field, cfg, icfg)
reduced = integrate(start, "dae", field, cfg, icfg)
print(f"exact wheel law: {exact.termination.value} at t = {exact.t[-1]:.1f}")
print(f"reduced model:   {reduced.termination.value} at t = {reduced.t[-1]:.1f}")
print(f"sup-norm gap over the shared horizon: {sup_norm_gap(exact, reduced):.3e}")

# %%
# The exact law arrives much sooner. Its sensors sit off the maximum even when
# the centre is on it, so the drive never vanishes near the source, whereas
# the reduced model slows down like the stimulus deficit at the centre.

# %%
# The pointwise gap is largest early on, far from the source, where the
# stimulus curvature across the sensor baseline matters most.
horizon = IntegratorConfig(t_max=20.0, source_radius=0.0)
a = integrate(start, "wheel_exact", field, cfg, horizon)
b = integrate(start, "dae", field, cfg, horizon)
print(f"gap after 20 s: {np.max(np.abs(a.final_state - b.final_state)):.3e}")

# %%
# Halving delta (and the wheelbase with it, which leaves the reduced model
# unchanged) divides the gap by four: the expansion is second-order accurate.
prev = None
for delta in (0.25, 0.125, 0.0625):
    c = VehicleConfig(delta=delta, wheelbase=delta, alpha=3.0)
    e = integrate(start, "wheel_exact", field, c, horizon).final_state
    r = integrate(start, "ode", field, c, horizon).final_state
    gap = np.max(np.abs(e - r))
    print(f"delta = {delta:<7} gap = {gap:.3e}" + (f"   ratio {prev / gap:.3f}" if prev else ""))
    prev = gap

# %%
write_svg({"wheel_exact": exact, "dae": reduced}, "model_accuracy.svg")
print("wrote model_accuracy.svg")
