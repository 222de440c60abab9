"""
Oscillations and turning
========================

Two off-axis starts: one slightly off the long axis, where the classical
vehicle weaves across the axis, and one facing directly away from the source,
where the vehicle has to turn around.
"""

# %%
import math

from braitenberg3a import IntegratorConfig, ParabolicStimulus, VehicleConfig, integrate
from braitenberg3a.analysis import compare_runs
from braitenberg3a.output import write_svg

field = ParabolicStimulus()
icfg = IntegratorConfig(t_max=1000.0)


def both(start):
    return {
        name: integrate(start, "ode", field, VehicleConfig(alpha=alpha), icfg)
        for name, alpha in (("classical", 0.0), ("dynamic", 3.0))
    }


# %%
# Slightly off the axis: the rate term damps the lateral oscillation.
runs = both((-6.0, 1.0, 0.0))
a, b = compare_runs(runs["classical"], runs["dynamic"], ball=0.05)
print("start (-6, 1, 0)")
print(f"  first amplitude: {a.first_amplitude:.4f} -> {b.first_amplitude:.4f}")
print(f"  path length:     {a.path_length:.4f} -> {b.path_length:.4f}")
write_svg(runs, "off_axis.svg")

# %%
# Facing away: the turn is sharper and the path shorter.
runs = both((-2.0, 1.0, math.atan(-0.5)))
a, b = compare_runs(runs["classical"], runs["dynamic"], ball=0.05)
print("start (-2, 1, atan(-1/2))")
print(f"  path length:  {a.path_length:.4f} -> {b.path_length:.4f}")
print(f"  time to ball: {a.time_to_ball:.1f} -> {b.time_to_ball:.1f} s")
write_svg(runs, "facing_away.svg")
