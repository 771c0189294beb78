"""Arrival intensity of a two-slit neutron packet from the quantum current.

Close to the slits the spread in arrival times washes out the fringes;
further away the pattern approaches the single-time density and then the
Fraunhofer limit.
"""

import numpy as np

from mwcoherence.farfield import visibility
from mwcoherence.nearfield import (
    approx_I1,
    approx_I2,
    arrival_intensity,
    fringe_period,
    neutron_state,
    screen_grid,
    time_scales,
)

state = neutron_state()
print(f"{'L [mm]':>7} {'T/tau':>7} {'dT/T':>7} {'total':>8} {'vis':>6} {'|I-I1|':>9} {'|I-I2|':>9}")
for L in (3e-3, 6e-3, 12e-3, 24e-3, 0.1):
    x = screen_grid(state, L)
    res = arrival_intensity(x, L, state)
    I = res.pattern.intensity
    ts = time_scales(state, L)
    e1 = np.max(np.abs(I - approx_I1(x, L, state))) / I.max()
    e2 = np.max(np.abs(I - approx_I2(x, L, state))) / I.max()
    vis = visibility(res.pattern, fringe_period(state, L))
    print(f"{L * 1e3:7.1f} {ts.T / ts.tau:7.2f} {ts.delta_T / ts.T:7.3f} {res.pattern.integral():8.5f} "
          f"{vis:6.3f} {e1:9.2e} {e2:9.2e}")
