"""Far-field fringes: ideal grating, decohered pattern, and the detected signal.

Writes far_field_fringes.png next to this script.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from mwcoherence import classical_grating_pattern, fullerene_scenario, pattern_N, pattern_oracle, visibility
from mwcoherence.beam import count_fringes, fig4_pipeline
from mwcoherence.farfield import Pattern, coherence_length_at_screen
from mwcoherence.model import beam_kinematics

config = fullerene_scenario()
kin = beam_kinematics(config)
period = kin.wavelength * config.geometry.screen_distance / config.grating.period
x = np.linspace(-4 * period, 4 * period, 2001)
ell = coherence_length_at_screen(config)

ideal = classical_grating_pattern(x, config)
damped = pattern_N(x, config, ell)
oracle = pattern_oracle(x, config, ell).intensity
print(f"ell(T) = {ell:.3e} m, fringe period on the screen {period * 1e6:.2f} um")
print(f"visibility ideal   {visibility(Pattern(x, ideal), period):.3f}")
print(f"visibility damped  {visibility(Pattern(x, damped), period):.3f}")
print(f"sum form vs direct quadrature: max deviation {np.max(np.abs(damped - oracle)) / oracle.max():.2%} of peak")

detected = fig4_pipeline(config, x=x)
print(f"fringes above 5% in the detected signal: {count_fringes(detected)}")

fig, ax = plt.subplots(figsize=(7, 4))
ax.plot(x * 1e6, ideal / ideal.max(), lw=0.8, label="coherent grating")
ax.plot(x * 1e6, damped / ideal.max(), lw=1.2, label="decohered, monochromatic")
ax.plot(x * 1e6, detected.intensity * damped.max() / ideal.max(), lw=1.2, label="velocity spread + detector")
ax.set_xlabel("x [um]")
ax.set_ylabel("intensity [arb.]")
ax.legend(frameon=False)
fig.tight_layout()
fig.savefig(Path(__file__).with_suffix(".png"), dpi=120)
