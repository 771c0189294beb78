"""Self-image at the Talbot distance and the signal behind a second grating."""

import math

import numpy as np

from mwcoherence import fullerene_scenario
from mwcoherence.farfield import ApertureModel
from mwcoherence.talbot import TalbotSetup, image_contrast, signal_visibility, talbot_intensity_env, two_grating_signal

config = fullerene_scenario()
setup = TalbotSetup.from_config(config)
D = setup.period
aperture = ApertureModel.from_grating(config.grating)
print(f"Talbot length {setup.length * 1e3:.2f} mm, ell(t_T) = {setup.ell_T:.3e} m, blur {setup.blur:.2e} m")

x = np.linspace(-D / 2, D / 2, 1001)
print(f"\n{'ell_T / D':>10} {'image contrast':>15} {'S(D/2)/S(0)':>12} {'S visibility':>13}")
for ratio in (math.inf, 10, 3, setup.ell_T / D, 1, 0.5):
    ell = ratio * D
    img = talbot_intensity_env(x, aperture, D, ell)
    s0, s_half = two_grating_signal(np.array([0.0, D / 2]), aperture, D, ell)
    print(f"{ratio:10.3g} {image_contrast(img):15.4f} {s_half / s0:12.4f} {signal_visibility(aperture, D, ell):13.4f}")
