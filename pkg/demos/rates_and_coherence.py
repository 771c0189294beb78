"""Decoherence budget and coherence length for the packaged fullerene scenario."""

from mwcoherence import coherence_state, fullerene_scenario, total_rates
from mwcoherence.farfield import coherence_length_at_screen
from mwcoherence.model import beam_kinematics

config = fullerene_scenario()
rates = total_rates(config)

print("localisation rates [m^-2 s^-1]")
for name, value, unit in rates.table():
    print(f"  {name:<22} {value:11.3e} {unit}")

kin = beam_kinematics(config)
state = coherence_state(config)
print(f"\nmean velocity        {kin.velocity:8.2f} m/s")
print(f"time of flight       {kin.time_of_flight * 1e3:8.3f} ms")
print(f"ell at the grating   {state.ell0:10.3e} m")
print(f"ell at the screen    {coherence_length_at_screen(config):10.3e} m  (period {config.grating.period:.1e} m)")
print(f"coherence time       {state.tau_c:10.3e} s")

# air dominates; doubling the pressure roughly halves the remaining coherence time
for factor in (1, 2, 5, 10):
    cfg = config.replace(environment__pressure=factor * config.environment.pressure)
    print(f"pressure x{factor:<3} tau_c = {coherence_state(cfg).tau_c:9.3e} s")
