"""Physical constants in SI units.

All internal computations use these values; electronvolts only appear when
formatting output.
"""

from dataclasses import dataclass
import math


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 6.62607015e-34 / (2 * math.pi)  # J s
    h: float = 6.62607015e-34  # J s
    c: float = 2.99792458e8  # m/s
    k_B: float = 1.380649e-23  # J/K
    sigma_SB: float = 5.670374419e-8  # W m^-2 K^-4
    eV: float = 1.602176634e-19  # J
    zeta3: float = 1.2020569031595942
    zeta5: float = 1.0369277551433699
    zeta9: float = 1.0020083928260822

    def __post_init__(self):
        for name, value in vars(self).items():
            if not value > 0:
                raise ValueError(f"constant {name} must be positive, got {value}")
        if not math.isclose(self.h, 2 * math.pi * self.hbar, rel_tol=1e-12):
            raise ValueError("h and hbar are inconsistent")


CONSTANTS = PhysicalConstants()

NEUTRON_MASS = 1.67492749804e-27  # kg
