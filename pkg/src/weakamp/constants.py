"""Physical constants and cesium reference data.

CODATA values come from scipy.constants.  The cesium numbers are from
standard reference data (NIST atomic weights, Steck's Cs D-line data) and
are config-overridable; nothing in the package hardwires them outside the
default configuration.
"""

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT  # m/s
from scipy.constants import hbar as HBAR  # J s
from scipy.constants import k as BOLTZMANN  # J/K
from scipy.constants import physical_constants

ATOMIC_MASS_KG = physical_constants["atomic mass constant"][0]

# Cs-133 relative atomic mass (NIST/CODATA atomic weights).
CS133_MASS_KG = 132.905451961 * ATOMIC_MASS_KG

# Cs D2 vacuum wavelength (Steck, "Cesium D Line Data").
CS_D2_WAVELENGTH_M = 852.34727582e-9

# Two-photon momentum kick of a counter-propagating Raman pair on the D2
# line: |k1 - k2| = 2 * 2*pi/lambda.  The kick magnitude is not pinned by
# the physics being modeled, so this is only the documented default.
DEFAULT_K_EFF = 2.0 * (2.0 * np.pi / CS_D2_WAVELENGTH_M)  # rad/m

# Probe transition 6S_1/2 -> 8P_3/2, approx. 387.7 nm from standard Cs
# line data; sub-percent accuracy is irrelevant for the trend-level
# quantities computed here.
CS_PROBE_FREQUENCY_HZ = 7.7326e14

# Natural linewidth (FWHM) quoted for the 8P_3/2 probe level.
CS_8P32_LINEWIDTH_HZ = 0.53e6

# Externally quoted transit-time estimate for a 1 mm beam at 1 K.  It is
# inconsistent with beam_width / thermal_speed at those parameters; the
# transit-time report surfaces both numbers instead of correcting either.
QUOTED_TRANSIT_TIME_S = 3e-3


def thermal_speed(mass: float, temperature: float) -> float:
    """1/e half-width of the 1-D thermal velocity profile, sqrt(2 kB T / m)."""
    return float(np.sqrt(2.0 * BOLTZMANN * temperature / mass))
