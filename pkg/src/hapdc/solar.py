"""Solar geometry and harvested power for a high-altitude platform.

Latitude crosses the API boundary in degrees; all trigonometry runs in
radians.  Day of year is continuous (0..365, fractional allowed).
"""

from __future__ import annotations

import math

from .config import HapPlatform
from .errors import PolarError

SOLAR_CONSTANT = 1366.1  # W/m^2
OBLIQUITY = 0.4093  # rad, also the declination amplitude
ECCENTRICITY_FACTOR = 0.033

_TWO_PI = 2.0 * math.pi


def declination(day: float) -> float:
    """Solar declination in radians; zero at day 79.75, peak at day 171."""
    return OBLIQUITY * math.sin(_TWO_PI * ((day - 79.75) / 365.0))


def mean_anomaly(day: float) -> float:
    return -0.041 + 0.017202 * day


def solar_azimuth(day: float) -> float:
    """Azimuthal position of the sun along the ecliptic, radians."""
    m = mean_anomaly(day)
    return -1.3411 + m + 0.0334 * math.sin(m) + 0.0003 * math.sin(2.0 * m)


def day_fraction(latitude_deg: float, day: float) -> float:
    """Sunlit fraction of the day in [0, 1].

    Raises PolarError inside the polar circles (roughly beyond 66 deg,
    date-dependent) where the formula leaves its domain.
    """
    lat = math.radians(latitude_deg)
    s = math.sin(OBLIQUITY) * math.sin(solar_azimuth(day))
    arg = math.tan(lat) * s / math.sqrt(1.0 - s * s)
    if not -1.0 <= arg <= 1.0:
        raise PolarError(
            f"continuous polar day/night at latitude {latitude_deg} deg, day {day}"
        )
    return 1.0 - math.acos(arg) / math.pi


def max_incidence_angle(latitude_deg: float, day: float) -> float:
    """Largest solar incidence angle over the day, radians."""
    return math.pi / 2.0 + math.radians(latitude_deg) - declination(day)


def max_radiation(latitude_deg: float, day: float) -> float:
    """Peak extraterrestrial radiation for the site and date, W/m^2."""
    ecc = 1.0 + ECCENTRICITY_FACTOR * math.cos(_TWO_PI * (day / 365.0))
    return SOLAR_CONSTANT * ecc * math.cos(math.radians(latitude_deg) - declination(day))


def irradiance(latitude_deg: float, day: float) -> float:
    """Mean daily radiation on the platform's panels, W/m^2."""
    xi = max_incidence_angle(latitude_deg, day)
    if xi <= 0.0 or xi > math.pi:
        raise PolarError(
            f"sun geometry out of range at latitude {latitude_deg} deg, day {day}"
        )
    tau = day_fraction(latitude_deg, day)
    return tau * max_radiation(latitude_deg, day) * (1.0 - math.cos(xi)) / xi


def harvested_power(platform: HapPlatform, latitude_deg: float, day: float) -> float:
    """Mean harvested electrical power over the day, W."""
    return platform.pv_efficiency * platform.pv_area * irradiance(latitude_deg, day)


def harvested_energy(platform: HapPlatform, latitude_deg: float, day: float,
                     window: tuple[float, float]) -> float:
    """Harvested energy across the observation window, J."""
    return harvested_power(platform, latitude_deg, day) * (window[1] - window[0])
