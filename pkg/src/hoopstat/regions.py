"""Court regions and their point values.

Every count vector in the package is ordered by ``REGIONS``; index k of an
attempts or makes vector always refers to ``REGIONS[k]``.
"""

from __future__ import annotations

from enum import Enum

import numpy as np


class Region(Enum):
    """One of the seven offensive court regions.

    Three-point regions (ATB, LC3, RC3), two-point regions (ITP, MID, RA),
    and the free-throw line (FT). The declaration order is the canonical
    vector order used everywhere in the package.
    """

    ATB = "ATB"
    LC3 = "LC3"
    RC3 = "RC3"
    ITP = "ITP"
    MID = "MID"
    RA = "RA"
    FT = "FT"

    @property
    def point_value(self) -> int:
        return _POINTS[self.value]

    @property
    def index(self) -> int:
        return REGION_INDEX[self]


_POINTS = {"ATB": 3, "LC3": 3, "RC3": 3, "ITP": 2, "MID": 2, "RA": 2, "FT": 1}

REGIONS: tuple[Region, ...] = tuple(Region)
REGION_INDEX: dict[Region, int] = {r: i for i, r in enumerate(REGIONS)}
REGION_CODES: tuple[str, ...] = tuple(r.value for r in REGIONS)
N_REGIONS: int = len(REGIONS)

# Point weights aligned with REGIONS order, for weighted sums of makes.
POINT_VALUES: np.ndarray = np.array([r.point_value for r in REGIONS], dtype=np.int64)
