"""Rectangular regions and planar point processes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .seeding import generator_from_seed

OPEN_BOX = "open-box"
TORUS = "torus"
_BOUNDARIES = (OPEN_BOX, TORUS)


@dataclass(frozen=True)
class Region:
    """Rectangular domain, either a plain box or a torus (wrap-around metric)."""

    width: float
    height: float
    boundary: str = OPEN_BOX

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError(
                f"region dimensions must be positive, got {self.width} x {self.height}"
            )
        if self.boundary not in _BOUNDARIES:
            raise ValueError(f"boundary must be one of {_BOUNDARIES}, got {self.boundary!r}")

    @property
    def area(self) -> float:
        return self.width * self.height


@dataclass(frozen=True)
class PointSet:
    """Immutable planar points inside a region.

    ``intensity`` is the nominal point density (per unit area): the exact
    ratio count/area for fixed-count sampling, or the requested rate for
    Poisson sampling.
    """

    coordinates: np.ndarray
    region: Region
    intensity: float

    def __post_init__(self):
        # private copy: the set is immutable and must not alias caller data
        coords = np.array(self.coordinates, dtype=np.float64).reshape(-1, 2)
        object.__setattr__(self, "coordinates", coords)
        if len(coords):
            x, y = coords[:, 0], coords[:, 1]
            outside = (x < 0) | (x > self.region.width) | (y < 0) | (y > self.region.height)
            if outside.any():
                i = int(np.flatnonzero(outside)[0])
                raise ValueError(
                    f"points[{i}] = ({coords[i, 0]}, {coords[i, 1]}) lies outside the region"
                )
        coords.setflags(write=False)

    def __len__(self) -> int:
        return len(self.coordinates)


def generate_uniform(n: int, region: Region, seed: int) -> PointSet:
    """n points placed i.i.d. uniformly over the region; deterministic given seed."""
    if n < 0:
        raise ValueError(f"point count must be non-negative, got {n}")
    gen = generator_from_seed(seed)
    coords = gen.random((n, 2)) * np.array([region.width, region.height])
    return PointSet(coords, region, n / region.area)


def generate_poisson(lam: float, region: Region, seed: int) -> PointSet:
    """Poisson(lam * area) point count, then uniform placement; deterministic given seed."""
    if lam < 0:
        raise ValueError(f"intensity must be non-negative, got {lam}")
    gen = generator_from_seed(seed)
    count = int(gen.poisson(lam * region.area))
    coords = gen.random((count, 2)) * np.array([region.width, region.height])
    return PointSet(coords, region, lam)
