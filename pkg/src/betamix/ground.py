"""Finite ground spaces with atomic measures.

A ground space is a list of sites, each with a coordinate in R^d and a
nonnegative mass. Configurations and regions are canonical sorted tuples of
site indices; internally most tables are indexed by bitmask, with bit ``k``
standing for the ``k``-th member of whatever region the table lives on.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

MAX_SITES = 20

Config = tuple[int, ...]
Region = tuple[int, ...]


def canonical(members: Iterable[int]) -> tuple[int, ...]:
    """Sort and validate a collection of site indices."""
    out = tuple(sorted(int(i) for i in members))
    if len(set(out)) != len(out):
        raise ValueError(f"duplicate site index in {out}")
    return out


@dataclass(frozen=True)
class GroundSpace:
    coords: np.ndarray
    weights: np.ndarray
    max_sites: int = MAX_SITES

    def __post_init__(self) -> None:
        coords = np.array(self.coords, dtype=float)
        if coords.ndim == 1:
            coords = coords[:, None]
        if coords.ndim != 2 or coords.shape[1] < 1:
            raise ValueError("coordinates must form an (S, d) array with d >= 1")
        weights = np.array(self.weights, dtype=float).reshape(-1)
        if weights.shape[0] != coords.shape[0]:
            raise ValueError("one weight per site required")
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise ValueError("site weights must be finite and nonnegative")
        if coords.shape[0] > self.max_sites:
            raise ValueError(
                f"{coords.shape[0]} sites exceeds the cap of {self.max_sites}"
            )
        coords.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_coords(cls, coords, weights=None, max_sites: int = MAX_SITES) -> "GroundSpace":
        coords = np.array(coords, dtype=float)
        if coords.ndim == 1:
            coords = coords[:, None]
        if weights is None:
            weights = np.ones(coords.shape[0])
        return cls(coords, weights, max_sites)

    @classmethod
    def line(cls, n: int, spacing: float = 1.0) -> "GroundSpace":
        """``n`` unit-weight sites at ``0, spacing, 2*spacing, ...`` on the real line."""
        return cls.from_coords(np.arange(n, dtype=float) * spacing)

    @classmethod
    def from_dict(cls, data: dict) -> "GroundSpace":
        d = int(data["dimension"])
        if d < 1:
            raise ValueError("dimension must be positive")
        coords, weights = [], []
        for site in data["sites"]:
            c = [float(v) for v in site["coord"]]
            if len(c) != d:
                raise ValueError(f"site coordinate {c} does not have dimension {d}")
            coords.append(c)
            weights.append(float(site.get("weight", 1.0)))
        return cls(np.array(coords, dtype=float).reshape(len(coords), d), np.array(weights))

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "sites": [
                {"coord": [float(v) for v in c], "weight": float(w)}
                for c, w in zip(self.coords, self.weights)
            ],
        }

    @classmethod
    def from_json(cls, text: str) -> "GroundSpace":
        return cls.from_dict(json.loads(text))

    @property
    def size(self) -> int:
        return self.coords.shape[0]

    @property
    def dimension(self) -> int:
        return self.coords.shape[1]

    @property
    def full(self) -> Region:
        return tuple(range(self.size))

    def region(self, members: Iterable[int]) -> Region:
        """Canonicalize ``members`` and check every index belongs to this space."""
        out = canonical(members)
        for i in out:
            if not 0 <= i < self.size:
                raise ValueError(f"site index {i} out of range for {self.size} sites")
        return out

    config = region

    def diameter(self) -> float:
        if self.size < 2:
            return 0.0
        diff = self.coords[:, None, :] - self.coords[None, :, :]
        return float(np.sqrt((diff**2).sum(-1)).max())


def enumerate_subsets(space: GroundSpace, region: Sequence[int]) -> Iterator[Config]:
    """All subsets of ``region``, by size and then lexicographically."""
    region = space.region(region)
    for mask in subset_order(len(region)):
        yield mask_to_config(region, mask)


@lru_cache(maxsize=None)
def _subset_order(n: int) -> tuple[int, ...]:
    masks = range(1 << n)
    return tuple(sorted(masks, key=lambda m: (popcount(m), _bits(m))))


def subset_order(n: int) -> tuple[int, ...]:
    """Local masks of an ``n``-element region in the documented enumeration order."""
    return _subset_order(n)


def _bits(mask: int) -> tuple[int, ...]:
    return tuple(k for k in range(mask.bit_length()) if mask >> k & 1)


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@lru_cache(maxsize=None)
def popcounts(n: int) -> np.ndarray:
    """Popcount of every mask in ``range(2**n)``."""
    counts = np.zeros(1 << n, dtype=np.int64)
    for k in range(n):
        counts[1 << k : 1 << (k + 1)] = counts[: 1 << k] + 1
    counts.setflags(write=False)
    return counts


def mask_to_config(region: Sequence[int], mask: int) -> Config:
    return tuple(region[k] for k in range(len(region)) if mask >> k & 1)


def config_to_mask(region: Sequence[int], config: Iterable[int]) -> int:
    """Local mask of ``config`` inside ``region``; raises if it is not a subset."""
    position = {site: k for k, site in enumerate(region)}
    mask = 0
    for site in config:
        try:
            mask |= 1 << position[site]
        except KeyError:
            raise ValueError(f"site {site} is not in region {tuple(region)}") from None
    return mask


def local_masks(full: Sequence[int], region: Sequence[int]) -> np.ndarray:
    """For every mask over ``full``, the local mask of its intersection with ``region``.

    ``region`` must be a subset of ``full``.
    """
    n = len(full)
    position = {site: k for k, site in enumerate(full)}
    out = np.zeros(1 << n, dtype=np.int64)
    masks = np.arange(1 << n, dtype=np.int64)
    for j, site in enumerate(region):
        out |= ((masks >> position[site]) & 1) << j
    return out


def embed_masks(full: Sequence[int], region: Sequence[int]) -> np.ndarray:
    """For every local mask over ``region``, the corresponding mask over ``full``."""
    position = {site: k for k, site in enumerate(full)}
    masks = np.arange(1 << len(region), dtype=np.int64)
    out = np.zeros_like(masks)
    for j, site in enumerate(region):
        out |= ((masks >> j) & 1) << position[site]
    return out


def measure(space: GroundSpace, region: Sequence[int]) -> float:
    region = space.region(region)
    return float(sum(space.weights[i] for i in region))


def weight_products(space: GroundSpace, region: Sequence[int]) -> np.ndarray:
    """``prod_{i in a} w_i`` for every local mask ``a`` of ``region``."""
    region = space.region(region)
    out = np.ones(1 << len(region))
    for k, site in enumerate(region):
        out[1 << k : 1 << (k + 1)] = out[: 1 << k] * space.weights[site]
    return out


def distance(space: GroundSpace, a: Sequence[int], b: Sequence[int]) -> float:
    """Smallest euclidean distance between a site of ``a`` and a site of ``b``."""
    a, b = space.region(a), space.region(b)
    if not a or not b:
        return math.inf
    diff = space.coords[list(a)][:, None, :] - space.coords[list(b)][None, :, :]
    return float(np.sqrt((diff**2).sum(-1)).min())


def disjoint(a: Sequence[int], b: Sequence[int]) -> bool:
    return not set(a) & set(b)
