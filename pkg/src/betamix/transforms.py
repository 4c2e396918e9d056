"""Lower sum and lower difference transforms on the subset lattice.

For a table ``f`` over the subsets of a finite region,

    lower_sum(f)(X)        = sum_{Z <= X} f(Z)
    lower_difference(f)(X) = sum_{Z <= X} (-1)^{|X \\ Z|} f(Z)

and the two are mutually inverse. Two evaluation routes are provided: the
direct route enumerates every pair ``Z <= X`` (``3**n`` pairs), the fast route
does one butterfly pass per element (``n * 2**n`` additions). The direct route
is the reference; ``method="auto"`` uses it up to ``DIRECT_MAX_SIZE`` elements.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .ground import (
    Config,
    Region,
    canonical,
    config_to_mask,
    mask_to_config,
    popcounts,
    subset_order,
)

DIRECT_MAX_SIZE = 12


@dataclass(frozen=True)
class SetFunction:
    """A real function on the subsets of ``region``, stored by local bitmask."""

    region: Region
    values: np.ndarray

    def __post_init__(self) -> None:
        region = canonical(self.region)
        values = np.array(self.values, dtype=float)
        if values.shape != (1 << len(region),):
            raise ValueError(
                f"table of shape {values.shape} does not cover the "
                f"{1 << len(region)} subsets of {region}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "region", region)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, region: Iterable[int], fn: Callable[[Config], float]) -> "SetFunction":
        region = canonical(region)
        n = len(region)
        return cls(region, np.array([fn(mask_to_config(region, m)) for m in range(1 << n)]))

    @classmethod
    def indicator(cls, region: Iterable[int], config: Iterable[int]) -> "SetFunction":
        region = canonical(region)
        values = np.zeros(1 << len(region))
        values[config_to_mask(region, config)] = 1.0
        return cls(region, values)

    @classmethod
    def constant(cls, region: Iterable[int], c: float) -> "SetFunction":
        region = canonical(region)
        return cls(region, np.full(1 << len(region), float(c)))

    @classmethod
    def of_size(cls, region: Iterable[int], g: Callable[[int], float]) -> "SetFunction":
        """``X -> g(|X|)``."""
        region = canonical(region)
        sizes = popcounts(len(region))
        return cls(region, np.array([g(int(k)) for k in sizes], dtype=float))

    def __call__(self, config: Iterable[int]) -> float:
        return float(self.values[config_to_mask(self.region, config)])

    def items(self) -> Iterator[tuple[Config, float]]:
        for mask in subset_order(len(self.region)):
            yield mask_to_config(self.region, mask), float(self.values[mask])

    def sup_norm(self) -> float:
        return float(np.abs(self.values).max())

    def __add__(self, other: "SetFunction") -> "SetFunction":
        _same_region(self.region, other.region)
        return SetFunction(self.region, self.values + other.values)

    def __mul__(self, c: float) -> "SetFunction":
        return SetFunction(self.region, self.values * c)

    __rmul__ = __mul__


@dataclass(frozen=True)
class BiSetFunction:
    """A real function on pairs (subset of ``region1``, subset of ``region2``)."""

    region1: Region
    region2: Region
    values: np.ndarray

    def __post_init__(self) -> None:
        r1, r2 = canonical(self.region1), canonical(self.region2)
        values = np.array(self.values, dtype=float)
        if values.shape != (1 << len(r1), 1 << len(r2)):
            raise ValueError(f"table of shape {values.shape} does not match regions {r1}, {r2}")
        values.setflags(write=False)
        object.__setattr__(self, "region1", r1)
        object.__setattr__(self, "region2", r2)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(
        cls,
        region1: Iterable[int],
        region2: Iterable[int],
        fn: Callable[[Config, Config], float],
    ) -> "BiSetFunction":
        r1, r2 = canonical(region1), canonical(region2)
        table = np.array(
            [
                [fn(mask_to_config(r1, m1), mask_to_config(r2, m2)) for m2 in range(1 << len(r2))]
                for m1 in range(1 << len(r1))
            ],
            dtype=float,
        ).reshape(1 << len(r1), 1 << len(r2))
        return cls(r1, r2, table)

    @classmethod
    def product(cls, g: SetFunction, h: SetFunction) -> "BiSetFunction":
        return cls(g.region, h.region, np.outer(g.values, h.values))

    @classmethod
    def constant(cls, region1: Iterable[int], region2: Iterable[int], c: float) -> "BiSetFunction":
        r1, r2 = canonical(region1), canonical(region2)
        return cls(r1, r2, np.full((1 << len(r1), 1 << len(r2)), float(c)))

    def __call__(self, config1: Iterable[int], config2: Iterable[int]) -> float:
        return float(
            self.values[config_to_mask(self.region1, config1), config_to_mask(self.region2, config2)]
        )

    def items(self) -> Iterator[tuple[Config, Config, float]]:
        for m1 in subset_order(len(self.region1)):
            for m2 in subset_order(len(self.region2)):
                yield (
                    mask_to_config(self.region1, m1),
                    mask_to_config(self.region2, m2),
                    float(self.values[m1, m2]),
                )

    def sup_norm(self) -> float:
        return float(np.abs(self.values).max())


def _same_region(r1: Sequence[int], r2: Sequence[int]) -> None:
    if tuple(r1) != tuple(r2):
        raise ValueError(f"regions differ: {tuple(r1)} vs {tuple(r2)}")


@lru_cache(maxsize=None)
def _subset_pairs(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All pairs ``(X, Z)`` with ``Z <= X`` over ``n`` elements, plus ``(-1)^{|X \\ Z|}``."""
    xs, zs = [], []
    for x in range(1 << n):
        # standard submask walk, x itself down to 0
        z = x
        while True:
            xs.append(x)
            zs.append(z)
            if z == 0:
                break
            z = (z - 1) & x
    x_arr = np.array(xs, dtype=np.int64)
    z_arr = np.array(zs, dtype=np.int64)
    counts = popcounts(n)
    sign = np.where((counts[x_arr] - counts[z_arr]) % 2 == 0, 1.0, -1.0)
    for arr in (x_arr, z_arr, sign):
        arr.setflags(write=False)
    return x_arr, z_arr, sign


def _direct(values: np.ndarray, n: int, signed: bool) -> np.ndarray:
    x, z, sign = _subset_pairs(n)
    contrib = values[..., z] * sign if signed else values[..., z]
    if values.ndim == 1:
        return np.bincount(x, weights=contrib, minlength=1 << n)
    flat = contrib.reshape(-1, contrib.shape[-1])
    out = np.stack([np.bincount(x, weights=row, minlength=1 << n) for row in flat])
    return out.reshape(values.shape)


def _fast(values: np.ndarray, n: int, signed: bool, upward: bool = False) -> np.ndarray:
    """Butterfly pass over the last axis.

    ``upward=False`` sums over subsets, ``upward=True`` over supersets.
    """
    lead = values.shape[:-1]
    out = np.array(values, dtype=float).reshape(lead + (2,) * n)
    for k in range(n):
        # bit k of the mask is axis n-1-k of the reshaped view (C order)
        axis = len(lead) + n - 1 - k
        lo = [slice(None)] * out.ndim
        hi = [slice(None)] * out.ndim
        lo[axis], hi[axis] = 0, 1
        src, dst = (tuple(hi), tuple(lo)) if upward else (tuple(lo), tuple(hi))
        if signed:
            out[dst] -= out[src]
        else:
            out[dst] += out[src]
    return out.reshape(values.shape)


def _transform(values: np.ndarray, signed: bool, method: str) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    n = values.shape[-1].bit_length() - 1
    if values.shape[-1] != 1 << n:
        raise ValueError("last axis must have length 2**n")
    if method == "auto":
        method = "direct" if n <= DIRECT_MAX_SIZE else "fast"
    if method == "direct":
        return _direct(values, n, signed)
    if method == "fast":
        return _fast(values, n, signed)
    raise ValueError(f"unknown method {method!r}")


def lower_sum_array(values: np.ndarray, method: str = "auto") -> np.ndarray:
    """Lower sum along the last axis of a ``(..., 2**n)`` array."""
    return _transform(values, signed=False, method=method)


def lower_difference_array(values: np.ndarray, method: str = "auto") -> np.ndarray:
    """Lower difference along the last axis of a ``(..., 2**n)`` array."""
    return _transform(values, signed=True, method=method)


def upper_sum_array(values: np.ndarray) -> np.ndarray:
    """``X -> sum_{Z >= X} f(Z)`` along the last axis."""
    values = np.asarray(values, dtype=float)
    return _fast(values, values.shape[-1].bit_length() - 1, signed=False, upward=True)


def upper_difference_array(values: np.ndarray) -> np.ndarray:
    """``X -> sum_{Z >= X} (-1)^{|Z \\ X|} f(Z)``, the inverse of ``upper_sum_array``."""
    values = np.asarray(values, dtype=float)
    return _fast(values, values.shape[-1].bit_length() - 1, signed=True, upward=True)


def lower_sum(f: SetFunction, method: str = "auto") -> SetFunction:
    return SetFunction(f.region, lower_sum_array(f.values, method))


def lower_difference(f: SetFunction, method: str = "auto") -> SetFunction:
    return SetFunction(f.region, lower_difference_array(f.values, method))


def _bi(values: np.ndarray, signed: bool, method: str) -> np.ndarray:
    # the double sum factorizes: transform rows, then columns
    out = _transform(values, signed, method)
    return _transform(out.T, signed, method).T


def lower_sum_bi(f: BiSetFunction, method: str = "auto") -> BiSetFunction:
    return BiSetFunction(f.region1, f.region2, _bi(f.values, False, method))


def lower_difference_bi(f: BiSetFunction, method: str = "auto") -> BiSetFunction:
    return BiSetFunction(f.region1, f.region2, _bi(f.values, True, method))


def restrict(f: SetFunction, region: Iterable[int]) -> SetFunction:
    """``X -> f(X & region)``, still tabulated over ``f.region``."""
    keep = config_to_mask(f.region, canonical(region))
    masks = np.arange(1 << len(f.region), dtype=np.int64)
    return SetFunction(f.region, f.values[masks & keep])


def split(f: BiSetFunction, region: Iterable[int]) -> SetFunction:
    """``X -> f(X & region1, X & region2)`` over ``region``.

    ``f``'s two regions must be disjoint subsets of ``region``.
    """
    region = canonical(region)
    if set(f.region1) & set(f.region2):
        raise ValueError("regions must be disjoint")
    if not set(f.region1) | set(f.region2) <= set(region):
        raise ValueError(f"{region} does not contain both regions")
    masks = np.arange(1 << len(region), dtype=np.int64)
    m1 = np.zeros_like(masks)
    m2 = np.zeros_like(masks)
    position = {site: k for k, site in enumerate(region)}
    for j, site in enumerate(f.region1):
        m1 |= ((masks >> position[site]) & 1) << j
    for j, site in enumerate(f.region2):
        m2 |= ((masks >> position[site]) & 1) << j
    return SetFunction(region, f.values[m1, m2])
