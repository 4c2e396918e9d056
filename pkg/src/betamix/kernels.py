"""Isotropic kernel families, their tail function and Theorem-2 style bound curves.

Family formulas (``s`` is the separation, ``rho`` the intensity, ``alpha`` the scale):

* gaussian:          rho * exp(-(s/alpha)^2)
* whittle-matern:    half-integer nu in {1/2, 3/2, 5/2}, closed forms
* cauchy:            rho * (1 + (s/alpha)^2)^(-nu - d/2)
* bessel:            rho * sin(s/alpha) / (s/alpha), d = 1 only
* ginibre-modulus:   rho * exp(-s^2 / (2 alpha^2)), d = 2

Admissibility of a continuous kernel (its integral operator having spectrum
in [0, 1]) is not checked. For ginibre the bound is computed on the modulus
of a complex kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

FAMILIES = ("gaussian", "whittle-matern", "cauchy", "bessel", "ginibre-modulus")
MONOTONE = {"gaussian", "whittle-matern", "cauchy", "ginibre-modulus"}
DECAY = {
    "gaussian": "exponential",
    "ginibre-modulus": "exponential",
    "whittle-matern": "polynomial_d",
    "cauchy": "polynomial_d",
    "bessel": "polynomial_half",
}

MAX_QUADRATURE_POINTS = 5 * 10**7


@dataclass(frozen=True)
class IsotropicKernel:
    family: str
    rho: float = 1.0
    alpha: float = 1.0
    nu: float = 0.5
    d: int = 1

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if not (self.rho > 0 and self.alpha > 0):
            raise ValueError("rho and alpha must be positive")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError("d must be a positive integer")
        if self.family == "whittle-matern" and self.nu not in (0.5, 1.5, 2.5):
            raise ValueError("whittle-matern supports nu in {1/2, 3/2, 5/2}")
        if self.family == "cauchy" and not self.nu > 0:
            raise ValueError("cauchy needs nu > 0")
        if self.family == "bessel" and self.d != 1:
            raise ValueError("bessel is implemented for d = 1 only")
        if self.family == "ginibre-modulus" and self.d != 2:
            raise ValueError("ginibre-modulus lives in d = 2")

    @classmethod
    def parse(cls, spec: str) -> "IsotropicKernel":
        """Parse ``"family:key=value,..."``; keys are rho, alpha, nu, d."""
        family, _, rest = spec.partition(":")
        family = family.strip()
        params: dict = {}
        aliases = {"rho": "rho", "alpha": "alpha", "nu": "nu", "d": "d"}
        for item in filter(None, (s.strip() for s in rest.split(","))):
            key, sep, value = item.partition("=")
            key = key.strip()
            if not sep or key not in aliases:
                raise ValueError(f"bad kernel parameter {item!r}")
            params[aliases[key]] = int(value) if key == "d" else float(value)
        if "d" not in params:
            params["d"] = 2 if family == "ginibre-modulus" else 1
        return cls(family, **params)

    @property
    def sup(self) -> float:
        """``sup |k|``, attained at zero separation for every built-in family."""
        return self.rho

    def __call__(self, s):
        return evaluate(self, s)


def evaluate(kernel: IsotropicKernel, s):
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("separation must be nonnegative")
    t = s / kernel.alpha
    fam = kernel.family
    if fam == "gaussian":
        out = np.exp(-(t**2))
    elif fam == "ginibre-modulus":
        out = np.exp(-(t**2) / 2)
    elif fam == "whittle-matern":
        if kernel.nu == 0.5:
            out = np.exp(-t)
        elif kernel.nu == 1.5:
            u = math.sqrt(3) * t
            out = (1 + u) * np.exp(-u)
        else:
            u = math.sqrt(5) * t
            out = (1 + u + u**2 / 3) * np.exp(-u)
    elif fam == "cauchy":
        out = (1 + t**2) ** (-kernel.nu - kernel.d / 2)
    else:
        out = np.sinc(t / np.pi)
    out = kernel.rho * out
    return float(out) if out.ndim == 0 else out


def _sinc_peak(k: int) -> float:
    """Location of the k-th side-lobe peak of ``sin t / t``: the root of
    ``tan t = t`` in ``(k pi, k pi + pi/2)``, by bisection."""
    lo, hi = k * math.pi, k * math.pi + math.pi / 2
    sign = (-1) ** k
    for _ in range(80):
        mid = (lo + hi) / 2
        if sign * (math.sin(mid) - mid * math.cos(mid)) > 0:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def omega(kernel: IsotropicKernel, r: float) -> float:
    """``sup_{s >= r} |k(s)|``.

    Monotone families give ``|k(r)|``. For bessel, ``|sin t / t|`` is
    unimodal on each lobe and the lobe peaks decrease, so the sup is the
    larger of ``|k(r)|`` and the first peak at or beyond ``r``.
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    here = abs(evaluate(kernel, r))
    if kernel.family in MONOTONE:
        return here
    t = r / kernel.alpha
    k = max(1, int(t // math.pi))
    peak = _sinc_peak(k)
    if peak < t:
        peak = _sinc_peak(k + 1)
    return max(here, abs(evaluate(kernel, peak * kernel.alpha)))


def decay_class(kernel: IsotropicKernel) -> str:
    return DECAY[kernel.family]


def decay_exponent(kernel: IsotropicKernel) -> float:
    """Power of ``r`` that ``omega`` beats for the polynomial classes."""
    cls = decay_class(kernel)
    if cls == "polynomial_d":
        return float(kernel.d)
    if cls == "polynomial_half":
        return (kernel.d + 1) / 2
    raise ValueError("exponential families have no polynomial exponent")


def decay_check(kernel: IsotropicKernel, r_grid: Sequence[float]) -> dict:
    """Numeric cross-check of the decay class on a sampled range.

    Polynomial classes: ``omega(r) r^e`` should be non-increasing on the
    grid. Exponential class: ``log omega(r)`` should lie below a line in
    ``r`` for large ``r``, checked as ``log omega(r) / r`` non-increasing
    and negative.
    """
    r_grid = np.asarray(r_grid, dtype=float)
    om = np.array([omega(kernel, r) for r in r_grid])
    cls = decay_class(kernel)
    if cls == "exponential":
        # points where omega underflows to zero are consistent by definition
        live = om > 0
        profile = np.full_like(om, -np.inf)
        profile[live] = np.log(om[live]) / r_grid[live]
        ok = bool(np.all(np.diff(profile[live]) <= 1e-12) and np.all(profile[live] < 0))
    else:
        profile = om * r_grid ** decay_exponent(kernel)
        ok = bool(np.all(np.diff(profile) <= 0))
    return {"class": cls, "consistent": ok, "profile": profile.tolist()}


@dataclass(frozen=True)
class Box:
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self) -> None:
        lo = tuple(float(v) for v in self.lower)
        hi = tuple(float(v) for v in self.upper)
        if len(lo) != len(hi):
            raise ValueError("box corners differ in dimension")
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError("box lower corner exceeds upper corner")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dimension(self) -> int:
        return len(self.lower)

    @property
    def volume(self) -> float:
        return float(np.prod(np.subtract(self.upper, self.lower)))

    def distance(self, other: "Box") -> float:
        gaps = [
            max(0.0, lo2 - hi1, lo1 - hi2)
            for lo1, hi1, lo2, hi2 in zip(self.lower, self.upper, other.lower, other.upper)
        ]
        return math.hypot(*gaps)


def l2_cross_mass(kernel: IsotropicKernel, a: Box, b: Box, order: int = 32) -> float:
    """``int_A int_B k(|x - y|)^2 dx dy`` by tensor-product Gauss-Legendre."""
    if a.dimension != kernel.d or b.dimension != kernel.d:
        raise ValueError(f"boxes must have dimension {kernel.d}")
    if order < 2:
        raise ValueError("order must be at least 2")
    d = kernel.d
    if float(order) ** (2 * d) > MAX_QUADRATURE_POINTS:
        raise ValueError(f"{order}^{2 * d} quadrature points is too many; lower the order")
    nodes, weights = np.polynomial.legendre.leggauss(order)

    def axis(lo, hi):
        half = (hi - lo) / 2
        return lo + half * (nodes + 1), half * weights

    xs = [axis(lo, hi) for lo, hi in zip(a.lower, a.upper)]
    ys = [axis(lo, hi) for lo, hi in zip(b.lower, b.upper)]
    # squared distance over the product grid, accumulated one coordinate at a time
    sq = np.zeros((1,) * (2 * d))
    wt = np.ones((1,) * (2 * d))
    for k in range(d):
        (xk, wxk), (yk, wyk) = xs[k], ys[k]
        shape_x = [1] * (2 * d)
        shape_y = [1] * (2 * d)
        shape_x[k] = order
        shape_y[d + k] = order
        diff = xk.reshape(shape_x) - yk.reshape(shape_y)
        sq = sq + diff**2
        wt = wt * wxk.reshape(shape_x) * wyk.reshape(shape_y)
    values = evaluate(kernel, np.sqrt(sq)) ** 2
    return float(max(0.0, (values * wt).sum()))


def bound_curve(
    kernel: IsotropicKernel,
    p: float,
    q: float,
    r_grid: Sequence[float],
    rank: int | None = None,
) -> list[tuple[float, float, float, float | None]]:
    """Rows ``(r, omega, general bound, rank bound)`` over ``r_grid``.

    The rank bound is only filled when a finite ``rank`` is supplied.
    """
    if not (p > 0 and q > 0):
        raise ValueError("p and q must be positive")
    r_grid = [float(r) for r in r_grid]
    if not r_grid or any(b < a for a, b in zip(r_grid, r_grid[1:])):
        raise ValueError("r_grid must be non-empty and sorted")
    ksup = kernel.sup
    const = 4 * p * q * (1 + 2 * p * ksup) * (1 + 2 * q * ksup) * math.exp(2 * ksup * (p + q))
    rows = []
    for r in r_grid:
        om = omega(kernel, r)
        rank_bound = None if rank is None else 4 * p * q * rank**2 * 9.0**rank * om**2
        rows.append((r, om, const * om**2, rank_bound))
    return rows
