"""Finite point processes on a ground space.

A :class:`FiniteProcess` carries its law as an explicit table over all
``2**S`` configurations (bit ``i`` of the mask is site ``i``). A
:class:`DiscreteDPP` carries a symmetric kernel ``K``; with site weights
``w`` the process it defines has inclusion probabilities
``P(a <= X) = det(Kw[a])`` where ``Kw[i, j] = sqrt(w_i w_j) K[i, j]``, so that
its intensity functions with respect to the weighted counting measure are
``rho(a) = det(K[a])``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .ground import (
    Config,
    GroundSpace,
    Region,
    canonical,
    config_to_mask,
    disjoint,
    embed_masks,
    local_masks,
    mask_to_config,
    popcounts,
    subset_order,
    weight_products,
)
from .transforms import (
    BiSetFunction,
    SetFunction,
    lower_difference,
    lower_difference_bi,
    upper_difference_array,
    upper_sum_array,
)

LAW_TOL = 1e-12
SPECTRAL_TOL = 1e-9
AGREEMENT_TOL = 1e-9
NEGATIVE_PROB_TOL = 1e-8
RHO_CLAMP = 1e-12


@dataclass(frozen=True)
class FiniteProcess:
    space: GroundSpace
    law: np.ndarray

    def __post_init__(self) -> None:
        law = np.array(self.law, dtype=float)
        if law.shape != (1 << self.space.size,):
            raise ValueError(f"law must have {1 << self.space.size} entries, got {law.shape}")
        if np.any(law < 0):
            raise ValueError(f"negative probability {law.min():.3g}")
        if abs(law.sum() - 1.0) > LAW_TOL:
            raise ValueError(f"probabilities sum to {law.sum()!r}, not 1")
        law.setflags(write=False)
        object.__setattr__(self, "law", law)

    @classmethod
    def from_mapping(cls, space: GroundSpace, law: Mapping[Iterable[int], float]) -> "FiniteProcess":
        """Build from ``{config: probability}``; omitted configurations get 0."""
        table = np.zeros(1 << space.size)
        for config, p in law.items():
            table[config_to_mask(space.full, space.config(config))] += float(p)
        return cls(space, table)

    @classmethod
    def independent(cls, space: GroundSpace, probs: Sequence[float]) -> "FiniteProcess":
        """Each site present independently with its own probability."""
        probs = np.asarray(probs, dtype=float)
        table = np.ones(1)
        for p in probs:
            table = np.concatenate([table * (1 - p), table * p])
        return cls(space, table)

    @classmethod
    def from_dict(cls, data: dict) -> "FiniteProcess":
        space = GroundSpace.from_dict(data["space"])
        return cls.from_mapping(space, {tuple(e["config"]): e["p"] for e in data["law"]})

    def to_dict(self) -> dict:
        return {
            "space": self.space.to_dict(),
            "law": [
                {"config": list(c), "p": float(p)}
                for c, p in self.items()
                if p != 0.0
            ],
        }

    def items(self):
        for mask in subset_order(self.space.size):
            yield mask_to_config(self.space.full, mask), float(self.law[mask])

    def probability(self, config: Iterable[int]) -> float:
        return float(self.law[config_to_mask(self.space.full, self.space.config(config))])

    def inclusion(self) -> np.ndarray:
        """``P(a <= X)`` for every mask ``a``."""
        return upper_sum_array(self.law)


def _validate_kernel(space: GroundSpace, kernel: np.ndarray) -> list[str]:
    problems = []
    if kernel.shape != (space.size, space.size):
        return [f"kernel shape {kernel.shape} does not match {space.size} sites"]
    if not np.all(np.isfinite(kernel)):
        return ["kernel has non-finite entries"]
    asym = float(np.abs(kernel - kernel.T).max()) if space.size else 0.0
    if asym > LAW_TOL:
        problems.append(f"symmetry violated (max |K_ij - K_ji| = {asym:.3g})")
    else:
        lam = weighted_spectrum(space, kernel)
        if lam.size and (lam.min() < -SPECTRAL_TOL or lam.max() > 1 + SPECTRAL_TOL):
            problems.append(
                f"spectrum outside [0,1] (eigenvalues in [{lam.min():.6g}, {lam.max():.6g}])"
            )
    return problems


def weighted_kernel(space: GroundSpace, kernel: np.ndarray) -> np.ndarray:
    root = np.sqrt(space.weights)
    return kernel * root[:, None] * root[None, :]


def weighted_spectrum(space: GroundSpace, kernel: np.ndarray) -> np.ndarray:
    kw = weighted_kernel(space, np.asarray(kernel, dtype=float))
    return np.linalg.eigvalsh((kw + kw.T) / 2) if kw.size else np.zeros(0)


@dataclass(frozen=True)
class DiscreteDPP:
    space: GroundSpace
    kernel: np.ndarray

    def __post_init__(self) -> None:
        kernel = np.array(self.kernel, dtype=float)
        if kernel.ndim != 2:
            kernel = kernel.reshape(self.space.size, self.space.size)
        problems = _validate_kernel(self.space, kernel)
        if problems:
            raise ValueError("; ".join(problems))
        kernel.setflags(write=False)
        object.__setattr__(self, "kernel", kernel)

    @classmethod
    def from_dict(cls, data: dict) -> "DiscreteDPP":
        return cls(GroundSpace.from_dict(data["space"]), np.array(data["matrix"], dtype=float))

    def to_dict(self) -> dict:
        return {"space": self.space.to_dict(), "matrix": self.kernel.tolist()}

    @property
    def weighted(self) -> np.ndarray:
        return weighted_kernel(self.space, self.kernel)

    def spectrum(self) -> np.ndarray:
        return weighted_spectrum(self.space, self.kernel)

    def rank(self, tol: float = SPECTRAL_TOL) -> int:
        return int((self.spectrum() > tol).sum())

    def correlations(self) -> "CorrelationOracle":
        kernel = self.kernel
        return CorrelationOracle(self.space, lambda region: subset_determinants(kernel, region))


def diagnose_kernel(space: GroundSpace, kernel: np.ndarray) -> dict:
    """Symmetry and spectral diagnostics, without raising."""
    kernel = np.asarray(kernel, dtype=float)
    problems = _validate_kernel(space, kernel)
    report: dict = {"valid": not problems, "problems": problems, "notes": []}
    if kernel.shape == (space.size, space.size) and np.all(np.isfinite(kernel)):
        report["max_asymmetry"] = float(np.abs(kernel - kernel.T).max()) if space.size else 0.0
        lam = weighted_spectrum(space, kernel)
        report["eigenvalues"] = [float(v) for v in lam]
        if not problems and lam.size and lam.max() > 1 - SPECTRAL_TOL:
            report["notes"].append("eigenvalue 1: L-ensemble path disabled")
        if not problems:
            report["rank"] = int((lam > SPECTRAL_TOL).sum())
    return report


def subset_determinants(matrix: np.ndarray, region: Sequence[int]) -> np.ndarray:
    """``det(matrix[a])`` for every local mask ``a`` of ``region`` (1 for the empty set)."""
    region = list(region)
    n = len(region)
    out = np.ones(1 << n)
    if n == 0:
        return out
    sizes = popcounts(n)
    masks = np.arange(1 << n)
    sub = np.asarray(matrix, dtype=float)[np.ix_(region, region)]
    for k in range(1, n + 1):
        group = masks[sizes == k]
        idx = np.array([[j for j in range(n) if m >> j & 1] for m in group])
        blocks = sub[idx[:, :, None], idx[:, None, :]]
        out[group] = np.linalg.det(blocks)
    return out


class CorrelationOracle:
    """Intensity functions ``rho`` of a process, queried on distinct sites.

    ``rho(a) * prod_{i in a} w_i = P(a <= X)``.
    """

    def __init__(
        self,
        space: GroundSpace,
        table_fn: Callable[[Region], np.ndarray],
        null_atoms_undefined: bool = False,
    ):
        self.space = space
        self._table_fn = table_fn
        self._null_atoms_undefined = null_atoms_undefined

    def table(self, region: Iterable[int]) -> np.ndarray:
        """``rho(a)`` for every local mask ``a`` of ``region``."""
        region = self.space.region(region)
        if self._null_atoms_undefined and any(self.space.weights[i] == 0 for i in region):
            raise ValueError("intensity undefined on null atoms")
        rho = np.array(self._table_fn(region), dtype=float)
        if rho.size and rho.min() < -RHO_CLAMP:
            raise ValueError(f"negative intensity {rho.min():.3g}")
        rho[rho < 0] = 0.0
        rho[0] = 1.0
        return rho

    def mass_table(self, region: Iterable[int]) -> np.ndarray:
        """``rho(a) * prod_{i in a} w_i``; for a process this is ``P(a <= X)``."""
        region = self.space.region(region)
        return self.table(region) * weight_products(self.space, region)

    def rho(self, config: Iterable[int]) -> float:
        config = self.space.config(config)
        return float(self.table(config)[-1])

    __call__ = rho


def correlations_of(process: FiniteProcess) -> CorrelationOracle:
    inclusion = process.inclusion()
    space = process.space

    def table(region: Region) -> np.ndarray:
        return inclusion[embed_masks(space.full, region)] / weight_products(space, region)

    return CorrelationOracle(space, table, null_atoms_undefined=True)


def dpp_correlation(dpp: DiscreteDPP, config: Iterable[int]) -> float:
    config = dpp.space.config(config)
    if not config:
        return 1.0
    return float(np.linalg.det(dpp.kernel[np.ix_(config, config)]))


def correlation_tuple(oracle: CorrelationOracle, x: Sequence[int]) -> float:
    """``rho_n`` at an ordered tuple; zero whenever a site repeats."""
    if len(set(x)) != len(x):
        return 0.0
    return oracle.rho(x)


def dpp_to_process(dpp: DiscreteDPP, method: str = "mobius") -> FiniteProcess:
    """Explicit law of a DPP.

    ``"mobius"`` inverts the inclusion probabilities over supersets and works
    for every valid kernel. ``"l-ensemble"`` uses ``L = Kw (I - Kw)^{-1}`` and
    needs every eigenvalue strictly below one.
    """
    space = dpp.space
    kw = dpp.weighted
    if method == "mobius":
        law = upper_difference_array(subset_determinants(kw, space.full))
    elif method == "l-ensemble":
        if space.size and dpp.spectrum().max() > 1 - SPECTRAL_TOL:
            raise ValueError("eigenvalue 1: L-ensemble path disabled")
        eye = np.eye(space.size)
        ell = np.linalg.solve((eye - kw).T, kw.T).T
        law = subset_determinants(ell, space.full) * np.linalg.det(eye - kw)
    else:
        raise ValueError(f"unknown method {method!r}")
    if law.min() < -NEGATIVE_PROB_TOL:
        raise ValueError(f"invalid kernel: probability {law.min():.3g} after inversion")
    law = np.clip(law, 0.0, None)
    # clipping rounding noise can move the total by ~1e-16 per entry
    return FiniteProcess(space, law / law.sum())


def restriction_law(process: FiniteProcess, region: Iterable[int], method: str = "marginal") -> SetFunction:
    """Law of ``X & region`` as a table over the subsets of ``region``.

    ``"marginal"`` sums the law over configurations with the same trace;
    ``"inclusion"`` inverts ``P(b <= X)`` over ``a <= b <= region``.
    """
    space = process.space
    region = space.region(region)
    if method == "marginal":
        traces = local_masks(space.full, region)
        table = np.bincount(traces, weights=process.law, minlength=1 << len(region))
    elif method == "inclusion":
        inclusion = process.inclusion()[embed_masks(space.full, region)]
        table = upper_difference_array(inclusion)
    else:
        raise ValueError(f"unknown method {method!r}")
    return SetFunction(region, table)


def joint_restriction_law(process: FiniteProcess, a: Iterable[int], b: Iterable[int]) -> BiSetFunction:
    """Joint law of ``(X & a, X & b)`` for disjoint regions."""
    space = process.space
    a, b = space.region(a), space.region(b)
    if not disjoint(a, b):
        raise ValueError("regions must be disjoint")
    union = canonical(a + b)
    marginal = restriction_law(process, union)
    traces = np.arange(1 << len(union))
    ia = local_masks(union, a)
    ib = local_masks(union, b)
    joint = np.zeros((1 << len(a), 1 << len(b)))
    joint[ia[traces], ib[traces]] = marginal.values
    return BiSetFunction(a, b, joint)


def expectation_direct(process: FiniteProcess, f: SetFunction) -> float:
    if f.region != process.space.full:
        raise ValueError("f must be tabulated over the whole ground space")
    return float(process.law @ f.values)


def expectation_series(oracle: CorrelationOracle, f: SetFunction, region: Iterable[int]) -> float:
    """``E[f(X)]`` from the intensity functions and the lower difference of ``f``.

    The integral over ``region^n`` against ``rho_n`` collapses to a sum over
    subsets: tuples with a repeated site have zero intensity and the ``n!``
    orderings of a subset cancel the ``1/n!``.
    """
    region = oracle.space.region(region)
    if f.region != region:
        raise ValueError(f"f is tabulated over {f.region}, not {region}")
    return float(lower_difference(f).values @ oracle.mass_table(region))


def expectation_series_bi(
    oracle_x: CorrelationOracle,
    oracle_y: CorrelationOracle,
    f: BiSetFunction,
    region_a: Iterable[int],
    region_b: Iterable[int],
) -> float:
    """``E[f(X, Y)]`` for independent ``X`` and ``Y``, from their intensities."""
    region_a = oracle_x.space.region(region_a)
    region_b = oracle_y.space.region(region_b)
    if (f.region1, f.region2) != (region_a, region_b):
        raise ValueError("f is not tabulated over the given regions")
    check = lower_difference_bi(f).values
    return float(oracle_x.mass_table(region_a) @ check @ oracle_y.mass_table(region_b))


def principal_minor(matrix: np.ndarray, i: int) -> float:
    """Determinant of the leading ``i x i`` block."""
    matrix = np.asarray(matrix, dtype=float)
    if not 1 <= i <= matrix.shape[0]:
        raise ValueError(f"minor order {i} out of range for a {matrix.shape[0]}x{matrix.shape[0]} matrix")
    return float(np.linalg.det(matrix[:i, :i]))


def deleted_minor(matrix: np.ndarray, i: int) -> float:
    """Determinant of ``matrix`` with row and column ``i`` (1-based) removed."""
    matrix = np.asarray(matrix, dtype=float)
    n = matrix.shape[0]
    if not 1 <= i <= n:
        raise ValueError(f"index {i} out of range for a {n}x{n} matrix")
    keep = [k for k in range(n) if k != i - 1]
    if not keep:
        return 1.0
    return float(np.linalg.det(matrix[np.ix_(keep, keep)]))


def sample(process: FiniteProcess, seed: int, count: int) -> list[Config]:
    """Inverse-CDF draws from the law, with configurations in enumeration order.

    Uniforms come from numpy's PCG64 seeded with ``seed``.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    order = np.array(subset_order(process.space.size), dtype=np.int64)
    cdf = np.cumsum(process.law[order])
    u = np.random.Generator(np.random.PCG64(seed)).random(count)
    picks = np.searchsorted(cdf, u * cdf[-1], side="right")
    picks = np.minimum(picks, len(order) - 1)
    full = process.space.full
    return [mask_to_config(full, int(order[k])) for k in picks]


def load_kernel(path: str) -> DiscreteDPP:
    with open(path) as fh:
        return DiscreteDPP.from_dict(json.load(fh))
