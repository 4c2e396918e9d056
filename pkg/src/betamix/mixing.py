"""Exact mixing coefficients and intensity-based upper and lower bounds.

On a finite ground space the sigma-algebra generated by ``X & A`` is atomic,
with one atom per subset of ``A``, so ``beta`` is a finite total-variation sum
and ``alpha`` a finite maximum over unions of atoms.

Kernel sup-norms in the DPP bounds are taken over the unweighted kernel
entries of the sites in play (``A | B``), the discrete stand-in for
``sup |K(x, y)|``.
"""

from __future__ import annotations

import csv
import io
import itertools
import logging
import math
from dataclasses import asdict, dataclass, fields
from typing import Iterable, Optional, Union

import numpy as np

from .ground import (
    GroundSpace,
    Region,
    canonical,
    disjoint,
    distance,
    local_masks,
    mask_to_config,
    measure,
    popcounts,
)
from .process import (
    SPECTRAL_TOL,
    CorrelationOracle,
    DiscreteDPP,
    FiniteProcess,
    correlations_of,
    deleted_minor,
    dpp_to_process,
    joint_restriction_law,
)
from .transforms import BiSetFunction

log = logging.getLogger(__name__)

INEQUALITY_TOL = 1e-10
ALPHA_MAX_ATOMS = 8
SWEEP_MAX_PAIRS = 10**6


def _check_disjoint(a, b) -> None:
    if not disjoint(a, b):
        raise ValueError("regions must be disjoint")


def _marginals(joint: BiSetFunction) -> tuple[np.ndarray, np.ndarray]:
    return joint.values.sum(axis=1), joint.values.sum(axis=0)


def beta_exact(process: FiniteProcess, a: Iterable[int], b: Iterable[int]) -> float:
    """Total variation between the law of ``(X&A, X&B)`` and the product of its marginals."""
    joint = joint_restriction_law(process, a, b)
    if not joint.region1 or not joint.region2:
        return 0.0
    pa, pb = _marginals(joint)
    return 0.5 * float(np.abs(joint.values - np.outer(pa, pb)).sum())


def beta_sup_form_check(
    process: FiniteProcess, a: Iterable[int], b: Iterable[int], f: BiSetFunction
) -> float:
    """``|E f(X&A, X&B) - E f(X&A, X'&B)| / 2`` with ``X'`` an independent copy of ``X``."""
    if f.sup_norm() > 1.0:
        raise ValueError(f"test function has sup norm {f.sup_norm():.6g} > 1")
    joint = joint_restriction_law(process, a, b)
    if (f.region1, f.region2) != (joint.region1, joint.region2):
        raise ValueError("f is not tabulated over the given regions")
    pa, pb = _marginals(joint)
    coupled = float((joint.values * f.values).sum())
    independent = float(pa @ f.values @ pb)
    return 0.5 * abs(coupled - independent)


def sign_maximizer(process: FiniteProcess, a: Iterable[int], b: Iterable[int]) -> BiSetFunction:
    """The test function attaining ``beta`` in the sup form."""
    joint = joint_restriction_law(process, a, b)
    pa, pb = _marginals(joint)
    return BiSetFunction(joint.region1, joint.region2, np.sign(joint.values - np.outer(pa, pb)))


def _event_matrix(n_atoms: int) -> np.ndarray:
    """Row ``e`` is the indicator of the atoms in event ``e`` (every union of atoms)."""
    events = np.arange(1 << n_atoms)
    return ((events[:, None] >> np.arange(n_atoms)[None, :]) & 1).astype(float)


def alpha_exact(process: FiniteProcess, a: Iterable[int], b: Iterable[int]) -> float:
    """``max |P(S & T) - P(S) P(T)|`` over events of ``X&A`` and ``X&B``."""
    a, b = process.space.region(a), process.space.region(b)
    _check_disjoint(a, b)
    if 1 << len(a) > ALPHA_MAX_ATOMS or 1 << len(b) > ALPHA_MAX_ATOMS:
        raise ValueError("alpha enumeration cap exceeded")
    if not a or not b:
        return 0.0
    joint = joint_restriction_law(process, a, b)
    pa, pb = _marginals(joint)
    ea = _event_matrix(1 << len(a))
    eb = _event_matrix(1 << len(b))
    both = ea @ joint.values @ eb.T
    return float(np.abs(both - np.outer(ea @ pa, eb @ pb)).max())


def _split_tables(space: GroundSpace, a: Region, b: Region):
    union = canonical(a + b)
    ia = local_masks(union, a)
    ib = local_masks(union, b)
    return union, ia, ib


def theorem1_terms(oracle: CorrelationOracle, a: Iterable[int], b: Iterable[int]) -> np.ndarray:
    """Per-pair terms ``2^{|a|+|b|} |rho(a) rho(b) - rho(a u b)| prod w``, indexed ``[a, b]``."""
    space = oracle.space
    a, b = space.region(a), space.region(b)
    _check_disjoint(a, b)
    union, ia, ib = _split_tables(space, a, b)
    mass = oracle.mass_table(union)
    # for a disjoint split, prod_{a u b} w = prod_a w * prod_b w, so masses factor the same way
    table = np.zeros((1 << len(a), 1 << len(b)))
    table[ia, ib] = mass
    ma = table[:, 0]
    mb = table[0, :]
    scale = np.outer(2.0 ** popcounts(len(a)), 2.0 ** popcounts(len(b)))
    return scale * np.abs(np.outer(ma, mb) - table)


def theorem1_bound(oracle: CorrelationOracle, a: Iterable[int], b: Iterable[int]) -> float:
    """Intensity-based upper bound on ``beta`` for one pair of disjoint regions.

    The series over ``m, n`` and tuples in ``A^m x B^n`` is summed as a finite
    sum over subsets ``a <= A``, ``b <= B``.
    """
    return float(theorem1_terms(oracle, a, b).sum())


def _cross_block(dpp: DiscreteDPP, a: Region, b: Region) -> np.ndarray:
    return dpp.kernel[np.ix_(a, b)] if a and b else np.zeros((len(a), len(b)))


def kernel_sup(dpp: DiscreteDPP, a: Iterable[int], b: Iterable[int]) -> float:
    """``max |K_ij|`` over ``i, j`` in ``A | B`` (unweighted kernel)."""
    sites = list(canonical(list(a) + list(b)))
    if not sites:
        return 0.0
    return float(np.abs(dpp.kernel[np.ix_(sites, sites)]).max())


def cross_l2(dpp: DiscreteDPP, a: Iterable[int], b: Iterable[int]) -> float:
    """``sum_{i in A, j in B} w_i w_j K_ij^2``, the discrete ``int_{AxB} K^2``."""
    a, b = dpp.space.region(a), dpp.space.region(b)
    kw = dpp.weighted
    return float((kw[np.ix_(a, b)] ** 2).sum()) if a and b else 0.0


def cross_omega(dpp: DiscreteDPP, a: Iterable[int], b: Iterable[int]) -> float:
    a, b = dpp.space.region(a), dpp.space.region(b)
    block = _cross_block(dpp, a, b)
    return float(np.abs(block).max()) if block.size else 0.0


def _general_constant(p: float, q: float, ksup: float) -> float:
    return 4 * (1 + 2 * p * ksup) * (1 + 2 * q * ksup) * math.exp(2 * (p + q) * ksup)


def dpp_bound_general(dpp: DiscreteDPP, a: Iterable[int], b: Iterable[int]) -> float:
    """Closed-form DPP bound with the cross-block L2 mass."""
    a, b = dpp.space.region(a), dpp.space.region(b)
    _check_disjoint(a, b)
    p, q = measure(dpp.space, a), measure(dpp.space, b)
    return _general_constant(p, q, kernel_sup(dpp, a, b)) * cross_l2(dpp, a, b)


def dpp_bound_display(dpp: DiscreteDPP, a: Iterable[int], b: Iterable[int]) -> float:
    """The looser form with ``p q omega^2`` in place of the L2 mass."""
    a, b = dpp.space.region(a), dpp.space.region(b)
    _check_disjoint(a, b)
    p, q = measure(dpp.space, a), measure(dpp.space, b)
    return _general_constant(p, q, kernel_sup(dpp, a, b)) * p * q * cross_omega(dpp, a, b) ** 2


def dpp_bound_rank(dpp: DiscreteDPP, a: Iterable[int], b: Iterable[int]) -> float:
    """``4 p q N^2 9^N omega^2`` with ``N`` the numerical rank of the weighted kernel."""
    a, b = dpp.space.region(a), dpp.space.region(b)
    _check_disjoint(a, b)
    n = dpp.rank()
    p, q = measure(dpp.space, a), measure(dpp.space, b)
    return 4 * p * q * n**2 * 9.0**n * cross_omega(dpp, a, b) ** 2


def dpp_lower_bound(dpp: DiscreteDPP, a: Iterable[int], b: Iterable[int]) -> float:
    """``2 (1-M)^{(p+q)|K|/M} sum_{AxB} Kw^2`` for nonnegative kernels with top eigenvalue ``M < 1``."""
    a, b = dpp.space.region(a), dpp.space.region(b)
    _check_disjoint(a, b)
    if np.any(dpp.kernel < 0):
        raise ValueError("proposition hypotheses violated: negative kernel entry")
    top = float(dpp.spectrum().max()) if dpp.space.size else 0.0
    if top > 1 - SPECTRAL_TOL:
        raise ValueError(f"proposition hypotheses violated: top eigenvalue {top:.12g} >= 1")
    l2 = cross_l2(dpp, a, b)
    if l2 == 0.0 or top <= 0.0:
        return 0.0
    p, q = measure(dpp.space, a), measure(dpp.space, b)
    return 2 * (1 - top) ** ((p + q) * kernel_sup(dpp, a, b) / top) * l2


def lower_bound_applies(dpp: DiscreteDPP) -> bool:
    if np.any(dpp.kernel < 0):
        return False
    return not dpp.space.size or float(dpp.spectrum().max()) <= 1 - SPECTRAL_TOL


def determinant_gap(matrix: np.ndarray, x: Iterable[int], y: Iterable[int]) -> tuple[float, float, float]:
    """``|det K[x] det K[y] - det K[x,y]|`` and two upper bounds for it.

    ``bound1 = n m |K|^{n+m-2} sum K(x_i, y_j)^2`` with ``|K|`` the largest
    entry of ``K[x,y]``. ``bound2`` replaces ``n m |K|^{n+m-2}`` by the
    product of the sums of the ``(n-1)`` and ``(m-1)`` principal minors
    obtained by deleting one point of ``x`` (resp. ``y``).
    """
    k = np.asarray(matrix, dtype=float)
    x, y = list(x), list(y)
    if len(set(x)) != len(x) or len(set(y)) != len(y) or set(x) & set(y):
        raise ValueError("x and y must be disjoint tuples of distinct indices")
    n, m = len(x), len(y)
    if n == 0 or m == 0:
        return 0.0, 0.0, 0.0
    kx, ky, kxy = k[np.ix_(x, x)], k[np.ix_(y, y)], k[np.ix_(x + y, x + y)]
    gap = abs(np.linalg.det(kx) * np.linalg.det(ky) - np.linalg.det(kxy))
    cross = float((k[np.ix_(x, y)] ** 2).sum())
    ksup = float(np.abs(kxy).max())
    bound1 = n * m * ksup ** (n + m - 2) * cross
    minors_x = sum(deleted_minor(kx, i) for i in range(1, n + 1))
    minors_y = sum(deleted_minor(ky, j) for j in range(1, m + 1))
    bound2 = minors_x * minors_y * cross
    return float(gap), float(bound1), float(bound2)


@dataclass
class MixingReport:
    A: tuple[int, ...]
    B: tuple[int, ...]
    p: float
    q: float
    r: float
    beta_exact: float
    alpha_exact: Optional[float]
    bound_theorem1: float
    bound_dpp_general: Optional[float] = None
    bound_dpp_rank: Optional[float] = None
    lower_bound_dpp: Optional[float] = None

    def to_dict(self) -> dict:
        out = asdict(self)
        out["A"] = list(self.A)
        out["B"] = list(self.B)
        if math.isinf(self.r):
            out["r"] = "inf"
        return out

    @staticmethod
    def csv_header() -> list[str]:
        return [f.name for f in fields(MixingReport)]

    def csv_row(self) -> list[str]:
        row = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                row.append("")
            elif f.name in ("A", "B"):
                row.append(" ".join(str(i) for i in v))
            else:
                row.append(repr(float(v)))
        return row

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.csv_header())
        writer.writerow(self.csv_row())
        return buf.getvalue()


Source = Union[FiniteProcess, DiscreteDPP]


def _resolve(source: Source) -> tuple[FiniteProcess, Optional[DiscreteDPP]]:
    if isinstance(source, DiscreteDPP):
        return dpp_to_process(source), source
    return source, None


def mixing_report(source: Source, a: Iterable[int], b: Iterable[int]) -> MixingReport:
    """Exact coefficients and every applicable bound for one pair of regions."""
    process, dpp = _resolve(source)
    return _report(process, dpp, correlations_of(process) if dpp is None else dpp.correlations(), a, b)


def _report(process, dpp, oracle, a, b) -> MixingReport:
    space = process.space
    a, b = space.region(a), space.region(b)
    _check_disjoint(a, b)
    alpha = None
    if 1 << len(a) <= ALPHA_MAX_ATOMS and 1 << len(b) <= ALPHA_MAX_ATOMS:
        alpha = alpha_exact(process, a, b)
    report = MixingReport(
        A=a,
        B=b,
        p=measure(space, a),
        q=measure(space, b),
        r=distance(space, a, b),
        beta_exact=beta_exact(process, a, b),
        alpha_exact=alpha,
        bound_theorem1=theorem1_bound(oracle, a, b),
    )
    if dpp is not None:
        report.bound_dpp_general = dpp_bound_general(dpp, a, b)
        if dpp.rank() < space.size:
            report.bound_dpp_rank = dpp_bound_rank(dpp, a, b)
        if lower_bound_applies(dpp):
            report.lower_bound_dpp = dpp_lower_bound(dpp, a, b)
    return report


def admissible_pairs(
    space: GroundSpace, p: float, q: float, r: float, max_pairs: int = SWEEP_MAX_PAIRS
) -> list[tuple[Region, Region]]:
    """Disjoint ``(A, B)`` with ``mu(A) <= p``, ``mu(B) <= q`` and ``dist(A, B) > r``, sorted."""
    n = space.size
    full = space.full
    weights = space.weights
    diff = space.coords[:, None, :] - space.coords[None, :, :]
    dist = np.sqrt((diff**2).sum(-1))
    mass = np.zeros(1 << n)
    for k in range(n):
        mass[1 << k : 1 << (k + 1)] = mass[: 1 << k] + weights[k]
    small_a = [m for m in range(1 << n) if mass[m] <= p]
    small_b = set(m for m in range(1 << n) if mass[m] <= q)
    pairs = []
    for ma in small_a:
        a = mask_to_config(full, ma)
        rest = ((1 << n) - 1) & ~ma
        mb = rest
        while True:
            if mb in small_b:
                b = mask_to_config(full, mb)
                if not a or not b or dist[np.ix_(a, b)].min() > r:
                    pairs.append((a, b))
                    if len(pairs) > max_pairs:
                        raise ValueError(f"more than {max_pairs} admissible pairs; raise the cap")
            if mb == 0:
                break
            mb = (mb - 1) & rest
    pairs.sort()
    return pairs


def beta_pq_r_sweep(
    source: Source, p: float, q: float, r: float, max_pairs: int = SWEEP_MAX_PAIRS
) -> MixingReport:
    """Maximize ``beta`` over all admissible region pairs of the ground space.

    This is the exact supremum for the discrete space. Ties go to the
    lexicographically smallest ``(A, B)``.
    """
    process, dpp = _resolve(source)
    best, best_pair = -1.0, None
    for a, b in admissible_pairs(process.space, p, q, r, max_pairs):
        value = beta_exact(process, a, b) if a and b else 0.0
        if value > best:
            best, best_pair = value, (a, b)
    oracle = correlations_of(process) if dpp is None else dpp.correlations()
    return _report(process, dpp, oracle, *best_pair)
