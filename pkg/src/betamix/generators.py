"""Random test instances: ground spaces, kernels, explicit laws, regions."""

from __future__ import annotations

import numpy as np

from .ground import GroundSpace, Region
from .process import DiscreteDPP, FiniteProcess


def random_space(rng: np.random.Generator, n: int, d: int = 2, unit_weights: bool = True) -> GroundSpace:
    coords = rng.uniform(0, 4, size=(n, d))
    weights = np.ones(n) if unit_weights else rng.uniform(0.2, 2.0, size=n)
    return GroundSpace(coords, weights)


def random_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return q * np.sign(np.diag(r))


def random_spectral_matrix(
    rng: np.random.Generator,
    n: int,
    top: float = 1.0,
    rank: int | None = None,
    projection: bool = False,
) -> np.ndarray:
    """Symmetric PSD matrix with eigenvalues in ``[0, top]``.

    ``rank`` zeroes all but that many eigenvalues; ``projection`` sets the
    surviving ones to exactly ``top``.
    """
    if n == 0:
        return np.zeros((0, 0))
    lam = np.full(n, top) if projection else rng.uniform(0, top, size=n)
    if rank is not None:
        lam[rank:] = 0.0
    q = random_orthogonal(rng, n)
    m = (q * lam) @ q.T
    return (m + m.T) / 2


def dpp_from_weighted(space: GroundSpace, weighted: np.ndarray) -> DiscreteDPP:
    """DPP whose weighted kernel is ``weighted``."""
    root = np.sqrt(space.weights)
    return DiscreteDPP(space, weighted / root[:, None] / root[None, :])


def random_dpp(
    rng: np.random.Generator,
    space: GroundSpace,
    top: float = 1.0,
    rank: int | None = None,
    projection: bool = False,
) -> DiscreteDPP:
    return dpp_from_weighted(space, random_spectral_matrix(rng, space.size, top, rank, projection))


def gaussian_dpp(space: GroundSpace, length: float = 1.0, top: float = 0.9) -> DiscreteDPP:
    """Gaussian-kernel DPP, ``K_ij ~ exp(-|x_i - x_j|^2 / length^2)``, scaled so the
    weighted spectrum tops out at ``top``. Entries are nonnegative."""
    diff = space.coords[:, None, :] - space.coords[None, :, :]
    base = np.exp(-(diff**2).sum(-1) / length**2)
    root = np.sqrt(space.weights)
    top_eig = np.linalg.eigvalsh(base * root[:, None] * root[None, :]).max()
    return DiscreteDPP(space, base * (top / top_eig))


def random_law(rng: np.random.Generator, space: GroundSpace, sparsity: float = 0.0) -> FiniteProcess:
    """Explicit law from a Dirichlet draw, with a random fraction of configurations zeroed."""
    size = 1 << space.size
    law = rng.dirichlet(np.full(size, 0.5))
    if sparsity > 0:
        law[rng.random(size) < sparsity] = 0.0
        if law.sum() == 0:
            law[rng.integers(size)] = 1.0
    return FiniteProcess(space, law / law.sum())


def random_disjoint(
    rng: np.random.Generator, space: GroundSpace, max_a: int = 3, max_b: int = 3, allow_empty: bool = False
) -> tuple[Region, Region]:
    n = space.size
    low = 0 if allow_empty else 1
    perm = rng.permutation(n)
    na = int(rng.integers(low, min(max_a, n - low) + 1))
    nb = int(rng.integers(low, min(max_b, n - na) + 1))
    a = tuple(sorted(int(i) for i in perm[:na]))
    b = tuple(sorted(int(i) for i in perm[na : na + nb]))
    return a, b
