"""Conjugation action of ``prod_i U(n_i)`` on A (x) A through its Lie algebra.

A matrix unit ``E`` of ``gl(n_i)`` acts on tensors by the derivation
``D_E(a (x) b) = [E, a] (x) b + a (x) [E, b]``.  Because the unitary group is
connected, invariants of the group are exactly the joint kernel of these
derivations and invariant subspaces are exactly the subspaces they preserve.
Derivations preserve each ``(i, j)`` block, so they commute with the
isometric rescaling and act on frames directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .algebra import Algebra, Tensor
from .subspace import DEFAULT_TOL, BAND, Subspace, TolerancePolicy, project, rank_revealing

__all__ = [
    "Derivation",
    "DerivationSet",
    "Weight",
    "derivation_ops",
    "derive",
    "invariant_subspace",
    "haar_average",
    "orbit_span",
    "weight_of",
    "is_highest_weight",
    "weyl_dim",
]

WEIGHT_ATOL = 1e-9


@dataclass(frozen=True, eq=False)
class Derivation:
    factor: int
    a: int
    b: int
    op: sp.csr_matrix = field(repr=False)

    @property
    def kind(self) -> str:
        if self.a == self.b:
            return "torus"
        return "raising" if self.b == self.a + 1 else ("lowering" if self.a == self.b + 1 else "other")


@dataclass(frozen=True, eq=False)
class DerivationSet:
    algebra: Algebra
    generators: tuple[Derivation, ...]

    def by_kind(self, kind: str) -> list[Derivation]:
        return [g for g in self.generators if g.kind == kind]

    @property
    def raising(self) -> list[Derivation]:
        return self.by_kind("raising")

    @property
    def lowering(self) -> list[Derivation]:
        return self.by_kind("lowering")

    @property
    def torus(self) -> list[Derivation]:
        return self.by_kind("torus")

    def get(self, factor: int, a: int, b: int) -> Derivation:
        for g in self.generators:
            if (g.factor, g.a, g.b) == (factor, a, b):
                return g
        raise KeyError((factor, a, b))


def _ad(E: np.ndarray) -> sp.csr_matrix:
    """``X -> EX - XE`` on row-major ``vec(X)``."""
    n = E.shape[0]
    I = sp.identity(n, format="csr")
    return (sp.kron(sp.csr_matrix(E), I) - sp.kron(I, sp.csr_matrix(E.T))).tocsr()


@lru_cache(maxsize=32)
def derivation_ops(A: Algebra) -> DerivationSet:
    """All ``sum_i n_i^2`` derivations ``D_E`` as sparse ``d2 x d2`` matrices."""
    gens = []
    for f, n in enumerate(A.dims):
        for a in range(n):
            for b in range(n):
                E = np.zeros((n, n))
                E[a, b] = 1.0
                ad = _ad(E)
                blocks = []
                for i, j in A.block_pairs:
                    si, sj = A.dims[i] ** 2, A.dims[j] ** 2
                    blk = sp.csr_matrix((si * sj, si * sj))
                    if i == f:
                        blk = blk + sp.kron(ad, sp.identity(sj))
                    if j == f:
                        blk = blk + sp.kron(sp.identity(si), ad)
                    blocks.append(blk)
                op = sp.block_diag(blocks, format="csr")
                gens.append(Derivation(f, a, b, op))
    return DerivationSet(A, tuple(gens))


def derive(A: Algebra, factor: int, a: int, b: int, t: Tensor) -> Tensor:
    """Apply ``D_E`` for ``E = E^{(factor)}_{ab}``."""
    return Tensor(A, derivation_ops(A).get(factor, a, b).op @ t.coeffs)


@lru_cache(maxsize=32)
def invariant_subspace(A: Algebra, tol: TolerancePolicy = DEFAULT_TOL) -> Subspace:
    """Joint kernel of all derivations, i.e. the group-invariant tensors.

    Torus derivations are diagonal, so their joint kernel is the span of the
    zero-weight coordinates; the remaining generators are then intersected
    one at a time by SVD null spaces.
    """
    ds = derivation_ops(A)
    zero_weight = np.ones(A.d2, dtype=bool)
    for g in ds.torus:
        zero_weight &= np.abs(g.op.diagonal()) < 0.5
    N = np.eye(A.d2, dtype=complex)[:, zero_weight]
    band = False
    for g in ds.generators:
        if g.kind == "torus" or N.shape[1] == 0:
            continue
        M = g.op @ N
        _, s, Vh = np.linalg.svd(M, full_matrices=True)
        s_full = np.zeros(N.shape[1])
        s_full[: s.size] = s
        cut = tol.cutoff(max(s_full.max(initial=0.0), 1.0))
        band |= bool(np.any((s_full > cut / BAND) & (s_full < cut * BAND)))
        N = N @ Vh.conj().T[:, s_full <= cut]
    Q, _ = np.linalg.qr(N) if N.shape[1] else (N, None)
    return Subspace(A, Q, tol, band)


def haar_average(A: Algebra, t: Tensor) -> Tensor:
    """Average of ``t`` over the unitary group: projection onto the invariants."""
    return project(invariant_subspace(A), t)


def orbit_span(A: Algebra, v: Tensor, tol: TolerancePolicy = DEFAULT_TOL) -> Subspace:
    """Smallest invariant subspace containing ``v``.

    Sweeps apply every generator to the vectors added in the previous sweep
    and stop once a sweep adds nothing.
    """
    ds = derivation_ops(A)
    y = A.scale * v.coeffs
    nrm = np.linalg.norm(y)
    if nrm == 0:
        raise ValueError("orbit_span needs a non-zero vector")
    Q = (y / nrm)[:, None]
    frontier = Q
    band = False
    while frontier.shape[1]:
        Y = np.hstack([g.op @ frontier for g in ds.generators])
        ref = float(np.linalg.norm(Y, axis=0).max())
        if ref == 0:
            break
        for _ in range(2):
            Y = Y - Q @ (Q.conj().T @ Y)
        new, b = rank_revealing(Y, tol, smax=ref)
        band |= b
        if new.shape[1] == 0:
            break
        Q, _ = np.linalg.qr(np.hstack([Q, new]))
        frontier = Q[:, -new.shape[1]:]
    return Subspace(A, Q, tol, band)


@dataclass(frozen=True)
class Weight:
    """Torus weight: one integer tuple per factor (entry c is the ``E_cc`` eigenvalue)."""

    parts: tuple[tuple[int, ...], ...]

    def __str__(self) -> str:
        return " | ".join("(" + ",".join(str(x) for x in p) + ")" for p in self.parts)


def weight_of(A: Algebra, v: Tensor, atol: float = WEIGHT_ATOL) -> Weight | None:
    """Simultaneous torus eigenvalues of ``v``, or ``None`` if ``v`` is not a weight vector."""
    y = A.scale * v.coeffs
    nrm2 = float(np.vdot(y, y).real)
    if nrm2 == 0:
        raise ValueError("weight_of needs a non-zero vector")
    nrm = nrm2**0.5
    ds = derivation_ops(A)
    parts = []
    for f, n in enumerate(A.dims):
        part = []
        for c in range(n):
            d = ds.get(f, c, c).op.diagonal().real
            lam = float(np.sum(d * np.abs(y) ** 2) / nrm2)
            if np.linalg.norm((d - lam) * y) > atol * nrm or abs(lam - round(lam)) > atol:
                return None
            part.append(int(round(lam)))
        parts.append(tuple(part))
    return Weight(tuple(parts))


def is_highest_weight(A: Algebra, v: Tensor, atol: float = WEIGHT_ATOL) -> bool:
    """True iff ``v`` is a weight vector killed by every raising derivation ``D_{E_{c,c+1}}``."""
    if weight_of(A, v, atol) is None:
        raise ValueError("is_highest_weight needs a weight vector")
    y = A.scale * v.coeffs
    nrm = np.linalg.norm(y)
    return all(np.linalg.norm(g.op @ y) <= atol * nrm for g in derivation_ops(A).raising)


def weyl_dim(lam: Sequence[int], n: int | None = None) -> int:
    """Dimension of the irreducible ``U(n)`` module of highest weight ``lam``.

    ``prod_{i<j} (lam_i - lam_j + j - i) / (j - i)``, evaluated exactly.
    """
    lam = [int(x) for x in lam]
    if n is not None and len(lam) != n:
        raise ValueError(f"weight has length {len(lam)}, expected {n}")
    if any(lam[i] < lam[i + 1] for i in range(len(lam) - 1)):
        raise ValueError(f"weight {tuple(lam)} is not weakly decreasing")
    d = Fraction(1)
    for i in range(len(lam)):
        for j in range(i + 1, len(lam)):
            d *= Fraction(lam[i] - lam[j] + j - i, j - i)
    assert d.denominator == 1
    return int(d)
