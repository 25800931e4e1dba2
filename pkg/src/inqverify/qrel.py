"""Projection generators, the elements ``m_p = p (x) (1 - p)`` and their spans.

Factor indices and subsets are zero-based throughout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Iterable, Iterator, Sequence

import numpy as np

from .algebra import (
    Algebra,
    Element,
    Tensor,
    factor_element,
    flip_coeffs,
    mu_matrix,
    mu_op_matrix,
    tensor,
    unit,
)
from .subspace import (
    DEFAULT_TOL,
    BAND,
    Subspace,
    TolerancePolicy,
    intersect,
    involution_eigenspace,
    span,
)

__all__ = [
    "Projection",
    "ProjectionFamily",
    "SaturationResult",
    "subset_support",
    "haar_unitary",
    "random_projection",
    "m_p",
    "kernel_subspace",
    "joint_plus",
    "joint_minus",
    "saturate",
    "saturate_stream",
    "inq_span",
    "traceless_basis",
    "block_subspace",
    "sym_unit",
    "io_element",
    "delta_ps",
    "proper_subsets",
]

PROJECTION_ATOL = 1e-9


class Projection(Element):
    """An element with ``p = p* = p^2`` (checked to 1e-9 in Frobenius norm)."""

    def __post_init__(self) -> None:
        super().__post_init__()
        for b in self.blocks:
            if np.linalg.norm(b @ b - b) > PROJECTION_ATOL or np.linalg.norm(b.conj().T - b) > PROJECTION_ATOL:
                raise ValueError("not a projection: idempotence or self-adjointness residual above 1e-9")

    @classmethod
    def of(cls, x: Element) -> Projection:
        return x if isinstance(x, Projection) else cls(x.algebra, x.blocks)

    def complement(self) -> Projection:
        return Projection(self.algebra, tuple(np.eye(b.shape[0]) - b for b in self.blocks))


def _subset(A: Algebra, S: Iterable[int]) -> frozenset[int]:
    S = frozenset(int(i) for i in S)
    for i in S:
        A.check_factor(i)
    return S


def subset_support(A: Algebra, S: Iterable[int]) -> Projection:
    """``1_S``: identity on the factors in ``S``, zero elsewhere."""
    S = _subset(A, S)
    return Projection(A, tuple(np.eye(n) if i in S else np.zeros((n, n)) for i, n in enumerate(A.dims)))


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed ``U(n)`` sample: Ginibre matrix, QR, phases of R's diagonal moved into Q."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_projection(A: Algebra, ranks: Sequence[int], rng: np.random.Generator) -> Projection:
    """Per factor ``U diag(1^r, 0) U*`` with Haar ``U``."""
    ranks = tuple(int(r) for r in ranks)
    if len(ranks) != A.k:
        raise ValueError(f"expected {A.k} ranks, got {len(ranks)}")
    blocks = []
    for r, n in zip(ranks, A.dims):
        if not 0 <= r <= n:
            raise ValueError(f"rank {r} out of range for M_{n}")
        U = haar_unitary(n, rng)
        V = U[:, :r]
        p = V @ V.conj().T
        blocks.append(0.5 * (p + p.conj().T))
    return Projection(A, tuple(blocks))


def m_p(A: Algebra, p: Element) -> Tensor:
    """``p (x) (1 - p)``."""
    p = Projection.of(p)
    if p.algebra != A:
        raise ValueError("projection does not conform to the algebra")
    return tensor(p, unit(A) - p)


# ---- multiplication kernels ------------------------------------------------------


def _nullspace(A: Algebra, M: np.ndarray, tol: TolerancePolicy) -> Subspace:
    """Null space of a map given on coefficients, returned as a Subspace."""
    Ms = M / A.scale[None, :]
    _, s, Vh = np.linalg.svd(Ms, full_matrices=True)
    cut = tol.cutoff(s[0] if s.size else 0.0)
    s_full = np.zeros(A.d2)
    s_full[: s.size] = s
    null = s_full <= cut
    band = bool(np.any((s_full > cut / BAND) & (s_full < cut * BAND)))
    return Subspace(A, Vh.conj().T[:, null], tol, band)


@lru_cache(maxsize=64)
def kernel_subspace(A: Algebra, which: str = "joint", tol: TolerancePolicy = DEFAULT_TOL) -> Subspace:
    """``ker mu``, ``ker mu_op`` or their intersection (``which="joint"``)."""
    if which == "mu":
        return _nullspace(A, mu_matrix(A), tol)
    if which == "mu_op":
        return _nullspace(A, mu_op_matrix(A), tol)
    if which == "joint":
        return intersect(kernel_subspace(A, "mu", tol), kernel_subspace(A, "mu_op", tol))
    raise ValueError(f"which must be 'mu', 'mu_op' or 'joint', got {which!r}")


def flip_involution(A: Algebra) -> Callable[[np.ndarray], np.ndarray]:
    return lambda X: flip_coeffs(A, X)


@lru_cache(maxsize=64)
def joint_plus(A: Algebra, tol: TolerancePolicy = DEFAULT_TOL) -> Subspace:
    return involution_eigenspace(kernel_subspace(A, "joint", tol), flip_involution(A), +1)


@lru_cache(maxsize=64)
def joint_minus(A: Algebra, tol: TolerancePolicy = DEFAULT_TOL) -> Subspace:
    return involution_eigenspace(kernel_subspace(A, "joint", tol), flip_involution(A), -1)


# ---- projection streams and saturation -------------------------------------------


def proper_subsets(k: int) -> list[tuple[int, ...]]:
    """All subsets S with ``0 < |S| < k``, by size then lexicographically."""
    return [S for r in range(1, k) for S in itertools.combinations(range(k), r)]


@dataclass(frozen=True)
class ProjectionFamily:
    """A reproducible stream of projections.

    The stream is: subset supports ``1_S``; diagonal 0/1 projections living on
    a single factor; one Haar-conjugated projection for every rank vector; then
    Haar-conjugated projections of uniformly random rank, forever.
    """

    seed: int = 0
    batch_size: int = 8
    stall_limit: int = 25
    hard_cap: int = 5000
    core: bool = True

    def core_projections(self, A: Algebra) -> list[Projection]:
        out = [subset_support(A, S) for S in proper_subsets(A.k)] if A.k <= 12 else []
        for i, n in enumerate(A.dims):
            if 2 <= n <= 10:
                for bits in itertools.product((0.0, 1.0), repeat=n):
                    if 0 < sum(bits) < n:
                        out.append(Projection.of(factor_element(A, i, np.diag(bits))))
        return out

    def stream(self, A: Algebra) -> Iterator[Projection]:
        if self.core:
            yield from self.core_projections(A)
        rng = np.random.default_rng(self.seed)
        all_ranks = itertools.product(*(range(n + 1) for n in A.dims))
        for ranks in all_ranks:
            yield random_projection(A, ranks, rng)
        while True:
            ranks = [int(rng.integers(0, n + 1)) for n in A.dims]
            yield random_projection(A, ranks, rng)


@dataclass(frozen=True)
class SaturationResult:
    subspace: Subspace
    projections_used: int
    stalled: bool
    seeds: tuple[int, ...]
    core_dim: int = 0
    history: tuple[int, ...] = field(default=(), repr=False)

    @property
    def dim(self) -> int:
        return self.subspace.dim


def saturate_stream(
    A: Algebra,
    items: Iterator[Any],
    vector_fn: Callable[[Any], np.ndarray],
    tol: TolerancePolicy = DEFAULT_TOL,
    batch_size: int = 8,
    stall_limit: int = 25,
    hard_cap: int = 5000,
    seeds: tuple[int, ...] = (),
    core_dim: int = 0,
) -> SaturationResult:
    """Grow the span of ``vector_fn(item)`` over ``items`` until it stalls.

    ``vector_fn`` returns coefficient arrays.  Each batch is orthogonalized
    against the current frame (twice) and the residuals rank-revealed with a
    cutoff relative to the batch's largest input norm.  Growth stops after
    ``stall_limit`` consecutive batches add nothing; running out of items or
    hitting ``hard_cap`` first leaves ``stalled`` false.
    """
    Q = np.zeros((A.d2, 0), dtype=complex)
    band = False
    used = 0
    stalls = 0
    history = []
    stalled = False
    while used < hard_cap:
        batch = list(itertools.islice(items, min(batch_size, hard_cap - used)))
        if not batch:
            break
        used += len(batch)
        Y = np.array([A.scale * vector_fn(p) for p in batch]).T
        ref = float(np.linalg.norm(Y, axis=0).max())
        if ref > 0:
            for _ in range(2):
                Y = Y - Q @ (Q.conj().T @ Y)
            U, s, _ = np.linalg.svd(Y, full_matrices=False)
            cut = tol.cutoff(ref)
            band |= bool(np.any((s > cut / BAND) & (s < cut * BAND)))
            new = U[:, s > cut]
        else:
            new = Q[:, :0]
        if new.shape[1]:
            Q, _ = np.linalg.qr(np.hstack([Q, new]))
            stalls = 0
        else:
            stalls += 1
        history.append(Q.shape[1])
        if stalls >= stall_limit:
            stalled = True
            break
    return SaturationResult(
        subspace=Subspace(A, Q, tol, band),
        projections_used=used,
        stalled=stalled,
        seeds=seeds,
        core_dim=core_dim,
        history=tuple(history),
    )


def saturate(
    A: Algebra,
    family: ProjectionFamily,
    vector_fn: Callable[[Projection], np.ndarray],
    tol: TolerancePolicy = DEFAULT_TOL,
) -> SaturationResult:
    """:func:`saturate_stream` over ``family.stream``.

    ``core_dim`` records the dimension reached by the core projections alone.
    """
    core_dim = 0
    if family.core:
        core = family.core_projections(A)
        if core:
            core_dim = span(A, np.array([vector_fn(p) for p in core]), tol).dim
    return saturate_stream(
        A, family.stream(A), vector_fn, tol,
        batch_size=family.batch_size, stall_limit=family.stall_limit, hard_cap=family.hard_cap,
        seeds=(family.seed,), core_dim=core_dim,
    )


def inq_span(
    A: Algebra,
    family: ProjectionFamily | None = None,
    tol: TolerancePolicy = DEFAULT_TOL,
    symmetric: bool = False,
) -> SaturationResult:
    """Saturated span of all ``m_p`` (or of ``m_p + flip(m_p)`` when ``symmetric``)."""
    family = family or ProjectionFamily()
    one = unit(A)

    def vec(p: Projection) -> np.ndarray:
        t = tensor(p, one - p).coeffs
        return t + flip_coeffs(A, t) if symmetric else t

    return saturate(A, family, vec, tol)


# ---- blocks and special elements -------------------------------------------------


def traceless_basis(n: int) -> list[np.ndarray]:
    """Basis of ``sl_n``: off-diagonal units and ``E_aa - E_{a+1,a+1}``."""
    out = []
    for a in range(n):
        for b in range(n):
            if a != b:
                m = np.zeros((n, n))
                m[a, b] = 1.0
                out.append(m)
    for a in range(n - 1):
        m = np.zeros((n, n))
        m[a, a], m[a + 1, a + 1] = 1.0, -1.0
        out.append(m)
    return out


def _factor_basis(n: int, traceless: bool) -> list[np.ndarray]:
    if traceless:
        return traceless_basis(n)
    out = []
    for a in range(n):
        for b in range(n):
            m = np.zeros((n, n))
            m[a, b] = 1.0
            out.append(m)
    return out


def block_subspace(
    A: Algebra,
    i: int,
    j: int,
    traceless: bool = False,
    part: str = "full",
    tol: TolerancePolicy = DEFAULT_TOL,
) -> Subspace:
    """The embedded ``A_i (x) A_j`` (or ``g_i (x) g_j``) and its flip-symmetric parts.

    For ``part`` in ``{"sym", "antisym"}`` and ``i != j`` this is the
    (anti)symmetric part of ``V (x) W + W (x) V``; for ``i == j`` the
    (anti)symmetric part of ``V (x) V``.
    """
    A.check_factor(i)
    A.check_factor(j)
    if part not in ("full", "sym", "antisym"):
        raise ValueError(f"part must be 'full', 'sym' or 'antisym', got {part!r}")
    bi = [factor_element(A, i, m) for m in _factor_basis(A.dims[i], traceless)]
    bj = [factor_element(A, j, m) for m in _factor_basis(A.dims[j], traceless)]
    rows = np.array([tensor(x, y).coeffs for x in bi for y in bj]) if bi and bj else np.zeros((0, A.d2))
    if part == "full":
        return span(A, rows, tol)
    sign = 1 if part == "sym" else -1
    return span(A, rows + sign * flip_coeffs(A, rows), tol)


def sym_unit(A: Algebra, S: Iterable[int], T: Iterable[int], sign: int = 1) -> Tensor:
    """``1_S (x) 1_T + sign * 1_T (x) 1_S``."""
    s, t = subset_support(A, S), subset_support(A, T)
    return tensor(s, t) + sign * tensor(t, s)


def io_element(A: Algebra, i: int, j: int) -> Tensor:
    """Signed sum of ``1^+_{S|S^c}``: plus when S contains exactly one of i, j."""
    A.check_factor(i)
    A.check_factor(j)
    if i == j:
        raise ValueError("io_element needs two distinct factors")
    if A.k > 20:
        raise ValueError("io_element sums over 2^k subsets; at most 20 factors supported")
    everything = frozenset(range(A.k))
    acc = np.zeros(A.d2, dtype=complex)
    for r in range(A.k + 1):
        for S in itertools.combinations(range(A.k), r):
            S = frozenset(S)
            sgn = 1.0 if len(S & {i, j}) == 1 else -1.0
            acc += sgn * sym_unit(A, S, everything - S, +1).coeffs
    return Tensor(A, acc)


def delta_ps(A: Algebra, S: Iterable[int], p: Element) -> Tensor:
    """``p_S (x) 1_{S^c} - 1_{S^c} (x) (1_S - p_S)`` for ``p`` supported in ``S``."""
    S = _subset(A, S)
    p = Projection.of(p)
    for k, b in enumerate(p.blocks):
        if k not in S and np.linalg.norm(b) > PROJECTION_ATOL:
            raise ValueError(f"projection has support on factor {k} outside S")
    one_s = subset_support(A, S)
    one_c = subset_support(A, set(range(A.k)) - S)
    return tensor(p, one_c) - tensor(one_c, one_s - p)
