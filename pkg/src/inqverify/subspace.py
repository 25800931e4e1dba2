"""Tolerance-aware subspace arithmetic in A (x) A under the tau inner product.

Every subspace keeps an orthonormal frame in *isometric* coordinates
(coefficients multiplied by ``Algebra.scale``), where the tau inner product is
the Euclidean one.  Rank decisions are SVD cutoffs ``max(rel * s_max, abs)``;
a singular value within a factor 10 of the cutoff marks the result
inconclusive instead of being silently rounded either way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .algebra import Algebra, Tensor

__all__ = [
    "TolerancePolicy",
    "DEFAULT_TOL",
    "Subspace",
    "Relation",
    "NotInvariantError",
    "span",
    "span_scaled",
    "subspace_sum",
    "intersect",
    "relate",
    "involution_eigenspace",
    "project",
    "membership_residual",
    "is_member",
    "rank_revealing",
]

BAND = 10.0


@dataclass(frozen=True)
class TolerancePolicy:
    rel: float = 1e-9
    abs: float = 1e-12
    angle: float = 1e-7

    def __post_init__(self) -> None:
        if min(self.rel, self.abs, self.angle) <= 0:
            raise ValueError("tolerances must be positive")
        if self.rel >= 1e-3:
            raise ValueError("relative cutoff must be below 1e-3")

    def cutoff(self, smax: float) -> float:
        return max(self.rel * smax, self.abs)

    def as_dict(self) -> dict[str, float]:
        return {"rel": self.rel, "abs": self.abs, "angle": self.angle}


DEFAULT_TOL = TolerancePolicy()


def rank_revealing(Y: np.ndarray, tol: TolerancePolicy, smax: float | None = None) -> tuple[np.ndarray, bool]:
    """Orthonormal basis for the column space of ``Y`` and an inconclusive flag.

    ``smax`` overrides the reference scale for the relative cutoff (used when
    ``Y`` holds residuals of vectors whose own size sets the scale).
    """
    if Y.shape[1] == 0:
        return np.zeros((Y.shape[0], 0), dtype=complex), False
    U, s, _ = np.linalg.svd(Y, full_matrices=False)
    ref = s[0] if smax is None else smax
    cut = tol.cutoff(ref)
    keep = s > cut
    band = bool(np.any((s > cut / BAND) & (s < cut * BAND)))
    return U[:, keep], band


@dataclass(frozen=True, eq=False)
class Subspace:
    """A linear subspace of A (x) A with an isometric orthonormal frame."""

    algebra: Algebra
    frame: np.ndarray = field(repr=False)
    tol: TolerancePolicy = DEFAULT_TOL
    inconclusive: bool = False

    def __post_init__(self) -> None:
        F = np.array(self.frame, dtype=complex)
        if F.ndim != 2 or F.shape[0] != self.algebra.d2:
            raise ValueError(f"frame must have shape ({self.algebra.d2}, r), got {F.shape}")
        F.setflags(write=False)
        object.__setattr__(self, "frame", F)

    @property
    def dim(self) -> int:
        return self.frame.shape[1]

    @property
    def basis(self) -> list[Tensor]:
        """tau-orthonormal basis as coefficient Tensors."""
        return [Tensor(self.algebra, self.frame[:, r] / self.algebra.scale) for r in range(self.dim)]

    def coefficient_basis(self) -> np.ndarray:
        """Basis coefficient arrays as rows, shape ``(dim, d2)``."""
        return (self.frame / self.algebra.scale[:, None]).T

    def projector(self) -> np.ndarray:
        """Orthogonal projector in isometric coordinates."""
        return self.frame @ self.frame.conj().T

    def gram(self) -> np.ndarray:
        return self.frame.conj().T @ self.frame

    def __add__(self, other: Subspace) -> Subspace:
        return subspace_sum(self, other)

    def __and__(self, other: Subspace) -> Subspace:
        return intersect(self, other)

    def __repr__(self) -> str:
        flag = ", inconclusive" if self.inconclusive else ""
        return f"Subspace(dim={self.dim} in {self.algebra.d2}{flag})"


def _rows(A: Algebra, vectors: Iterable[Tensor] | np.ndarray) -> np.ndarray:
    if isinstance(vectors, np.ndarray):
        X = np.atleast_2d(vectors)
        if X.size == 0:
            return np.zeros((0, A.d2), dtype=complex)
        if X.shape[1] != A.d2:
            raise ValueError(f"coefficient rows must have length {A.d2}")
        return X
    vecs = list(vectors)
    for v in vecs:
        if v.algebra != A:
            raise ValueError(f"vector of {v.algebra} does not conform to {A}")
    if not vecs:
        return np.zeros((0, A.d2), dtype=complex)
    return np.array([v.coeffs for v in vecs])


def span(A: Algebra, vectors: Iterable[Tensor] | np.ndarray, tol: TolerancePolicy = DEFAULT_TOL) -> Subspace:
    """Span of Tensors (or coefficient rows) by rank-revealing SVD."""
    X = _rows(A, vectors)
    return span_scaled(A, (X * A.scale).T, tol)


def span_scaled(A: Algebra, Y: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL, inconclusive: bool = False) -> Subspace:
    """Span of the columns of ``Y`` given in isometric coordinates."""
    Q, band = rank_revealing(Y, tol)
    return Subspace(A, Q, tol, inconclusive or band)


def _compatible(U: Subspace, W: Subspace) -> None:
    if U.algebra != W.algebra:
        raise ValueError("subspaces live in different ambient algebras")
    if U.tol != W.tol:
        raise ValueError("subspaces were built under different tolerance policies")


def subspace_sum(U: Subspace, W: Subspace) -> Subspace:
    _compatible(U, W)
    return span_scaled(U.algebra, np.hstack([U.frame, W.frame]), U.tol, U.inconclusive or W.inconclusive)


def _leak(U: Subspace, W: Subspace) -> np.ndarray:
    """Component of U's frame orthogonal to W, ``(I - P_W) Q_U``."""
    return U.frame - W.frame @ (W.frame.conj().T @ U.frame)


def intersect(U: Subspace, W: Subspace) -> Subspace:
    """``U cap W`` as the null space of ``(I - P_W)`` restricted to U.

    The singular values of the restricted complement projector are the sines
    of the principal angles, so the cutoff is relative to 1.
    """
    _compatible(U, W)
    tol = U.tol
    flag = U.inconclusive or W.inconclusive
    if U.dim == 0 or W.dim == 0:
        return Subspace(U.algebra, np.zeros((U.algebra.d2, 0)), tol, flag)
    M = _leak(U, W)
    _, s, Vh = np.linalg.svd(M, full_matrices=True)
    s_full = np.zeros(U.dim)
    s_full[: s.size] = s
    cut = tol.cutoff(1.0)
    null = s_full <= cut
    band = bool(np.any((s_full > cut / BAND) & (s_full < cut * BAND)))
    frame = U.frame @ Vh.conj().T[:, null]
    # re-orthonormalize against rounding in the product
    Q, _ = np.linalg.qr(frame)
    return Subspace(U.algebra, Q, tol, flag or band)


@dataclass(frozen=True)
class Relation:
    dim_u: int
    dim_w: int
    angle_uw: float
    angle_wu: float
    verdict: str

    def as_dict(self) -> dict:
        return {
            "dim_u": self.dim_u,
            "dim_w": self.dim_w,
            "angle_uw": self.angle_uw,
            "angle_wu": self.angle_wu,
            "verdict": self.verdict,
        }


def _max_angle(U: Subspace, W: Subspace) -> float:
    """Largest angle between a vector of U and the subspace W."""
    if U.dim == 0:
        return 0.0
    if W.dim == 0:
        return math.pi / 2
    sin = np.linalg.norm(_leak(U, W), 2)
    return float(math.asin(min(1.0, sin)))


def relate(U: Subspace, W: Subspace) -> Relation:
    """Compare two subspaces: ``equal``, ``U⊂W``, ``W⊂U`` or ``incomparable``."""
    _compatible(U, W)
    a_uw, a_wu = _max_angle(U, W), _max_angle(W, U)
    thr = U.tol.angle
    in_w, in_u = a_uw < thr, a_wu < thr
    if in_w and in_u and U.dim == W.dim:
        verdict = "equal"
    elif in_w and U.dim <= W.dim:
        verdict = "U⊂W"
    elif in_u and W.dim <= U.dim:
        verdict = "W⊂U"
    else:
        verdict = "incomparable"
    return Relation(U.dim, W.dim, a_uw, a_wu, verdict)


class NotInvariantError(ValueError):
    def __init__(self, leakage: float):
        super().__init__(f"subspace is not invariant under the involution (leakage angle {leakage:.3e})")
        self.leakage = leakage


def involution_eigenspace(U: Subspace, J: Callable[[np.ndarray], np.ndarray], sign: int) -> Subspace:
    """``{u in U : J u = sign * u}`` for a linear involution ``J``.

    ``J`` acts on coefficient arrays with a leading batch axis, e.g.
    ``lambda X: flip_coeffs(A, X)``.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    A = U.algebra
    if U.dim == 0:
        return U
    coeff_rows = U.coefficient_basis()
    JQ = (np.asarray(J(coeff_rows)) * A.scale).T
    leak = JQ - U.frame @ (U.frame.conj().T @ JQ)
    leakage = float(math.asin(min(1.0, np.linalg.norm(leak, 2))))
    if leakage >= U.tol.angle:
        raise NotInvariantError(leakage)
    Y = 0.5 * (U.frame + sign * JQ)
    Q, band = rank_revealing(Y, U.tol, smax=1.0)
    return Subspace(A, Q, U.tol, U.inconclusive or band)


def project(U: Subspace, t: Tensor) -> Tensor:
    """Orthogonal projection of ``t`` onto U under the tau inner product."""
    A = U.algebra
    if t.algebra != A:
        raise ValueError("tensor does not conform to the subspace's algebra")
    y = A.scale * t.coeffs
    return Tensor(A, (U.frame @ (U.frame.conj().T @ y)) / A.scale)


def membership_residual(U: Subspace, t: Tensor) -> float:
    """``||t - P_U t|| / ||t||`` in the tau norm (0 for the zero tensor)."""
    A = U.algebra
    y = A.scale * t.coeffs
    nrm = np.linalg.norm(y)
    if nrm == 0:
        return 0.0
    r = y - U.frame @ (U.frame.conj().T @ y)
    return float(np.linalg.norm(r) / nrm)


def is_member(U: Subspace, t: Tensor) -> bool:
    return membership_residual(U, t) < U.tol.angle


def frames_orthogonal(subspaces: Sequence[Subspace]) -> float:
    """Largest absolute tau inner product between frames of distinct subspaces."""
    worst = 0.0
    for a in range(len(subspaces)):
        for b in range(a + 1, len(subspaces)):
            if subspaces[a].dim and subspaces[b].dim:
                g = subspaces[a].frame.conj().T @ subspaces[b].frame
                worst = max(worst, float(np.abs(g).max()))
    return worst
