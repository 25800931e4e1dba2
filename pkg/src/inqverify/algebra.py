"""Finite multi-matrix algebras, their elements, and the tensor square A (x) A.

Elements are tuples of square blocks, one per factor.  Tensors are stored as a
single flat coefficient vector over the matrix-unit basis
``E^{(i)}_{ab} (x) E^{(j)}_{cd}``: blocks in lexicographic ``(i, j)`` order,
and inside a block lexicographic ``(a, b, c, d)``, all zero-based.  That
ordering is the serialization order used everywhere else in the package.

Most kernels here act on coefficient arrays with an arbitrary leading batch
shape, so the matrix of a linear map is obtained by feeding it the identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

__all__ = [
    "Algebra",
    "Element",
    "Tensor",
    "make_algebra",
    "unit",
    "zero",
    "matrix_unit",
    "factor_element",
    "trace",
    "inner",
    "norm",
    "tensor",
    "mu",
    "mu_op",
    "flip",
    "env_mul",
    "partial_trace",
    "vectorize",
    "devectorize",
    "mu_matrix",
    "mu_op_matrix",
]


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Algebra:
    """The product ``M_{n_1} x ... x M_{n_k}`` with trace ``sum_i alpha_i tau_i``.

    Use :func:`make_algebra` to build one; it validates and normalizes.
    """

    dims: tuple[int, ...]
    weights: tuple[float, ...]

    @property
    def k(self) -> int:
        return len(self.dims)

    @property
    def d1(self) -> int:
        """Dimension of A."""
        return sum(n * n for n in self.dims)

    @property
    def d2(self) -> int:
        """Dimension of A (x) A."""
        return self.d1**2

    @cached_property
    def elem_offsets(self) -> tuple[int, ...]:
        offs = [0]
        for n in self.dims:
            offs.append(offs[-1] + n * n)
        return tuple(offs)

    @cached_property
    def block_pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((i, j) for i in range(self.k) for j in range(self.k))

    @cached_property
    def block_slices(self) -> dict[tuple[int, int], slice]:
        out, start = {}, 0
        for i, j in self.block_pairs:
            size = self.dims[i] ** 2 * self.dims[j] ** 2
            out[(i, j)] = slice(start, start + size)
            start += size
        return out

    @cached_property
    def unit_norms(self) -> np.ndarray:
        """Squared tau-norm ``alpha_i / n_i`` of each matrix unit of factor i."""
        return np.array([a / n for a, n in zip(self.weights, self.dims)])

    @cached_property
    def scale(self) -> np.ndarray:
        """Per-coordinate factor turning tensor coefficients into isometric ones.

        ``<x|y>_tau`` equals the Euclidean product of ``scale * x`` and ``scale * y``.
        """
        s = np.empty(self.d2)
        w = self.unit_norms
        for (i, j), sl in self.block_slices.items():
            s[sl] = math.sqrt(w[i] * w[j])
        return _readonly(s)

    @cached_property
    def elem_scale(self) -> np.ndarray:
        s = np.empty(self.d1)
        for i, n in enumerate(self.dims):
            s[self.elem_offsets[i] : self.elem_offsets[i + 1]] = math.sqrt(self.unit_norms[i])
        return _readonly(s)

    @cached_property
    def flip_perm(self) -> np.ndarray:
        """Index array with ``flip(t)[q] == t[flip_perm[q]]``."""
        perm = np.empty(self.d2, dtype=np.intp)
        for (i, j), sl in self.block_slices.items():
            ni, nj = self.dims[i], self.dims[j]
            src = np.arange(sl.start, sl.stop).reshape(ni, ni, nj, nj)
            dst_sl = self.block_slices[(j, i)]
            perm[dst_sl] = src.transpose(2, 3, 0, 1).ravel()
        return _readonly(perm)

    @cached_property
    def kron_perm(self) -> np.ndarray:
        """Canonical index of each entry of ``np.kron(vec(a), vec(b))``."""
        d1 = self.d1
        perm = np.empty(self.d2, dtype=np.intp)
        for (i, j), sl in self.block_slices.items():
            ni, nj = self.dims[i], self.dims[j]
            rows = self.elem_offsets[i] + np.arange(ni * ni)
            cols = self.elem_offsets[j] + np.arange(nj * nj)
            kron_idx = (rows[:, None] * d1 + cols[None, :]).ravel()
            perm[kron_idx] = np.arange(sl.start, sl.stop)
        return _readonly(perm)

    def check_factor(self, i: int) -> None:
        if not 0 <= i < self.k:
            raise IndexError(f"factor index {i} out of range for {self.k} factors")

    def __repr__(self) -> str:
        w = ", ".join(f"{a:g}" for a in self.weights)
        return f"Algebra(dims={self.dims}, weights=({w}))"


def make_algebra(dims: Iterable[int], weights: Iterable[float] | None = None) -> Algebra:
    """Build ``prod_i M_{n_i}`` with tracial-state weights (uniform by default).

    Raises
    ------
    ValueError
        Empty factor list, non-positive sizes or weights, wrong weight count, or
        weights whose sum is off 1 by more than 1e-9.
    """
    dims = tuple(int(n) for n in dims)
    if not dims:
        raise ValueError("empty factor list")
    if any(n < 1 for n in dims):
        raise ValueError(f"factor sizes must be positive, got {dims}")
    if weights is None:
        w = np.full(len(dims), 1.0 / len(dims))
    else:
        w = np.asarray(list(weights), dtype=float)
        if w.shape != (len(dims),):
            raise ValueError(f"expected {len(dims)} weights, got {w.size}")
        if np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be positive")
        if abs(w.sum() - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1 (sum is {w.sum():.12g})")
        w = w / w.sum()
    return Algebra(dims, tuple(float(a) for a in w))


@dataclass(frozen=True, eq=False)
class Element:
    algebra: Algebra
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        A = self.algebra
        if len(self.blocks) != A.k:
            raise ValueError(f"expected {A.k} blocks, got {len(self.blocks)}")
        blocks = []
        for b, n in zip(self.blocks, A.dims):
            b = np.array(b, dtype=complex)
            if b.shape != (n, n):
                raise ValueError(f"block shape {b.shape} does not match factor size {n}")
            blocks.append(_readonly(b))
        object.__setattr__(self, "blocks", tuple(blocks))

    @classmethod
    def from_vec(cls, A: Algebra, vec: np.ndarray) -> Element:
        vec = np.asarray(vec)
        if vec.shape != (A.d1,):
            raise ValueError(f"element vector must have length {A.d1}")
        return cls(A, tuple(vec[A.elem_offsets[i] : A.elem_offsets[i + 1]].reshape(n, n)
                            for i, n in enumerate(A.dims)))

    @property
    def vec(self) -> np.ndarray:
        return np.concatenate([b.ravel() for b in self.blocks])

    def adjoint(self) -> Element:
        return Element(self.algebra, tuple(b.conj().T for b in self.blocks))

    def _check(self, other: Element) -> None:
        if other.algebra != self.algebra:
            raise ValueError("elements belong to different algebras")

    def __add__(self, other: Element) -> Element:
        self._check(other)
        return Element(self.algebra, tuple(x + y for x, y in zip(self.blocks, other.blocks)))

    def __sub__(self, other: Element) -> Element:
        self._check(other)
        return Element(self.algebra, tuple(x - y for x, y in zip(self.blocks, other.blocks)))

    def __neg__(self) -> Element:
        return Element(self.algebra, tuple(-x for x in self.blocks))

    def __mul__(self, c: complex) -> Element:
        return Element(self.algebra, tuple(c * x for x in self.blocks))

    __rmul__ = __mul__

    def __matmul__(self, other: Element) -> Element:
        self._check(other)
        return Element(self.algebra, tuple(x @ y for x, y in zip(self.blocks, other.blocks)))

    def allclose(self, other: Element, atol: float = 1e-12) -> bool:
        self._check(other)
        return all(np.allclose(x, y, rtol=0, atol=atol) for x, y in zip(self.blocks, other.blocks))

    def __repr__(self) -> str:
        return f"Element({self.algebra.dims}, blocks={[b.tolist() for b in self.blocks]})"


def unit(A: Algebra) -> Element:
    return Element(A, tuple(np.eye(n) for n in A.dims))


def zero(A: Algebra) -> Element:
    return Element(A, tuple(np.zeros((n, n)) for n in A.dims))


def factor_element(A: Algebra, i: int, block: np.ndarray) -> Element:
    """The element equal to ``block`` on factor ``i`` and zero elsewhere."""
    A.check_factor(i)
    blocks = [np.zeros((n, n), dtype=complex) for n in A.dims]
    blocks[i] = np.asarray(block, dtype=complex)
    return Element(A, tuple(blocks))


def matrix_unit(A: Algebra, i: int, a: int, b: int) -> Element:
    """``E^{(i)}_{ab}`` with zero-based indices."""
    A.check_factor(i)
    m = np.zeros((A.dims[i], A.dims[i]))
    m[a, b] = 1.0
    return factor_element(A, i, m)


def _check_elem(A: Algebra, x: Element) -> None:
    if x.algebra != A:
        raise ValueError(f"element of {x.algebra} does not conform to {A}")


def trace(A: Algebra, x: Element) -> complex:
    """``tau(x) = sum_i alpha_i tr(x_i) / n_i``."""
    _check_elem(A, x)
    return complex(sum(a * np.trace(b) / n for a, b, n in zip(A.weights, x.blocks, A.dims)))


@dataclass(frozen=True, eq=False)
class Tensor:
    """An element of A (x) A as a flat coefficient vector (see module doc)."""

    algebra: Algebra
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        c = np.array(self.coeffs, dtype=complex)
        if c.shape != (self.algebra.d2,):
            raise ValueError(f"coefficient array must have shape ({self.algebra.d2},), got {c.shape}")
        object.__setattr__(self, "coeffs", _readonly(c))

    @property
    def blocks(self) -> dict[tuple[int, int], np.ndarray]:
        A = self.algebra
        return {
            (i, j): self.coeffs[sl].reshape(A.dims[i], A.dims[i], A.dims[j], A.dims[j])
            for (i, j), sl in A.block_slices.items()
        }

    def _check(self, other: Tensor) -> None:
        if other.algebra != self.algebra:
            raise ValueError("tensors belong to different algebras")

    def __add__(self, other: Tensor) -> Tensor:
        self._check(other)
        return Tensor(self.algebra, self.coeffs + other.coeffs)

    def __sub__(self, other: Tensor) -> Tensor:
        self._check(other)
        return Tensor(self.algebra, self.coeffs - other.coeffs)

    def __neg__(self) -> Tensor:
        return Tensor(self.algebra, -self.coeffs)

    def __mul__(self, c: complex) -> Tensor:
        return Tensor(self.algebra, c * self.coeffs)

    __rmul__ = __mul__

    def adjoint(self) -> Tensor:
        """``(a (x) b)* = a* (x) b*``, the involution of the enveloping algebra."""
        A = self.algebra
        out = np.empty_like(self.coeffs)
        for (i, j), sl in A.block_slices.items():
            ni, nj = A.dims[i], A.dims[j]
            out[sl] = self.coeffs[sl].reshape(ni, ni, nj, nj).transpose(1, 0, 3, 2).conj().ravel()
        return Tensor(A, out)

    def is_zero(self, atol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.coeffs) <= atol))

    def allclose(self, other: Tensor, atol: float = 1e-12) -> bool:
        self._check(other)
        return bool(np.allclose(self.coeffs, other.coeffs, rtol=0, atol=atol))


def _check_tensor(A: Algebra, t: Tensor) -> None:
    if t.algebra != A:
        raise ValueError(f"tensor of {t.algebra} does not conform to {A}")


def vectorize(t: Tensor) -> np.ndarray:
    return t.coeffs.copy()


def devectorize(A: Algebra, array: np.ndarray) -> Tensor:
    array = np.asarray(array)
    if array.shape != (A.d2,):
        raise ValueError(f"expected a coefficient array of length {A.d2}, got shape {array.shape}")
    return Tensor(A, array)


def tensor(a: Element, b: Element) -> Tensor:
    """The simple tensor ``a (x) b``."""
    if a.algebra != b.algebra:
        raise ValueError("tensor factors belong to different algebras")
    A = a.algebra
    out = np.empty(A.d2, dtype=complex)
    out[A.kron_perm] = np.kron(a.vec, b.vec)
    return Tensor(A, out)


def inner(A: Algebra, x: Tensor, y: Tensor) -> complex:
    """``<x|y>_tau``, conjugate-linear in ``x``; ``<a(x)b|c(x)d> = tau(a*c) tau(b*d)``."""
    _check_tensor(A, x)
    _check_tensor(A, y)
    s2 = A.scale**2
    return complex(np.vdot(x.coeffs * s2, y.coeffs))


def norm(A: Algebra, x: Tensor) -> float:
    return float(np.linalg.norm(A.scale * x.coeffs))


# ---- batched coefficient kernels -------------------------------------------------


def _block(A: Algebra, X: np.ndarray, i: int, j: int) -> np.ndarray:
    ni, nj = A.dims[i], A.dims[j]
    return X[..., A.block_slices[(i, j)]].reshape(X.shape[:-1] + (ni, ni, nj, nj))


def mu_coeffs(A: Algebra, X: np.ndarray) -> np.ndarray:
    """Multiplication on coefficient arrays ``(..., d2) -> (..., d1)``."""
    out = np.zeros(X.shape[:-1] + (A.d1,), dtype=complex)
    for i in range(A.k):
        r = np.einsum("...abbd->...ad", _block(A, X, i, i))
        out[..., A.elem_offsets[i] : A.elem_offsets[i + 1]] = r.reshape(X.shape[:-1] + (-1,))
    return out


def mu_op_coeffs(A: Algebra, X: np.ndarray) -> np.ndarray:
    """Opposite multiplication ``a (x) b -> ba`` on coefficient arrays."""
    out = np.zeros(X.shape[:-1] + (A.d1,), dtype=complex)
    for i in range(A.k):
        r = np.einsum("...abca->...cb", _block(A, X, i, i))
        out[..., A.elem_offsets[i] : A.elem_offsets[i + 1]] = r.reshape(X.shape[:-1] + (-1,))
    return out


def flip_coeffs(A: Algebra, X: np.ndarray) -> np.ndarray:
    return X[..., A.flip_perm]


def env_mul_coeffs(A: Algebra, S: np.ndarray, T: np.ndarray) -> np.ndarray:
    """``(a (x) b)(c (x) d) = ac (x) db`` on coefficient arrays (broadcasting)."""
    shape = np.broadcast_shapes(S.shape[:-1], T.shape[:-1])
    out = np.zeros(shape + (A.d2,), dtype=complex)
    for i, j in A.block_pairs:
        r = np.einsum("...abcd,...bfgc->...afgd", _block(A, S, i, j), _block(A, T, i, j))
        out[..., A.block_slices[(i, j)]] = r.reshape(shape + (-1,))
    return out


def mu_matrix(A: Algebra) -> np.ndarray:
    """Matrix of the multiplication map, shape ``(d1, d2)``."""
    return mu_coeffs(A, np.eye(A.d2)).T


def mu_op_matrix(A: Algebra) -> np.ndarray:
    return mu_op_coeffs(A, np.eye(A.d2)).T


# ---- public maps on Tensors ------------------------------------------------------


def mu(A: Algebra, t: Tensor) -> Element:
    """``a (x) b -> ab``; cross-factor blocks contribute nothing."""
    _check_tensor(A, t)
    return Element.from_vec(A, mu_coeffs(A, t.coeffs))


def mu_op(A: Algebra, t: Tensor) -> Element:
    """``a (x) b -> ba``."""
    _check_tensor(A, t)
    return Element.from_vec(A, mu_op_coeffs(A, t.coeffs))


def flip(t: Tensor) -> Tensor:
    return Tensor(t.algebra, flip_coeffs(t.algebra, t.coeffs))


def env_mul(A: Algebra, s: Tensor, t: Tensor) -> Tensor:
    """Product in the enveloping algebra ``A (x) A^op``."""
    _check_tensor(A, s)
    _check_tensor(A, t)
    return Tensor(A, env_mul_coeffs(A, s.coeffs, t.coeffs))


def partial_trace(A: Algebra, t: Tensor, side: str = "right") -> Element:
    """Trace out one leg with the unnormalized trace ``n_j tau_j``.

    ``side="right"`` sends ``a (x) b`` to ``a * tr(b)``; on a single factor
    ``M_n`` this is ``id (x) n tau``.  ``side="left"`` is the mirror image.
    """
    _check_tensor(A, t)
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    out = [np.zeros((n, n), dtype=complex) for n in A.dims]
    for (i, j), blk in t.blocks.items():
        if side == "right":
            out[i] += np.einsum("abcc->ab", blk)
        else:
            out[j] += np.einsum("aacd->cd", blk)
    return Element(A, tuple(out))
