import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from inqverify.algebra import Tensor, flip_coeffs, make_algebra
from inqverify.qrel import kernel_subspace
from inqverify.subspace import (
    NotInvariantError,
    Subspace,
    TolerancePolicy,
    intersect,
    involution_eigenspace,
    is_member,
    membership_residual,
    project,
    rank_revealing,
    relate,
    span,
    subspace_sum,
)

A2 = make_algebra([2])
A12 = make_algebra([1, 2], [0.3, 0.7])


def rows(A, rng, r):
    return rng.standard_normal((r, A.d2)) + 1j * rng.standard_normal((r, A.d2))


def random_subspace(A, rng, r):
    return span(A, rows(A, rng, r))


def unit_row(A, k):
    v = np.zeros(A.d2)
    v[k] = 1
    return v


class TestTolerancePolicy:
    def test_defaults(self):
        t = TolerancePolicy()
        assert (t.rel, t.abs, t.angle) == (1e-9, 1e-12, 1e-7)
        assert t.cutoff(1.0) == 1e-9 and t.cutoff(1e-6) == 1e-12

    @pytest.mark.parametrize("kw", [{"rel": 0}, {"abs": -1}, {"angle": 0}, {"rel": 1e-3}])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            TolerancePolicy(**kw)


class TestSpan:
    def test_dependent_vectors(self):
        rng = np.random.default_rng(0)
        X = rows(A2, rng, 2)
        assert span(A2, np.vstack([X, X[0] + X[1]])).dim == 2

    def test_empty(self):
        assert span(A2, []).dim == 0
        assert span(A2, np.zeros((0, A2.d2))).dim == 0

    def test_tiny_difference_collapses(self):
        v = unit_row(A2, 3)
        w = v.copy()
        w[5] = 1e-15
        U = span(A2, np.vstack([v, w]))
        assert U.dim == 1 and not U.inconclusive

    def test_band_flags_inconclusive(self):
        v = unit_row(A2, 3)
        w = v.copy()
        w[5] = 3e-9
        assert span(A2, np.vstack([v, w])).inconclusive

    def test_accepts_tensors_and_checks_ambient(self):
        t = Tensor(A2, unit_row(A2, 0))
        assert span(A2, [t]).dim == 1
        with pytest.raises(ValueError):
            span(A12, [t])

    @given(st.integers(0, 2**32 - 1), st.integers(1, 6))
    def test_orthonormal_and_projector(self, seed, r):
        U = random_subspace(A12, np.random.default_rng(seed), r)
        assert np.abs(U.gram() - np.eye(U.dim)).max() < 1e-10
        P = U.projector()
        assert np.abs(P @ P - P).max() < 1e-9 and np.abs(P.conj().T - P).max() < 1e-9

    @given(st.integers(0, 2**32 - 1))
    def test_order_insensitive(self, seed):
        rng = np.random.default_rng(seed)
        X = rows(A12, rng, 5)
        assert relate(span(A12, X), span(A12, X[rng.permutation(5)])).verdict == "equal"

    def test_basis_is_tau_orthonormal(self):
        from inqverify.algebra import inner

        U = random_subspace(A12, np.random.default_rng(1), 3)
        G = np.array([[inner(A12, x, y) for y in U.basis] for x in U.basis])
        assert np.abs(G - np.eye(3)).max() < 1e-10

    def test_rank_revealing_empty(self):
        Q, band = rank_revealing(np.zeros((4, 0)), TolerancePolicy())
        assert Q.shape == (4, 0) and not band


class TestSumIntersect:
    def test_generic_planes_in_three_space(self):
        rng = np.random.default_rng(2)
        E = np.eye(A2.d2)[:3]
        P1 = span(A2, rng.standard_normal((2, 3)) @ E)
        P2 = span(A2, rng.standard_normal((2, 3)) @ E)
        assert intersect(P1, P2).dim == 1
        assert subspace_sum(P1, P2).dim == 3

    def test_idempotent(self):
        U = random_subspace(A2, np.random.default_rng(3), 4)
        assert relate(intersect(U, U), U).verdict == "equal"
        assert relate(U & U, U + U).verdict == "equal"

    def test_orthogonal_lines(self):
        L1, L2 = span(A2, unit_row(A2, 0)[None]), span(A2, unit_row(A2, 1)[None])
        assert intersect(L1, L2).dim == 0 and (L1 + L2).dim == 2

    @given(st.integers(0, 2**32 - 1), st.integers(0, 5), st.integers(0, 5), st.integers(0, 4))
    def test_modular_law(self, seed, a, b, c):
        rng = np.random.default_rng(seed)
        common = rows(A12, rng, c)
        U = span(A12, np.vstack([common, rows(A12, rng, a)]))
        W = span(A12, np.vstack([common, rows(A12, rng, b)]))
        assert U.dim + W.dim == (U + W).dim + (U & W).dim
        assert (U & W).dim == c

    def test_ambient_mismatch(self):
        with pytest.raises(ValueError):
            intersect(span(A2, []), span(A12, []))
        with pytest.raises(ValueError):
            subspace_sum(span(A2, [], TolerancePolicy()), span(A2, [], TolerancePolicy(rel=1e-8)))


class TestRelate:
    def test_verdicts(self):
        rng = np.random.default_rng(4)
        U = random_subspace(A2, rng, 3)
        assert relate(U, U).verdict == "equal"
        line = span(A2, U.coefficient_basis()[:1])
        r = relate(line, U)
        assert r.verdict == "U⊂W" and r.angle_uw < 1e-7
        assert relate(U, line).verdict == "W⊂U"
        assert relate(random_subspace(A2, rng, 1), random_subspace(A2, rng, 1)).verdict == "incomparable"

    def test_transitive(self):
        rng = np.random.default_rng(5)
        X = rows(A12, rng, 5)
        U, V, W = span(A12, X[:1]), span(A12, X[:3]), span(A12, X)
        assert relate(U, V).verdict == "U⊂W" and relate(V, W).verdict == "U⊂W"
        assert relate(U, W).verdict == "U⊂W"

    def test_as_dict(self):
        U = random_subspace(A2, np.random.default_rng(6), 2)
        d = relate(U, U).as_dict()
        assert d["verdict"] == "equal" and d["dim_u"] == d["dim_w"] == 2

    def test_empty_subspaces(self):
        E = span(A2, [])
        assert relate(E, E).verdict == "equal"
        assert relate(E, random_subspace(A2, np.random.default_rng(7), 1)).verdict == "U⊂W"


class TestInvolution:
    def flip(self, A):
        return lambda X: flip_coeffs(A, X)

    def test_flip_on_whole_space(self):
        full = span(A2, np.eye(A2.d2))
        assert involution_eigenspace(full, self.flip(A2), 1).dim == 10
        assert involution_eigenspace(full, self.flip(A2), -1).dim == 6

    def test_flip_on_joint_kernel(self):
        J = kernel_subspace(A2, "joint")
        plus = involution_eigenspace(J, self.flip(A2), 1)
        minus = involution_eigenspace(J, self.flip(A2), -1)
        assert (plus.dim, minus.dim) == (6, 3)
        assert np.abs(plus.frame.conj().T @ minus.frame).max() < 1e-10
        assert relate(plus + minus, J).verdict == "equal"

    @pytest.mark.parametrize("sign", [1, -1])
    def test_eigen_residual(self, sign):
        A = make_algebra([1, 2])
        J = kernel_subspace(A, "joint")
        E = involution_eigenspace(J, self.flip(A), sign)
        X = E.coefficient_basis()
        assert np.abs(flip_coeffs(A, X) - sign * X).max() < 1e-9

    def test_not_invariant(self):
        U = span(A2, unit_row(A2, 1)[None])
        with pytest.raises(NotInvariantError) as exc:
            involution_eigenspace(U, self.flip(A2), 1)
        assert exc.value.leakage > 1

    def test_bad_sign(self):
        with pytest.raises(ValueError):
            involution_eigenspace(span(A2, []), self.flip(A2), 0)


class TestProject:
    def test_basis_fixed_and_orthogonal_killed(self):
        U = span(A2, np.eye(A2.d2)[:3])
        for b in U.basis:
            assert project(U, b).allclose(b, atol=1e-12)
        v = Tensor(A2, unit_row(A2, 7))
        assert project(U, v).is_zero()
        assert membership_residual(U, v) == pytest.approx(1.0)
        assert membership_residual(U, Tensor(A2, np.zeros(A2.d2))) == 0.0
        assert is_member(U, U.basis[0]) and not is_member(U, v)

    @given(st.integers(0, 2**32 - 1))
    def test_contractive(self, seed):
        from inqverify.algebra import norm

        rng = np.random.default_rng(seed)
        U = random_subspace(A12, rng, 3)
        t = Tensor(A12, rows(A12, rng, 1)[0])
        assert norm(A12, project(U, t)) <= norm(A12, t) * (1 + 1e-12)

    def test_frame_shape_checked(self):
        with pytest.raises(ValueError):
            Subspace(A2, np.zeros((5, 1)))
        U = random_subspace(A2, np.random.default_rng(8), 1)
        with pytest.raises(ValueError):
            U.frame[0, 0] = 1
        assert "dim=1" in repr(U)
        assert not math.isnan(relate(U, U).angle_uw)
