import json

import numpy as np
import pytest

from inqverify.algebra import make_algebra
from inqverify.subspace import TolerancePolicy
from inqverify.verify import (
    CLAIMS,
    CONFIRMED,
    INCONCLUSIVE,
    REFUTED,
    Expectation,
    _Builder,
    closed_form_delta,
    compute_delta,
    derive_seeds,
    joint_kernel_dim,
    run_claim,
    verify_a1j,
    verify_average_and_trace,
    verify_bulk_minus,
    verify_cnst,
    verify_decomposition,
    verify_ideal,
    verify_kernels,
    verify_matrix_span,
    verify_symmetric_span,
)

import oracles

REPORT_KEYS = ["claim", "dims", "weights", "seed", "tol", "measured", "expected", "status", "duration_ms"]


class TestReportPlumbing:
    def builder(self):
        return _Builder("x", make_algebra([2]), 0, TolerancePolicy())

    def test_confirmed_refuted(self):
        b = self.builder()
        b.measure("a", 1)
        b.expect("a", 1, "paper", "c")
        assert b.finish().status == CONFIRMED
        b = self.builder()
        b.measure("a", 1)
        b.expect("a", 2, "paper", "c")
        r = b.finish()
        assert r.status == REFUTED and r.checks == {"a": False}

    def test_flags_take_precedence(self):
        b = self.builder()
        b.measure("a", 1)
        b.expect("a", 2, "paper", "c")
        b.flags.append("band")
        r = b.finish()
        assert r.status == INCONCLUSIVE and r.measured["inconclusive_reasons"] == ["band"]

    def test_expect_needs_measurement(self):
        with pytest.raises(KeyError):
            self.builder().expect("missing", 1, "paper", "c")

    def test_bound_serialization(self):
        e = Expectation("r", 1e-10, "paper", "c", "lt")
        assert e.as_dict()["value"] == {"lt": 1e-10}
        assert e.check(1e-12) and not e.check(1e-9) and not e.check(None)
        assert Expectation("r", 0.0, "paper", "c", "gt").check(0.5)
        with pytest.raises(ValueError):
            Expectation("r", 0, "paper", "c", "ne").check(1)

    def test_schema_and_json(self):
        r = verify_kernels(make_algebra([2]), seed=5)
        d = r.to_dict(timings=False)
        assert list(d) == REPORT_KEYS
        assert d["duration_ms"] is None and r.to_dict()["duration_ms"] >= 0
        assert list(d["tol"]) == ["rel", "abs", "angle"]
        for e in d["expected"]:
            assert list(e) == ["name", "value", "provenance", "citation"]
            assert e["provenance"] in ("paper", "derived-oracle")
            assert e["citation"]
        assert json.loads(r.to_json(timings=False)) == d

    def test_text_mentions_every_expectation(self):
        r = verify_kernels(make_algebra([3]))
        text = r.to_text()
        assert text.startswith("[CONFIRMED] kernels")
        for e in r.expected:
            assert e.name in text

    def test_derived_seeds(self):
        a = derive_seeds(1, "c", (2,), 3)
        assert a == derive_seeds(1, "c", (2,), 3) and len(set(a)) == 3
        assert a != derive_seeds(1, "c", (3,), 3) and a != derive_seeds(2, "c", (2,), 3)
        assert all(0 <= s < 2**64 for s in a)


class TestKernels:
    @pytest.mark.parametrize("dims, joint", [((2,), 9), ((3,), 64), ((1, 1), 2), ((1, 2), 17), ((2, 3), 4 * 9 * 2 + 9 + 64)])
    def test_examples(self, dims, joint):
        r = verify_kernels(make_algebra(dims))
        assert r.status == CONFIRMED and r.measured["dim_joint"] == joint
        assert joint_kernel_dim(dims) == joint == int(oracles.kernel_dims(list(dims))[2])

    def test_m2_kernels(self):
        m = verify_kernels(make_algebra([2])).measured
        assert (m["dim_ker_mu"], m["dim_ker_mu_op"]) == (12, 12)


class TestMatrixSpan:
    def test_trivial_and_two(self):
        r1 = verify_matrix_span(1)
        assert r1.measured["inq_dim"] == r1.measured["dim_joint"] == 0 and r1.status == CONFIRMED
        r2 = verify_matrix_span(2)
        assert r2.measured["inq_dims"] == [9, 9, 9] and r2.measured["verdict"] == "equal"
        assert r2.status == CONFIRMED

    def test_three_reports_both_references(self):
        r = verify_matrix_span(3, seed=7)
        m = r.measured
        assert m["dims_reproducible"] and m["inq_dim"] == 44 == oracles.orthogonality_ceiling(3)
        assert m["dim_joint"] == 64 and m["verdict"] == "U⊂W" and m["sym_verdict"] == "equal"
        names = {e.name: e for e in r.expected}
        assert names["inq_dim"].value == 44 and names["inq_dim"].provenance == "derived-oracle"
        assert names["dim_joint"].value == 64 and names["verdict"].provenance == "paper"
        assert r.status == REFUTED
        assert r.checks["inq_dim"] and not r.checks["verdict"]

    def test_precondition(self):
        with pytest.raises(ValueError):
            verify_matrix_span(7)


class TestSymmetricSpan:
    @pytest.mark.parametrize("dims, dim", [((1, 1), 1), ((2,), 6), ((2, 2), 28)])
    def test_examples(self, dims, dim):
        r = verify_symmetric_span(make_algebra(dims))
        assert r.status == CONFIRMED and r.measured["dim_inq_plus"] == dim

    def test_weight_independent_status(self):
        for w in ([0.2, 0.8], [0.7, 0.3]):
            assert verify_symmetric_span(make_algebra([1, 2], w)).status == CONFIRMED

    def test_precondition(self):
        with pytest.raises(ValueError):
            verify_symmetric_span(make_algebra([2, 2, 2]))


class TestIdeal:
    @pytest.mark.parametrize("dims, side, dim", [((2,), "left", 12), ((1, 1), "left", 2), ((3,), "left", 72), ((1, 2), "right", 20)])
    def test_examples(self, dims, side, dim):
        r = verify_ideal(make_algebra(dims), side)
        assert r.status == CONFIRMED and r.measured["dim_ideal"] == dim

    def test_bad_side_and_size(self):
        with pytest.raises(ValueError):
            verify_ideal(make_algebra([2]), "middle")
        with pytest.raises(ValueError):
            verify_ideal(make_algebra([7]))


class TestDelta:
    def test_m2(self):
        A = make_algebra([2])
        delta, r = compute_delta(A)
        want = np.zeros(16)
        for a in range(2):
            for b in range(2):
                want[oracles.basis_index([2], 0, a, b, 0, b, a)] = 0.5
        assert np.abs(delta.coeffs - want).max() < 1e-12 and r.status == CONFIRMED

    def test_abelian(self):
        A = make_algebra([1, 1])
        delta, r = compute_delta(A)
        assert np.abs(delta.coeffs - np.array([1, 0, 0, 1])).max() < 1e-12 and r.status == CONFIRMED

    @pytest.mark.parametrize("dims", [(1, 2), (2, 2)])
    def test_closed_form_oracle(self, dims):
        A = make_algebra(dims)
        delta, r = compute_delta(A, samples=50)
        assert np.abs(closed_form_delta(A).coeffs - oracles.delta_closed_form(list(dims))).max() == 0
        assert r.measured["closed_form_error"] < 1e-9 and r.status == CONFIRMED


class TestDecomposition:
    @pytest.mark.parametrize(
        "n, sym, anti",
        [(2, [5, 1], [3]), (3, [27, 8, 1], [10, 10, 8]), (4, [84, 20, 15, 1], [45, 45, 15])],
    )
    def test_summands(self, n, sym, anti):
        r = verify_decomposition(n, samples=20)
        assert r.measured["sym_summand_dims"] == sym and r.measured["antisym_summand_dims"] == anti
        assert r.status == CONFIRMED

    def test_antisym_pairings_vanish(self):
        m = verify_decomposition(3, samples=50).measured["highest_weight_vectors"]
        assert m["g^(1^2,2)"]["max_pairing_with_mp"] < 1e-12
        assert m["g^(2)"]["max_pairing_with_mp"] > 1e-3

    def test_precondition(self):
        with pytest.raises(ValueError):
            verify_decomposition(1)


class TestBulkMinus:
    def test_two_two(self):
        r = verify_bulk_minus(make_algebra([2, 2]), samples=200)
        m = r.measured
        assert (m["lhs_dim"], m["rhs_dim"]) == (0, 0) and r.status == CONFIRMED
        assert m["max_orthogonality_residual"] < 1e-10

    def test_abelian(self):
        r = verify_bulk_minus(make_algebra([1, 1]))
        assert r.measured["orthogonality_samples"] == 0 and r.status == CONFIRMED

    def test_three_block_refutes_diagonal_reading(self):
        r = verify_bulk_minus(make_algebra([1, 3]), samples=100)
        m = r.measured
        # bracket sends wedge^2 sl_3 (dim 28) onto sl_3 (dim 8)
        assert m["lhs_dim"] == 0 and m["rhs_dim"] == 20 and r.status == REFUTED

    def test_precondition(self):
        with pytest.raises(ValueError):
            verify_bulk_minus(make_algebra([2]))


class TestConstructive:
    def test_cnst_abelian(self):
        r = verify_cnst(make_algebra([1, 1, 1]))
        assert r.measured["subset_span_dim"] == 3 and r.status == CONFIRMED

    def test_cnst_membership(self):
        r = verify_cnst(make_algebra([2, 3]))
        assert r.measured["max_membership_residual"] < 1e-8 and r.status == CONFIRMED

    def test_cnst_large_skips_membership(self):
        r = verify_cnst(make_algebra([1, 1, 1, 1]))
        assert r.measured["io_offdiag_max"] < 1e-10 and r.status == CONFIRMED

    @pytest.mark.parametrize("dims, i, j", [((2, 2), 0, 1), ((2, 1, 1), 0, 2)])
    def test_a1j(self, dims, i, j):
        r = verify_a1j(make_algebra(dims), i, j)
        assert r.measured["max_membership_residual"] < 1e-8 and r.status == CONFIRMED

    def test_a1j_vacuous(self):
        r = verify_a1j(make_algebra([1, 2]), 0, 1)
        assert r.measured["pairs"] == {"0,1": {"vacuous": True}} and r.status == CONFIRMED

    def test_a1j_errors(self):
        with pytest.raises(ValueError):
            verify_a1j(make_algebra([2, 2]), 1, 1)
        with pytest.raises(ValueError):
            verify_a1j(make_algebra([2]))


class TestAverageTrace:
    def test_n2(self):
        r = verify_average_and_trace(2)
        m = r.measured
        assert m["pairing_at_e11"] == pytest.approx(0.25)
        assert m["sym_image_always_scalar"] and m["antisym_image_nonscalar_somewhere"]
        assert r.status == CONFIRMED

    def test_n3_symmetric_not_scalar(self):
        r = verify_average_and_trace(3)
        assert not r.measured["sym_image_always_scalar"] and r.status == CONFIRMED


class TestRegistry:
    def test_names(self):
        assert list(CLAIMS) == [
            "kernels", "matrix-span", "symmetric-span", "ideal-left", "ideal-right", "delta",
            "decomposition", "bulk-minus", "cnst", "a1j", "average-trace",
        ]

    def test_inapplicable(self):
        with pytest.raises(ValueError, match="needs"):
            run_claim("decomposition", make_algebra([2, 2]))

    def test_report_deterministic(self):
        A = make_algebra([1, 2])
        a = run_claim("bulk-minus", A, 3).to_json(timings=False)
        b = run_claim("bulk-minus", A, 3).to_json(timings=False)
        assert a == b
