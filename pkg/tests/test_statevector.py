import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from avn_nonlocality.statevector import (
    MAX_SITES,
    Basis,
    MeasurementSpec,
    SparseState,
    SpecError,
    ZeroProbabilityCondition,
    build_w_state,
    conditional_probability,
    outcome_strings,
    probability,
    probability_by_projection,
    project,
)
from dense_oracle import dense_probability, dense_w


@st.composite
def specs(draw, max_n=8):
    """(n, records) with distinct sites and random bases/outcomes."""
    n = draw(st.integers(1, max_n))
    sites = draw(st.lists(st.integers(0, n - 1), unique=True, max_size=n))
    recs = [(s, draw(st.sampled_from("ZX")), draw(st.sampled_from((1, -1)))) for s in sites]
    return n, recs


class TestWState:
    def test_three_sites(self):
        w = build_w_state(3)
        assert set(w.amplitudes) == {0b001, 0b010, 0b100}
        for amp in w.amplitudes.values():
            assert amp == pytest.approx(1 / math.sqrt(3), abs=1e-15)
            assert amp.imag == 0

    def test_single_site(self):
        assert dict(build_w_state(1).amplitudes) == {1: 1.0}

    def test_five_sites_normalized(self):
        w = build_w_state(5)
        assert len(w) == 5
        assert all(abs(abs(a) ** 2 - 0.2) < 1e-15 for a in w.amplitudes.values())
        assert w.norm_squared() == pytest.approx(1, abs=1e-12)

    @pytest.mark.parametrize("n", [0, -1, MAX_SITES + 1])
    def test_rejects_bad_n(self, n):
        with pytest.raises(ValueError):
            build_w_state(n)

    def test_supports_at_least_24_sites(self):
        assert MAX_SITES >= 24
        assert len(build_w_state(24)) == 24


class TestSparseState:
    def test_drops_tiny_amplitudes(self):
        s = SparseState(2, {0: 1.0, 3: 1e-16})
        assert dict(s.amplitudes) == {0: 1.0}

    def test_rejects_out_of_range_index(self):
        with pytest.raises(ValueError):
            SparseState(2, {4: 1.0})

    def test_amplitudes_read_only(self):
        w = build_w_state(2)
        with pytest.raises(TypeError):
            w.amplitudes[0] = 1.0


class TestMeasurementSpec:
    def test_duplicate_sites_rejected(self):
        with pytest.raises(SpecError):
            MeasurementSpec.of((0, "Z", 1), (0, "X", 1))

    def test_bad_outcome_rejected(self):
        with pytest.raises(SpecError):
            MeasurementSpec.of((0, "Z", 0))

    def test_site_out_of_range(self):
        with pytest.raises(SpecError):
            probability(build_w_state(2), MeasurementSpec.of((2, "Z", 1)))

    def test_empty_allowed(self):
        assert len(MeasurementSpec()) == 0


class TestProject:
    def test_z_minus_keeps_occupied_term(self):
        out = project(build_w_state(3), 0, Basis.Z, -1)
        assert set(out.amplitudes) == {0b001}
        assert out.norm_squared() == pytest.approx(1 / 3, abs=1e-15)

    def test_orthogonal_projectors_annihilate(self):
        out = project(project(build_w_state(3), 0, "Z", 1), 0, "Z", -1)
        assert len(out) == 0
        assert out.norm_squared() == 0

    def test_x_projector_on_basis_state(self):
        out = project(SparseState(1, {0: 1.0}), 0, "X", -1)
        assert dict(out.amplitudes) == {0: 0.5, 1: -0.5}

    def test_x_projector_cancellation_leaves_no_residue(self):
        # |+> projected onto |-> is an exact zero
        plus = SparseState(1, {0: 1 / math.sqrt(2), 1: 1 / math.sqrt(2)})
        assert len(project(plus, 0, "X", -1)) == 0

    def test_out_of_range_site(self):
        with pytest.raises(SpecError):
            project(build_w_state(2), 5, "Z", 1)

    @settings(max_examples=150)
    @given(specs(max_n=6), st.data())
    def test_idempotent(self, case, data):
        n, recs = case
        state = build_w_state(n)
        for r in recs:
            state = project(state, *r)
        site = data.draw(st.integers(0, n - 1))
        basis = data.draw(st.sampled_from("ZX"))
        outcome = data.draw(st.sampled_from((1, -1)))
        once = project(state, site, basis, outcome)
        twice = project(once, site, basis, outcome)
        assert set(once.amplitudes) == set(twice.amplitudes)
        for k, v in once.amplitudes.items():
            assert abs(v - twice.amplitudes[k]) < 1e-14


class TestProbability:
    def test_two_occupied_sites_impossible(self):
        spec = MeasurementSpec.of((0, "Z", -1), (1, "Z", -1))
        assert probability(build_w_state(3), spec) == 0

    @pytest.mark.parametrize("n", [1, 2, 7])
    def test_empty_spec(self, n):
        assert probability(build_w_state(n), MeasurementSpec()) == pytest.approx(1, abs=1e-12)

    def test_all_x_plus_three_sites(self):
        spec = MeasurementSpec.of((0, "X", 1), (1, "X", 1), (2, "X", 1))
        # 3/8 from the dense oracle
        assert probability(build_w_state(3), spec) == pytest.approx(3 / 8, abs=1e-14)

    @pytest.mark.parametrize("n", range(2, 13))
    def test_marginals(self, n):
        w = build_w_state(n)
        for i in range(n):
            assert probability(w, MeasurementSpec.of((i, "Z", -1))) == pytest.approx(1 / n, abs=1e-12)
            assert probability(w, MeasurementSpec.of((i, "X", 1))) == pytest.approx(0.5, abs=1e-12)

    @settings(max_examples=300)
    @given(specs(max_n=8))
    def test_matches_dense_oracle(self, case):
        n, recs = case
        got = probability(build_w_state(n), MeasurementSpec.of(*recs))
        assert got == pytest.approx(dense_probability(dense_w(n), n, recs), abs=1e-12)

    @settings(max_examples=150)
    @given(specs(max_n=7))
    def test_overlap_route_matches_projection_route(self, case):
        n, recs = case
        spec = MeasurementSpec.of(*recs)
        w = build_w_state(n)
        assert probability(w, spec) == pytest.approx(probability_by_projection(w, spec), abs=1e-13)

    @settings(max_examples=150)
    @given(specs(max_n=8), st.randoms(use_true_random=False))
    def test_order_invariance(self, case, rnd):
        n, recs = case
        w = build_w_state(n)
        shuffled = list(recs)
        rnd.shuffle(shuffled)
        a = probability(w, MeasurementSpec.of(*recs))
        b = probability(w, MeasurementSpec.of(*shuffled))
        assert abs(a - b) <= 1e-14

    @pytest.mark.parametrize("n", [1, 3, 6, 10])
    def test_completeness_over_outcomes(self, n):
        w = build_w_state(n)
        for bases in [("Z",) * n, ("X",) * n, tuple("ZX"[(k % 2)] for k in range(n))]:
            total = math.fsum(
                probability(w, MeasurementSpec.of(*zip(range(n), bases, outs)))
                for outs in outcome_strings(n)
            )
            assert total == pytest.approx(1, abs=1e-12)

    def test_works_on_unnormalized_state(self):
        half = project(build_w_state(2), 0, "Z", -1)
        assert probability(half, MeasurementSpec()) == pytest.approx(0.5)
        assert probability(half, MeasurementSpec.of((1, "Z", 1))) == pytest.approx(0.5)


class TestConditional:
    def test_x_correlation_three_sites(self):
        w = build_w_state(3)
        got = conditional_probability(w, MeasurementSpec.of((0, "X", 1)), MeasurementSpec.of((1, "X", 1)))
        assert got == pytest.approx(5 / 6, abs=1e-12)

    @pytest.mark.parametrize("n", [2, 4])
    def test_empty_given_is_marginal(self, n):
        w = build_w_state(n)
        target = MeasurementSpec.of((0, "X", -1), (1, "Z", 1))
        assert conditional_probability(w, MeasurementSpec(), target) == pytest.approx(probability(w, target))

    def test_occupied_excludes_other_occupied(self):
        w = build_w_state(2)
        got = conditional_probability(w, MeasurementSpec.of((0, "Z", -1)), MeasurementSpec.of((1, "Z", -1)))
        assert got == 0

    def test_zero_probability_condition_raises(self):
        w = build_w_state(3)
        given_ = MeasurementSpec.of((0, "Z", -1), (1, "Z", -1))
        with pytest.raises(ZeroProbabilityCondition):
            conditional_probability(w, given_, MeasurementSpec.of((2, "X", 1)))

    def test_overlapping_sites_rejected(self):
        w = build_w_state(3)
        with pytest.raises(SpecError):
            conditional_probability(w, MeasurementSpec.of((0, "Z", 1)), MeasurementSpec.of((0, "X", 1)))


def test_outcome_strings_cover_all():
    strings = list(outcome_strings(3))
    assert len(set(strings)) == 8
    assert set(strings) == set(itertools.product((1, -1), repeat=3))
