import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kspec.errors import PreconditionError, ResolventPoint
from kspec.krein import KreinSpace, is_g_normal
from kspec.regions import Circle, Rectangle
from kspec.signtype import (
    Label,
    ProbeConfig,
    classify_point,
    classify_spectrum,
    epsdelta_probe,
    probe_region,
    region_is_positive_type,
)
from models import conditioned, jordan, krein_model, labels_match, random_krein_model

SIGN = KreinSpace.from_gram(np.diag([1.0, -1.0]))
SWAP = np.array([[0.0, 1.0], [1.0, 0.0]])
DIAG = np.diag([1j, 2j])


class TestClassifyPoint:
    def test_positive(self):
        p = classify_point(DIAG, SIGN, 1j)
        assert p.label is Label.POSITIVE
        assert p.witness == pytest.approx((1.0, 1.0))
        assert p.semisimple

    def test_negative(self):
        assert classify_point(DIAG, SIGN, 2j).label is Label.NEGATIVE

    def test_neutral_eigenvector(self):
        p = classify_point(SWAP, SIGN, 1.0)
        assert p.label is Label.NEUTRAL
        x = p.kernel_basis[:, 0]
        assert abs(abs(x[0]) - abs(x[1])) < 1e-12

    def test_jordan_chain_neutral(self):
        p = classify_point([[0, 1], [0, 0]], KreinSpace.from_gram(SWAP), 0.0)
        assert p.label is Label.NEUTRAL
        assert not p.semisimple
        assert p.kernel_dim == 1 and p.algebraic == 2
        # the full root subspace carries both signs
        lo, hi = p.root_witness
        assert lo < 0 < hi

    def test_indefinite(self):
        p = classify_point(1j * np.eye(2), SIGN, 1j)
        assert p.label is Label.INDEFINITE
        assert p.witness == pytest.approx((-1.0, 1.0))

    def test_resolvent_point(self):
        with pytest.raises(ResolventPoint) as err:
            classify_point(DIAG, SIGN, 5j)
        assert err.value.distance == pytest.approx(3.0)

    def test_dimension_mismatch(self):
        with pytest.raises(PreconditionError):
            classify_point(np.eye(3), SIGN, 1.0)

    def test_approximate_eigenvalue_accepted(self):
        assert classify_point(DIAG, SIGN, 1j + 1e-12).label is Label.POSITIVE

    @pytest.mark.parametrize("c", [1e-3, 0.5, 7.0])
    def test_scaling_invariance(self, rng, c):
        model = random_krein_model(rng, max_blocks=4)
        scaled = KreinSpace.from_gram(c * model.G)
        for lam, _ in model.labels:
            p = classify_point(model.N, model.space, lam)
            q = classify_point(model.N, scaled, lam)
            assert p.label is q.label
            assert q.witness == pytest.approx(tuple(c * w for w in p.witness), rel=1e-6, abs=1e-9)


class TestClassifySpectrum:
    def test_diagonal(self):
        spec = classify_spectrum(DIAG, SIGN)
        assert {complex(k): v for k, v in spec.labels().items()} == {
            1j: Label.POSITIVE, 2j: Label.NEGATIVE
        }
        assert spec.definite_split
        assert not spec.all_positive and not spec.all_negative
        assert spec.indices(Label.POSITIVE) == [0]

    def test_swap_neutral(self):
        spec = classify_spectrum(SWAP, SIGN)
        assert [p.label for p in spec.points] == [Label.NEUTRAL, Label.NEUTRAL]
        assert not spec.definite_split

    @given(st.integers(1, 8), st.integers(0, 2**32 - 1))
    def test_hilbert_all_positive(self, n, seed):
        rng = np.random.default_rng(seed)
        N = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        spec = classify_spectrum(N, KreinSpace.hilbert(n))
        assert spec.all_positive

    def test_negated_gram_all_negative(self, rng):
        N = rng.standard_normal((4, 4))
        assert classify_spectrum(N, KreinSpace.from_gram(-np.eye(4))).all_negative

    def test_covers_every_cluster_once(self, rng):
        for _ in range(10):
            model = random_krein_model(rng)
            spec = classify_spectrum(model.N, model.space)
            assert len(spec.points) == len(spec.structure.clusters)
            assert sum(p.algebraic for p in spec.points) == model.N.shape[0]

    @pytest.mark.parametrize("seed", range(15))
    def test_ground_truth(self, seed):
        model = random_krein_model(np.random.default_rng(seed))
        spec = classify_spectrum(model.N, model.space)
        assert labels_match(spec.points, model.labels)

    @pytest.mark.parametrize("seed", range(5))
    def test_congruence_covariance(self, seed):
        rng = np.random.default_rng(seed)
        model = random_krein_model(rng)
        S = conditioned(rng, model.N.shape[0], 5.0)
        N2 = np.linalg.solve(S, model.N @ S)
        G2 = S.conj().T @ model.G @ S
        a = classify_spectrum(model.N, model.space)
        b = classify_spectrum(N2, KreinSpace.from_gram((G2 + G2.conj().T) / 2))
        for p in a.points:
            q = classify_point(N2, KreinSpace.from_gram((G2 + G2.conj().T) / 2), p.eigenvalue,
                               structure=b.structure)
            assert p.label is q.label

    def test_definite_points_semisimple_on_normal_jordan_models(self, rng):
        for _ in range(10):
            model = krein_model(rng, ["jordan", "pos", "neg"], [0.0, 3 + 1j, -3 - 1j], cond=5)
            assert is_g_normal(model.N, model.space).normal
            for p in classify_spectrum(model.N, model.space).points:
                if p.label.definite:
                    assert p.semisimple
                else:
                    assert not p.semisimple and p.label is Label.NEUTRAL


class TestProbe:
    def test_single_kernel_vector(self):
        assert epsdelta_probe(DIAG, SIGN, 1j, 0.5) == pytest.approx(1.0)

    def test_hilbert(self, rng):
        N = rng.standard_normal((3, 3))
        lam = np.linalg.eigvals(N)[0]
        assert epsdelta_probe(N, KreinSpace.hilbert(3), lam, 0.3) == pytest.approx(1.0)

    def test_neutral_nonpositive(self):
        assert epsdelta_probe(SWAP, SIGN, 1.0, 0.5) <= 1e-12

    def test_empty_span(self):
        assert epsdelta_probe(DIAG, SIGN, 10j, 0.5) == np.inf

    def test_invalid_eps(self):
        with pytest.raises(PreconditionError):
            ProbeConfig(eps=1.5)
        with pytest.raises(PreconditionError):
            ProbeConfig(eps=0.0)

    @given(st.integers(0, 2**32 - 1))
    def test_monotone_in_eps(self, seed):
        rng = np.random.default_rng(seed)
        model = random_krein_model(rng, max_blocks=3)
        lam = complex(rng.uniform(-6, 6), rng.uniform(-3, 3))
        eps = np.sort(rng.uniform(0.01, 0.99, 6))
        vals = [epsdelta_probe(model.N, model.space, lam, e) for e in eps]
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))

    def test_region_scan(self):
        rect = Rectangle(-0.5, 0.5, 0.5, 1.5)
        assert probe_region(DIAG, SIGN, rect, ProbeConfig(eps=0.2)) > 0
        wide = Rectangle(-0.5, 0.5, 0.5, 2.5)
        assert probe_region(DIAG, SIGN, wide, ProbeConfig(eps=0.2)) < 0


class TestRegion:
    def test_contains_positive_only(self):
        rep = region_is_positive_type(DIAG, SIGN, Rectangle(-1, 1, 0.5, 1.5))
        assert rep.positive
        assert [e[1] for e in rep.entries] == [Label.POSITIVE]

    def test_contains_negative(self):
        rep = region_is_positive_type(DIAG, SIGN, Rectangle(-1, 1, 0.5, 2.5))
        assert not rep.positive

    def test_vacuous(self):
        rep = region_is_positive_type(DIAG, SIGN, Rectangle(5, 6, 5, 6))
        assert rep.positive and rep.entries == ()

    def test_boundary_flagged(self):
        rep = region_is_positive_type(DIAG, SIGN, Rectangle(-1, 1, 1.0, 1.5))
        assert rep.entries[0][2] == "boundary"
        assert rep.positive

    def test_circle(self):
        assert region_is_positive_type(DIAG, SIGN, Circle(1j, 0.3)).positive

    def test_jordan_neutral_not_positive(self):
        N = jordan(0.0, 2)
        rep = region_is_positive_type(N, KreinSpace.from_gram(SWAP), Rectangle(-1, 1, -1, 1))
        assert not rep.positive
