import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chronoline import ChronolineError, SyntheticSpec, generate
from chronoline.synthetic import base_curve, random_orthonormal_frame


class TestSpecValidation:
    def test_defaults_are_valid(self):
        spec = SyntheticSpec()
        assert (spec.y_min, spec.y_max, spec.dim) == (1700, 2024, 512)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"curve_kind": "circle"},
            {"dim": 3},
            {"y_min": 2000, "y_max": 2000},
            {"y_min": 2000, "y_max": 1999},
            {"noise_sigma": -0.1},
            {"queries_per_year": -1},
        ],
    )
    def test_invalid_specs_rejected(self, kwargs):
        with pytest.raises(ChronolineError):
            SyntheticSpec(**kwargs)


class TestBaseCurve:
    def test_line(self):
        pts = base_curve("line", np.array([0.0, 0.5, 1.0]))
        assert np.array_equal(pts, [[0, 0, 0], [0.5, 0, 0], [1, 0, 0]])

    def test_helix_winds_twice(self):
        pts = base_curve("helix", np.array([0.0, 0.5, 1.0]))
        # u=0 and u=0.5 and u=1 all sit at angle 0 mod 2pi
        assert np.allclose(pts[:, 0], 1.0)
        assert np.allclose(pts[:, 1], 0.0, atol=1e-12)
        assert np.allclose(pts[:, 2], [0.0, 0.5, 1.0])

    def test_s_curve_midpoint(self):
        pts = base_curve("s-curve", np.array([0.5]))
        assert pts[0] == pytest.approx([0.5, 0.0, 0.0], abs=1e-12)


class TestFrame:
    @given(st.integers(0, 200), st.integers(4, 40))
    def test_orthonormal_columns(self, seed, dim):
        frame = random_orthonormal_frame(dim, 4, np.random.default_rng(seed))
        assert frame.shape == (dim, 4)
        assert np.allclose(frame.T @ frame, np.eye(4), atol=1e-12)

    def test_too_many_columns(self):
        with pytest.raises(ChronolineError):
            random_orthonormal_frame(3, 4, np.random.default_rng(0))

    @given(st.integers(0, 200))
    def test_preserves_pairwise_distances(self, seed):
        rng = np.random.default_rng(seed)
        frame = random_orthonormal_frame(24, 4, rng)
        pts = rng.standard_normal((10, 4))
        embedded = pts @ frame.T
        d_before = np.linalg.norm(pts[:, None] - pts[None, :], axis=2)
        d_after = np.linalg.norm(embedded[:, None] - embedded[None, :], axis=2)
        assert np.allclose(d_before, d_after, atol=1e-9)


class TestGenerate:
    def test_sigma_zero_queries_equal_anchors(self):
        spec = SyntheticSpec(dim=16, y_min=1990, y_max=1999, curve_kind="helix",
                             noise_sigma=0.0, queries_per_year=1, seed=42)
        anchors, queries = generate(spec)
        assert len(queries) == 10
        for rec in queries:
            assert np.array_equal(rec.vec, anchors.anchors[rec.year])

    def test_same_seed_bit_identical(self):
        spec = SyntheticSpec(dim=16, y_min=1990, y_max=1999, curve_kind="s-curve",
                             noise_sigma=0.3, queries_per_year=2, seed=7)
        a1, q1 = generate(spec)
        a2, q2 = generate(spec)
        assert np.array_equal(a1.matrix(), a2.matrix())
        assert np.array_equal(q1.matrix(), q2.matrix())
        assert [r.id for r in q1] == [r.id for r in q2]

    def test_different_seeds_differ(self):
        kw = dict(dim=16, y_min=1990, y_max=1999, queries_per_year=1)
        _, q1 = generate(SyntheticSpec(seed=1, **kw))
        _, q2 = generate(SyntheticSpec(seed=2, **kw))
        assert not np.array_equal(q1.matrix(), q2.matrix())

    def test_embedded_distances_match_3d_curve(self):
        # the constant lift coordinate cancels in differences, so pairwise
        # distances of the (pre-normalization) embedded points equal the 3D ones
        spec = SyntheticSpec(dim=48, curve_kind="helix", queries_per_year=0, seed=9)
        years = np.arange(spec.y_min, spec.y_max + 1)
        u = (years - spec.y_min) / (spec.y_max - spec.y_min)
        pts3 = base_curve("helix", u)
        rng = np.random.default_rng(spec.seed)
        frame = random_orthonormal_frame(spec.dim, 4, rng)
        lifted = np.concatenate([np.ones((len(u), 1)), pts3], axis=1)
        embedded = lifted @ frame.T
        idx = np.arange(0, 325, 25)
        d3 = np.linalg.norm(pts3[idx, None] - pts3[None, idx], axis=2)
        dn = np.linalg.norm(embedded[idx, None] - embedded[None, idx], axis=2)
        assert np.allclose(d3, dn, atol=1e-9)

    def test_anchors_unit_norm_and_distinct(self):
        spec = SyntheticSpec(dim=8, y_min=1900, y_max=1949, curve_kind="line",
                             queries_per_year=0, seed=0)
        anchors, _ = generate(spec)
        m = anchors.matrix()
        assert np.allclose(np.linalg.norm(m, axis=1), 1.0, atol=1e-9)
        gram_distinct = len(np.unique(m.round(12), axis=0))
        assert gram_distinct == 50

    def test_query_metadata(self):
        spec = SyntheticSpec(dim=8, y_min=2000, y_max=2002, curve_kind="s-curve",
                             noise_sigma=0.1, queries_per_year=2, seed=3)
        _, queries = generate(spec)
        assert [r.id for r in queries] == [
            "q-2000-0", "q-2000-1", "q-2001-0", "q-2001-1", "q-2002-0", "q-2002-1",
        ]
        assert all(r.label == "s-curve" for r in queries)
        assert [r.year for r in queries] == [2000, 2000, 2001, 2001, 2002, 2002]

    def test_zero_queries_per_year(self):
        spec = SyntheticSpec(dim=8, y_min=2000, y_max=2001, queries_per_year=0)
        _, queries = generate(spec)
        assert len(queries) == 0
        assert queries.dim == 8

    def test_queries_unit_norm(self):
        spec = SyntheticSpec(dim=8, y_min=2000, y_max=2010, curve_kind="helix",
                             noise_sigma=2.0, queries_per_year=3, seed=1)
        _, queries = generate(spec)
        norms = np.linalg.norm(queries.matrix(), axis=1)
        assert np.allclose(norms, 1.0, atol=1e-9)
