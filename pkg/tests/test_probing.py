import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chronoline import (
    ChronolineError,
    EmbeddingRecord,
    EmbeddingSet,
    SyntheticSpec,
    TimeAnchorSet,
    generate,
    normalize,
    probe,
    probe_batch,
)


class TestProbe:
    def test_identity_case(self, ortho_anchors):
        res = probe(np.eye(3)[1], ortho_anchors)
        assert res.y_pred == 1701
        assert res.score == 1.0

    def test_weighted_combination(self):
        # 0.6*e_1950 + 0.4*e_1960 normalized: dot with e_1950 is larger
        dim = 11
        e = np.eye(dim)
        anchors = TimeAnchorSet(
            y_min=1950, y_max=1960, anchors={1950 + i: e[i] for i in range(dim)}
        )
        query = normalize(0.6 * e[0] + 0.4 * e[10])
        res = probe(query, anchors)
        assert res.y_pred == 1950

    def test_tie_breaks_toward_smaller_year(self):
        v = normalize(np.array([1.0, 1.0]))
        anchors = TimeAnchorSet(y_min=1800, y_max=1801, anchors={1800: v, 1801: v})
        res = probe(v, anchors)
        assert res.y_pred == 1800

    def test_ranked_years_ordering(self, ortho_anchors):
        res = probe(np.eye(3)[1], ortho_anchors, top_k=3)
        assert res.ranked_years == ((1701, 1.0), (1700, 0.0), (1702, 0.0))

    def test_top_k_truncates(self, ortho_anchors):
        res = probe(np.eye(3)[0], ortho_anchors, top_k=2)
        assert len(res.ranked_years) == 2

    def test_dimension_mismatch(self, ortho_anchors):
        with pytest.raises(ChronolineError, match="dim"):
            probe(np.ones(4), ortho_anchors)

    def test_bad_top_k(self, ortho_anchors):
        with pytest.raises(ChronolineError):
            probe(np.eye(3)[0], ortho_anchors, top_k=0)

    @given(st.floats(1e-6, 1e6), st.integers(0, 999))
    def test_scale_invariance(self, scale, pick):
        rng = np.random.default_rng(pick)
        anchors = TimeAnchorSet(
            y_min=1700,
            y_max=1709,
            anchors={1700 + i: normalize(rng.standard_normal(8)) for i in range(10)},
        )
        q = rng.standard_normal(8)
        assert probe(q, anchors).y_pred == probe(scale * q, anchors).y_pred


class TestProbeBatch:
    def test_empty(self, ortho_anchors):
        empty = EmbeddingSet(dim=3, records=())
        assert probe_batch(empty, ortho_anchors) == []

    def test_order_preserved(self, ortho_anchors):
        recs = tuple(
            EmbeddingRecord(id=f"q{i}", vec=np.eye(3)[2 - i]) for i in range(3)
        )
        results = probe_batch(EmbeddingSet(dim=3, records=recs), ortho_anchors)
        assert [r.id for r in results] == ["q0", "q1", "q2"]
        assert [r.y_pred for r in results] == [1702, 1701, 1700]

    def test_equals_probe_loop(self):
        spec = SyntheticSpec(dim=16, curve_kind="helix", noise_sigma=0.1,
                             queries_per_year=1, y_min=1900, y_max=1949, seed=2)
        anchors, queries = generate(spec)
        batch = probe_batch(queries, anchors, top_k=3)
        loop = [probe(rec.vec, anchors, top_k=3, query_id=rec.id) for rec in queries]
        assert batch == loop

    def test_rank1_beats_runner_up_on_noisy_queries(self):
        spec = SyntheticSpec(dim=64, curve_kind="helix", noise_sigma=0.05,
                             queries_per_year=3, seed=5)
        anchors, queries = generate(spec)
        results = probe_batch(queries, anchors, top_k=2)
        top1 = sum(r.ranked_years[0][0] == q.year for r, q in zip(results, queries))
        top2 = sum(r.ranked_years[1][0] == q.year for r, q in zip(results, queries))
        assert top1 > top2
