import math
from types import SimpleNamespace

import numpy as np
import pytest

from conftest import make_event, make_timeline
from oracles import scalar_cosine
from temporal_profiler.corpus import UserTimeline
from temporal_profiler.metrics import (
    DiversityResult,
    DtMode,
    consecutive_similarities,
    cosine_similarity,
    pairwise_diversity,
    time_differences,
)
from temporal_profiler.tensorio import EmbeddingMatrix


class TestCosineSimilarity:
    def test_self_similarity_is_one(self):
        assert cosine_similarity([3.0, 4.0], [3.0, 4.0]) == 1.0

    def test_orthogonal(self):
        assert cosine_similarity([1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_opposite(self):
        assert cosine_similarity([1.0, 0.0], [-2.0, 0.0]) == -1.0

    def test_scale_invariant(self):
        a = [0.2, -0.7, 1.3]
        assert cosine_similarity(a, [x * 100 for x in a]) == pytest.approx(1.0)

    def test_degenerate_vector_scores_zero(self):
        assert cosine_similarity([0.0, 0.0], [1.0, 2.0]) == 0.0
        assert cosine_similarity([1.0, 2.0], [1e-15, 0.0]) == 0.0

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            cosine_similarity([1.0, 2.0], [1.0, 2.0, 3.0])

    def test_matrix_input_rejected(self):
        with pytest.raises(ValueError):
            cosine_similarity(np.ones((2, 2)), np.ones((2, 2)))

    def test_symmetry_and_range(self, rng):
        for _ in range(200):
            x = rng.standard_normal(8)
            y = rng.standard_normal(8)
            s = cosine_similarity(x, y)
            assert s == cosine_similarity(y, x)
            assert -1.0 <= s <= 1.0

    def test_matches_scalar_oracle(self, rng):
        for _ in range(50):
            x = rng.standard_normal(16)
            y = rng.standard_normal(16)
            np.testing.assert_allclose(
                cosine_similarity(x, y), scalar_cosine(x, y), rtol=1e-12
            )


class TestConsecutiveSimilarities:
    def test_three_rows(self):
        rows = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        sims = consecutive_similarities(rows)
        np.testing.assert_array_equal(sims.values, [1.0, 0.0])
        assert len(sims) == 2

    def test_single_row_empty(self):
        assert len(consecutive_similarities(np.ones((1, 4)))) == 0

    def test_opposite_pair(self):
        sims = consecutive_similarities(np.array([[1.0, 0.0], [-1.0, 0.0]]))
        np.testing.assert_array_equal(sims.values, [-1.0])

    def test_degenerate_row_zeroes_both_gaps(self):
        rows = np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]])
        sims = consecutive_similarities(rows)
        np.testing.assert_array_equal(sims.values, [0.0, 0.0])

    def test_accepts_embedding_matrix(self):
        m = EmbeddingMatrix(np.array([[1.0, 0.0], [1.0, 0.0]]))
        np.testing.assert_array_equal(consecutive_similarities(m).values, [1.0])

    def test_one_dim_rejected(self):
        with pytest.raises(ValueError):
            consecutive_similarities(np.ones(4))

    def test_matches_pairwise_scalar_calls(self, rng):
        rows = rng.standard_normal((20, 8))
        sims = consecutive_similarities(rows)
        expected = [cosine_similarity(rows[i], rows[i + 1]) for i in range(19)]
        np.testing.assert_allclose(sims.values, expected, rtol=1e-12, atol=1e-15)

    def test_values_clipped(self, rng):
        rows = np.repeat(rng.standard_normal((1, 8)), 5, axis=0)
        sims = consecutive_similarities(rows)
        assert (sims.values <= 1.0).all()
        assert (sims.values >= -1.0).all()


class TestTimeDifferences:
    def test_raw_seconds(self):
        deltas = time_differences(make_timeline(n=3, gap_s=60), mode="raw")
        np.testing.assert_array_equal(deltas.values, [60.0, 60.0])
        np.testing.assert_array_equal(deltas.raw_seconds, [60, 60])
        assert deltas.mode is DtMode.RAW

    def test_median_mode_uniform_gaps(self):
        deltas = time_differences(make_timeline(n=3, gap_s=60))
        np.testing.assert_array_equal(deltas.values, [1.0, 1.0])
        assert deltas.mode is DtMode.MEDIAN

    def test_median_mode_mixed_gaps(self):
        events = (
            make_event(offset_s=0, text="a"),
            make_event(offset_s=60, text="b"),
            make_event(offset_s=180, text="c"),
            make_event(offset_s=240, text="d"),
        )
        deltas = time_differences(UserTimeline("u1", events))
        np.testing.assert_array_equal(deltas.values, [1.0, 2.0, 1.0])

    def test_median_ignores_zero_gaps(self):
        events = (
            make_event(offset_s=0, text="a"),
            make_event(offset_s=0, text="b"),
            make_event(offset_s=100, text="c"),
        )
        deltas = time_differences(UserTimeline("u1", events))
        np.testing.assert_array_equal(deltas.values, [0.0, 1.0])

    def test_all_gaps_zero_normalizes_to_zero(self):
        events = (
            make_event(offset_s=0, text="a"),
            make_event(offset_s=0, text="b"),
        )
        deltas = time_differences(UserTimeline("u1", events))
        np.testing.assert_array_equal(deltas.values, [0.0])
        np.testing.assert_array_equal(deltas.raw_seconds, [0])

    def test_single_event_no_gaps(self):
        assert len(time_differences(make_timeline(n=1))) == 0

    def test_descending_rejected(self):
        fake = SimpleNamespace(
            events=(make_event(offset_s=100), make_event(offset_s=0, text="b"))
        )
        with pytest.raises(ValueError, match="ascending"):
            time_differences(fake)

    def test_values_never_negative(self):
        deltas = time_differences(make_timeline(n=10, gap_s=3600))
        assert (deltas.values >= 0).all()


class TestPairwiseDiversity:
    def test_identical_profiles_zero(self):
        vectors = np.tile([1.0, 2.0, 3.0], (4, 1))
        result = pairwise_diversity(vectors)
        assert result.diversity == 0.0
        assert result.exact
        assert result.n_profiles == 4
        assert result.n_pairs == 6

    def test_orthogonal_pair_one(self):
        assert pairwise_diversity(np.eye(2)).diversity == 1.0

    def test_opposite_pair_two(self):
        vectors = np.array([[1.0, 0.0], [-1.0, 0.0]])
        assert pairwise_diversity(vectors).diversity == 2.0

    def test_three_profile_fixture(self):
        vectors = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        expected = 1.0 - (2.0 / math.sqrt(2.0)) / 3.0
        np.testing.assert_allclose(
            pairwise_diversity(vectors).diversity, expected, rtol=1e-12
        )

    def test_degenerate_profile_contributes_zero_similarity(self):
        vectors = np.array([[1.0, 0.0], [0.0, 0.0]])
        assert pairwise_diversity(vectors).diversity == 1.0

    def test_fewer_than_two_rejected(self):
        with pytest.raises(ValueError):
            pairwise_diversity(np.ones((1, 3)))

    def test_one_dim_rejected(self):
        with pytest.raises(ValueError):
            pairwise_diversity(np.ones(3))

    def test_matches_brute_force(self, rng):
        vectors = rng.standard_normal((50, 8))
        total = 0.0
        count = 0
        for i in range(50):
            for j in range(i + 1, 50):
                total += scalar_cosine(vectors[i], vectors[j])
                count += 1
        expected = 1.0 - total / count
        result = pairwise_diversity(vectors)
        np.testing.assert_allclose(result.diversity, expected, rtol=1e-9)
        assert result.n_pairs == count

    def test_scale_invariant(self, rng):
        vectors = rng.standard_normal((10, 4))
        scaled = vectors * rng.uniform(0.5, 50.0, size=(10, 1))
        np.testing.assert_allclose(
            pairwise_diversity(vectors).diversity,
            pairwise_diversity(scaled).diversity,
            rtol=1e-12,
        )

    def test_result_in_range(self, rng):
        for _ in range(20):
            vectors = rng.standard_normal((6, 3))
            assert 0.0 <= pairwise_diversity(vectors).diversity <= 2.0


class TestSampledDiversity:
    def test_sampled_path_flagged_and_counted(self, rng):
        vectors = rng.standard_normal((50, 6))
        result = pairwise_diversity(vectors, exact_limit=10, sample_pairs=2000)
        assert not result.exact
        assert result.n_pairs == 2000
        assert result.n_profiles == 50

    def test_sampled_is_deterministic_for_a_seed(self, rng):
        vectors = rng.standard_normal((50, 6))
        a = pairwise_diversity(vectors, exact_limit=10, sample_pairs=2000, seed=7)
        b = pairwise_diversity(vectors, exact_limit=10, sample_pairs=2000, seed=7)
        assert a.diversity == b.diversity

    def test_seed_changes_the_draw(self, rng):
        vectors = rng.standard_normal((50, 6))
        a = pairwise_diversity(vectors, exact_limit=10, sample_pairs=500, seed=0)
        b = pairwise_diversity(vectors, exact_limit=10, sample_pairs=500, seed=1)
        assert a.diversity != b.diversity

    def test_estimate_tracks_exact_value(self, rng):
        vectors = rng.standard_normal((200, 6))
        exact = pairwise_diversity(vectors).diversity
        sampled = pairwise_diversity(
            vectors, exact_limit=100, sample_pairs=200_000
        ).diversity
        assert abs(sampled - exact) < 0.02

    def test_exact_limit_boundary_stays_exact(self, rng):
        vectors = rng.standard_normal((10, 4))
        assert pairwise_diversity(vectors, exact_limit=10).exact


def test_diversity_result_is_plain_data():
    result = DiversityResult(diversity=0.5, n_profiles=3, exact=True, n_pairs=3)
    assert result.diversity == 0.5
