import numpy as np
import pytest

from temporal_profiler.corpus import ActivityKind
from temporal_profiler.decay import DecaySpec
from temporal_profiler.metrics import cosine_similarity
from temporal_profiler.synth import (
    DriftCorpus,
    DriftParams,
    generate_drifting_corpus,
    hash_embed,
    run_drift_experiment,
)

SMALL = DriftParams(
    n_users=20, events_per_user=12, dim=16, drift_rate=0.15, noise=0.1,
    likes_per_user=3, seed=42,
)


@pytest.fixture(scope="module")
def small_corpus() -> DriftCorpus:
    return generate_drifting_corpus(SMALL)


class TestHashEmbed:
    def test_deterministic(self):
        a = hash_embed("alpha beta gamma", 32)
        b = hash_embed("alpha beta gamma", 32)
        np.testing.assert_array_equal(a, b)

    def test_unit_norm(self):
        for text in ("one", "one two", "a b c d e f g"):
            assert np.linalg.norm(hash_embed(text, 16)) == pytest.approx(1.0)

    def test_empty_text_is_first_basis_vector(self):
        vec = hash_embed("", 8)
        np.testing.assert_array_equal(vec, np.eye(8)[0])

    def test_self_similarity_is_one(self):
        vec = hash_embed("drifting interests", 64)
        assert cosine_similarity(vec, vec) == 1.0

    def test_token_order_free(self):
        np.testing.assert_array_equal(
            hash_embed("alpha beta", 32), hash_embed("beta alpha", 32)
        )

    def test_different_texts_differ(self):
        assert not np.array_equal(hash_embed("alpha", 64), hash_embed("omega", 64))

    def test_shared_tokens_raise_similarity(self):
        near = cosine_similarity(
            hash_embed("alpha beta gamma delta", 256),
            hash_embed("alpha beta gamma epsilon", 256),
        )
        far = cosine_similarity(
            hash_embed("alpha beta gamma delta", 256),
            hash_embed("zeta eta theta iota", 256),
        )
        assert near > far

    def test_dim_below_one_rejected(self):
        with pytest.raises(ValueError):
            hash_embed("alpha", 0)


class TestDriftParams:
    def test_defaults(self):
        params = DriftParams()
        assert params.n_users == 200
        assert params.events_per_user == 50
        assert params.dim == 64
        assert params.seed == 42

    @pytest.mark.parametrize(
        "field,value",
        [
            ("n_users", 0),
            ("events_per_user", 0),
            ("dim", 0),
            ("drift_rate", -0.1),
            ("drift_rate", 1.1),
            ("noise", -1.0),
            ("likes_per_user", -1),
        ],
    )
    def test_bad_values_rejected(self, field, value):
        with pytest.raises(ValueError):
            DriftParams(**{field: value})


class TestGenerator:
    def test_shapes_and_alignment(self, small_corpus):
        assert len(small_corpus.timelines) == SMALL.n_users
        assert small_corpus.timeline_matrix.rows == SMALL.n_users * SMALL.events_per_user
        assert small_corpus.timeline_matrix.dim == SMALL.dim
        assert len(small_corpus.records) == SMALL.n_users * SMALL.likes_per_user
        assert small_corpus.activity_matrix.rows == len(small_corpus.records)
        for timeline in small_corpus.timelines.values():
            assert len(timeline) == SMALL.events_per_user

    def test_same_seed_bit_identical(self, small_corpus):
        again = generate_drifting_corpus(SMALL)
        np.testing.assert_array_equal(
            again.timeline_matrix.data, small_corpus.timeline_matrix.data
        )
        np.testing.assert_array_equal(
            again.activity_matrix.data, small_corpus.activity_matrix.data
        )
        assert again.timelines == small_corpus.timelines
        assert again.records == small_corpus.records

    def test_seed_changes_embeddings(self, small_corpus):
        other = generate_drifting_corpus(
            DriftParams(
                n_users=SMALL.n_users, events_per_user=SMALL.events_per_user,
                dim=SMALL.dim, drift_rate=SMALL.drift_rate, noise=SMALL.noise,
                likes_per_user=SMALL.likes_per_user, seed=7,
            )
        )
        assert not np.array_equal(
            other.timeline_matrix.data, small_corpus.timeline_matrix.data
        )

    def test_all_embeddings_unit_norm(self, small_corpus):
        for matrix in (small_corpus.timeline_matrix, small_corpus.activity_matrix):
            norms = np.linalg.norm(matrix.data, axis=1)
            np.testing.assert_allclose(norms, 1.0, rtol=1e-9)

    def test_events_hourly_likes_after(self, small_corpus):
        timeline = next(iter(small_corpus.timelines.values()))
        stamps = [e.timestamp for e in timeline.events]
        gaps = {(b - a).total_seconds() for a, b in zip(stamps, stamps[1:])}
        assert gaps == {3600.0}
        user_records = [r for r in small_corpus.records if r.user_id == timeline.user_id]
        assert len(user_records) == SMALL.likes_per_user
        for record in user_records:
            assert record.timestamp > stamps[-1]
            assert record.kind is ActivityKind.LIKE

    def test_user_ids_zero_padded_and_sorted(self, small_corpus):
        users = list(small_corpus.timelines)
        assert users[0] == "u0000"
        assert users == sorted(users)

    def test_trajectories_are_unit_interests(self, small_corpus):
        for traj in small_corpus.trajectories.values():
            assert traj.shape == (SMALL.events_per_user, SMALL.dim)
            np.testing.assert_allclose(
                np.linalg.norm(traj, axis=1), 1.0, rtol=1e-9
            )

    def test_no_drift_no_noise_degenerates_to_constant(self):
        params = DriftParams(
            n_users=5, events_per_user=8, dim=16, drift_rate=0.0, noise=0.0,
            likes_per_user=2, seed=42,
        )
        corpus = generate_drifting_corpus(params)
        # with nothing moving, every event embedding equals the interest up
        # to one renormalization rounding step
        for user_index, traj in enumerate(corpus.trajectories.values()):
            start = user_index * params.events_per_user
            rows = corpus.timeline_matrix.data[start : start + params.events_per_user]
            np.testing.assert_allclose(rows, traj, rtol=1e-12, atol=0)
            np.testing.assert_array_equal(traj, np.tile(traj[0], (params.events_per_user, 1)))
            np.testing.assert_array_equal(rows, np.tile(rows[0], (params.events_per_user, 1)))

    def test_drift_moves_interest_away(self, small_corpus):
        # cosine between first and last interest falls below 0.9 for most
        # users at this drift rate; check the population mean moved
        drops = []
        for traj in small_corpus.trajectories.values():
            drops.append(cosine_similarity(traj[0], traj[-1]))
        assert np.mean(drops) < 0.9

    def test_likes_track_final_interest_not_first(self, small_corpus):
        wins = 0
        total = 0
        users = list(small_corpus.timelines)
        for i, user_id in enumerate(users):
            traj = small_corpus.trajectories[user_id]
            like_rows = small_corpus.activity_matrix.data[
                i * SMALL.likes_per_user : (i + 1) * SMALL.likes_per_user
            ]
            for row in like_rows:
                total += 1
                if cosine_similarity(row, traj[-1]) > cosine_similarity(row, traj[0]):
                    wins += 1
        assert wins / total > 0.9

    def test_subset_reproducibility(self, small_corpus):
        # the first users of a larger run match the smaller run bit for bit
        bigger = generate_drifting_corpus(
            DriftParams(
                n_users=SMALL.n_users + 5, events_per_user=SMALL.events_per_user,
                dim=SMALL.dim, drift_rate=SMALL.drift_rate, noise=SMALL.noise,
                likes_per_user=SMALL.likes_per_user, seed=SMALL.seed,
            )
        )
        n_rows = SMALL.n_users * SMALL.events_per_user
        np.testing.assert_array_equal(
            bigger.timeline_matrix.data[:n_rows], small_corpus.timeline_matrix.data
        )


class TestDriftExperiment:
    def test_report_shape_and_determinism(self):
        params = DriftParams(
            n_users=12, events_per_user=10, dim=16, drift_rate=0.2, noise=0.1,
            likes_per_user=2, seed=42,
        )
        specs = [
            DecaySpec("exponential", "basic", 0.1),
            DecaySpec("gaussian", "cosine", 0.05),
        ]
        report = run_drift_experiment(params, specs, pool_size=10)
        assert report.static.decay == "static"
        assert [row.decay for row in report.dynamic] == [s.label() for s in specs]
        for row in [report.static, *report.dynamic]:
            assert 0.0 <= row.accuracy <= 1.0
            assert 0.0 <= row.diversity <= 2.0
            assert 0.0 < row.mean_sigmoid < 1.0
        again = run_drift_experiment(params, specs, pool_size=10)
        assert again == report

    def test_to_dict_carries_deltas(self):
        params = DriftParams(
            n_users=8, events_per_user=6, dim=8, drift_rate=0.2, noise=0.1,
            likes_per_user=2, seed=42,
        )
        report = run_drift_experiment(
            params, [DecaySpec("exponential", "basic", 0.1)], pool_size=5
        )
        data = report.to_dict()
        assert data["params"]["n_users"] == 8
        assert data["static"]["accuracy_delta"] == 0.0
        dyn = data["dynamic"][0]
        assert dyn["decay"] == "exponential/basic/k=0.1"
        np.testing.assert_allclose(
            dyn["accuracy_delta"], dyn["accuracy"] - data["static"]["accuracy"]
        )

    def test_eval_seed_defaults_to_params_seed(self):
        params = DriftParams(
            n_users=8, events_per_user=6, dim=8, drift_rate=0.2, noise=0.1,
            likes_per_user=2, seed=11,
        )
        report = run_drift_experiment(params, [], pool_size=5)
        assert report.eval_seed == 11
        pinned = run_drift_experiment(params, [], pool_size=5, eval_seed=3)
        assert pinned.eval_seed == 3
