import numpy as np
import pytest
from scipy import stats

from divi.datagen import Dataset, gen_matched, standardize
from divi.model import PriorMode
from divi.prior import build_prior, gaussian_llr, kruskal_wallis, rough_kmeans


def random_partition_inertia(x, k, rng):
    labels = rng.integers(0, k, x.shape[0])
    total = 0.0
    for c in range(k):
        members = x[labels == c]
        if len(members):
            total += ((members - members.mean(axis=0)) ** 2).sum()
    return total


class TestRoughKmeans:
    def test_separated_groups(self):
        x = np.concatenate([np.full(30, -10.0), np.full(30, 10.0)])
        x = (x + 0.01 * np.random.default_rng(0).standard_normal(60))[:, None]
        labels = rough_kmeans(x, k0=2, seed=0)
        assert len(np.unique(labels[:30])) == 1
        assert len(np.unique(labels[30:])) == 1
        assert labels[0] != labels[-1]

    def test_one_point_per_center(self, rng):
        x = rng.normal(0, 5, (4, 3))
        labels = rough_kmeans(x, k0=4, seed=1)
        assert sorted(labels) == [0, 1, 2, 3]

    def test_beats_random_partitions(self, rng):
        data = standardize(gen_matched(400, 30, seed=0))
        labels = rough_kmeans(data.x, k0=5, seed=0)
        inertia = 0.0
        for c in range(5):
            members = data.x[labels == c]
            if len(members):
                inertia += ((members - members.mean(axis=0)) ** 2).sum()
        best_random = min(random_partition_inertia(data.x, 5, rng)
                          for _ in range(100))
        assert inertia <= best_random

    def test_requires_enough_rows(self, rng):
        with pytest.raises(ValueError):
            rough_kmeans(rng.normal(0, 1, (3, 2)), k0=5, seed=0)


class TestKruskalWallis:
    def test_two_group_value(self):
        col = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
        labels = np.array([0, 0, 0, 1, 1, 1])
        assert kruskal_wallis(col, labels) == pytest.approx(3.8571429, abs=1e-6)

    def test_all_tied_is_zero(self):
        assert kruskal_wallis(np.ones(8), np.repeat([0, 1], 4)) == 0.0

    def test_label_permutation_invariance(self, rng):
        col = rng.normal(0, 1, 40)
        labels = rng.integers(0, 4, 40)
        while len(np.unique(labels)) < 2:
            labels = rng.integers(0, 4, 40)
        remapped = (labels + 7) % 11
        assert kruskal_wallis(col, labels) == pytest.approx(
            kruskal_wallis(col, remapped), rel=1e-12)

    def test_translation_invariance(self, rng):
        col = rng.normal(0, 1, 30)
        labels = rng.integers(0, 3, 30)
        while len(np.unique(labels)) < 2:
            labels = rng.integers(0, 3, 30)
        assert kruskal_wallis(col, labels) == pytest.approx(
            kruskal_wallis(col + 13.7, labels), rel=1e-12)

    def test_matches_scipy_with_ties(self, rng):
        for _ in range(20):
            col = np.round(rng.normal(0, 1, 30), 1)   # force ties
            labels = rng.integers(0, 3, 30)
            if len(np.unique(labels)) < 2 or len(np.unique(col)) < 2:
                continue
            groups = [col[labels == g] for g in np.unique(labels)]
            want = stats.kruskal(*groups).statistic
            assert kruskal_wallis(col, labels) == pytest.approx(want, rel=1e-10)

    def test_single_group_errors(self):
        with pytest.raises(ValueError):
            kruskal_wallis(np.arange(5.0), np.zeros(5, dtype=int))


class TestGaussianLLR:
    def test_degenerate_groups_hit_floor(self):
        col = np.array([-1.0, -1.0, 1.0, 1.0])
        labels = np.array([0, 0, 1, 1])
        assert gaussian_llr(col, labels) == pytest.approx(55.2620422, abs=1e-4)

    def test_identical_fit_is_zero(self):
        col = np.array([-1.0, 1.0, -1.0, 1.0])
        labels = np.array([0, 0, 1, 1])
        assert gaussian_llr(col, labels) == pytest.approx(0.0, abs=1e-12)

    def test_nonnegative(self, rng):
        for _ in range(50):
            col = rng.normal(0, 1, 25)
            labels = rng.integers(0, 3, 25)
            if len(np.unique(labels)) < 2:
                continue
            assert gaussian_llr(col, labels) >= 0.0

    def test_translation_invariance(self, rng):
        col = rng.normal(0, 2, 30)
        labels = rng.integers(0, 2, 30)
        while len(np.unique(labels)) < 2:
            labels = rng.integers(0, 2, 30)
        assert gaussian_llr(col, labels) == pytest.approx(
            gaussian_llr(col - 42.0, labels), rel=1e-9)

    def test_scale_invariance_without_floor(self, rng):
        col = rng.normal(0, 1, 30) + np.repeat([0.0, 3.0], 15)
        labels = np.repeat([0, 1], 15)
        a = gaussian_llr(col, labels, var_floor=0.0)
        b = gaussian_llr(col * 5.0, labels, var_floor=0.0)
        assert a == pytest.approx(b, rel=1e-9)

    def test_single_group_errors(self):
        with pytest.raises(ValueError):
            gaussian_llr(np.arange(5.0), np.ones(5, dtype=int))


class TestBuildPrior:
    def test_noninformative(self, rng):
        data = Dataset(x=rng.normal(0, 1, (30, 8)))
        prior = build_prior(data, PriorMode.NONINFORMATIVE, seed=0)
        np.testing.assert_array_equal(prior.rho, np.full(8, 0.5))

    def test_random_clamped_and_deterministic(self, rng):
        data = Dataset(x=rng.normal(0, 1, (30, 50)))
        a = build_prior(data, PriorMode.RANDOM, seed=3)
        b = build_prior(data, PriorMode.RANDOM, seed=3)
        np.testing.assert_array_equal(a.rho, b.rho)
        assert np.all(a.rho >= 0.01) and np.all(a.rho <= 0.99)
        assert len(np.unique(a.rho)) > 10

    def test_degenerate_scores_give_half(self, rng):
        col = rng.normal(0, 1, 40)
        data = Dataset(x=np.column_stack([col, col, col]))  # identical columns
        prior = build_prior(data, PriorMode.INFORMATIVE, k0=3, seed=0)
        np.testing.assert_allclose(prior.rho, 0.5, atol=1e-12)

    def test_informative_orders_known_dims(self):
        # informative dims get systematically larger rho than nuisance dims
        for seed in range(20):
            data = standardize(gen_matched(1000, 40, seed=seed))
            prior = build_prior(data, PriorMode.INFORMATIVE, k0=5, seed=seed)
            assert prior.rho[:10].mean() > prior.rho[10:].mean()

    def test_informative_deterministic(self):
        data = standardize(gen_matched(150, 20, seed=5))
        a = build_prior(data, PriorMode.INFORMATIVE, k0=5, seed=9)
        b = build_prior(data, PriorMode.INFORMATIVE, k0=5, seed=9)
        np.testing.assert_array_equal(a.rho, b.rho)

    def test_rho_always_clamped(self):
        data = standardize(gen_matched(300, 30, seed=1))
        for mode in PriorMode:
            prior = build_prior(data, mode, seed=1)
            assert np.all(prior.rho >= 0.01)
            assert np.all(prior.rho <= 0.99)
