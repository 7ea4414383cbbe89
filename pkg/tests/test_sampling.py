import pytest

from braidfan.sampling import GENERATORS, affine_hc_family, candidates, rng_for, sample_sf_hc
from braidfan.setfn import in_hc, in_level_space, min_level


class TestSampler:
    @pytest.mark.parametrize("d,k", [(3, 1), (5, 2), (6, 2), (4, 3)])
    def test_accepted_samples_are_checked(self, d, k):
        batch = sample_sf_hc(d, k, 60, seed=4)
        assert batch.accepted == 60
        assert batch.attempted == batch.accepted + batch.rejected_level + batch.rejected_hc
        for F in batch.samples:
            assert in_level_space(F, k) and in_hc(F)

    def test_reproducible(self):
        a = sample_sf_hc(5, 2, 40, seed=9)
        b = sample_sf_hc(5, 2, 40, seed=9)
        assert a.samples == b.samples and a.sources == b.sources

    def test_streams_are_per_index(self):
        assert rng_for(3, 7).random() == rng_for(3, 7).random()
        assert rng_for(3, 7).random() != rng_for(3, 8).random()

    def test_round_robin(self):
        stream = candidates(4, 2, 1)
        names = [next(stream)[0] for _ in range(2 * len(GENERATORS))]
        assert names == list(GENERATORS) * 2

    def test_attempt_cap(self):
        batch = sample_sf_hc(4, 2, 1000, seed=1, max_attempts=30)
        assert batch.attempted == 30 and batch.accepted < 1000

    def test_dense_generator_without_hc_filter(self):
        batch = sample_sf_hc(4, 1, 50, seed=2, check_hc=False, generators=("dense_terms",))
        assert batch.accepted == 50
        assert not all(in_hc(F) for F in batch.samples)

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            next(candidates(0, 1, 1))
        with pytest.raises(ValueError):
            next(candidates(3, 1, 1, generators=("nope",)))

    def test_difference_products_reach_two_levels(self):
        batch = sample_sf_hc(5, 2, 100, seed=7)
        products = [F for F, s in zip(batch.samples, batch.sources) if s == "difference_product"]
        assert products and all(min_level(F).k_min <= 2 for F in products)


def test_affine_family():
    fam = affine_hc_family(3)
    assert len(fam) == 1 + 3 + 6
    assert all(in_hc(F) and in_level_space(F, 1) for F in fam)
