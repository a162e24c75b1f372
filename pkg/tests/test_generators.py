import numpy as np
import pytest

from pcpsketch.errors import ConfigError
from pcpsketch.generators import GeneratorSpec, gen_synthetic, parse_generator_spec
from pcpsketch.linalg import svd

from oracles import gram_eigenvalues


class TestLowrank:
    def test_exact_rank_when_noiseless(self):
        spec = GeneratorSpec(kind="lowrank", n=8, d=12, rank=3, noise=0.0, seed=0)
        a = gen_synthetic(spec)
        assert a.shape == (8, 12)
        assert svd(a).rank == 3

    def test_noise_fills_spectrum(self):
        spec = GeneratorSpec(kind="lowrank", n=8, d=12, rank=3, noise=0.1, seed=0)
        assert svd(gen_synthetic(spec)).rank > 3

    def test_planted_singular_values(self):
        spec = GeneratorSpec(kind="lowrank", n=10, d=14, rank=4, noise=0.0, seed=3)
        f = svd(gen_synthetic(spec))
        assert np.allclose(f.sigma, [4.0, 3.0, 2.0, 1.0], atol=1e-8)


class TestClustered:
    def test_rows_follow_planted_assignment(self):
        spec = GeneratorSpec(
            kind="clustered", n=9, d=5, k_true=3, noise=0.01, separation=10.0, seed=1
        )
        a = gen_synthetic(spec)
        # row i sits near row i+3 (same planted cluster), far from others
        for i in range(3):
            same = np.linalg.norm(a[i] - a[i + 3])
            other = np.linalg.norm(a[i] - a[(i + 1) % 3])
            assert same < 0.1
            assert other > 1.0


class TestPowerlaw:
    def test_singular_values_match_decay(self):
        spec = GeneratorSpec(kind="powerlaw", n=8, d=8, alpha=1.0, seed=2)
        a = gen_synthetic(spec)
        sigma = np.sqrt(np.sort(gram_eigenvalues(a))[::-1][:8])
        expected = 1.0 / np.arange(1, 9)
        assert np.allclose(sigma, expected, atol=1e-6)


class TestDeterminismAndStreams:
    def test_same_seed_bit_identical(self):
        spec = GeneratorSpec(kind="powerlaw", n=6, d=9, alpha=0.5, seed=7)
        assert np.array_equal(gen_synthetic(spec), gen_synthetic(spec))

    def test_different_seeds_differ(self):
        a = gen_synthetic(GeneratorSpec(kind="powerlaw", n=6, d=9, alpha=0.5, seed=7))
        b = gen_synthetic(GeneratorSpec(kind="powerlaw", n=6, d=9, alpha=0.5, seed=8))
        assert not np.array_equal(a, b)

    def test_kinds_use_distinct_streams(self):
        lr = gen_synthetic(GeneratorSpec(kind="lowrank", n=6, d=9, rank=2, noise=1.0, seed=7))
        cl = gen_synthetic(
            GeneratorSpec(kind="clustered", n=6, d=9, k_true=2, noise=1.0, seed=7)
        )
        assert not np.allclose(lr, cl)


class TestSpecValidation:
    @pytest.mark.parametrize(
        "kw",
        [
            dict(kind="wishart", n=4, d=4),
            dict(kind="lowrank", n=0, d=4, rank=1),
            dict(kind="lowrank", n=4, d=4, rank=9),
            dict(kind="lowrank", n=4, d=4, rank=1, noise=-0.5),
            dict(kind="clustered", n=4, d=4, k_true=9),
            dict(kind="powerlaw", n=4, d=4, alpha=0.0),
        ],
    )
    def test_rejects(self, kw):
        with pytest.raises(ConfigError):
            GeneratorSpec(**kw)


class TestParseSpec:
    def test_round_trip(self):
        spec = parse_generator_spec("powerlaw:n=40,d=200,alpha=1", seed=9)
        assert spec.kind == "powerlaw"
        assert (spec.n, spec.d, spec.alpha, spec.seed) == (40, 200, 1.0, 9)

    def test_lowrank_fields(self):
        spec = parse_generator_spec("lowrank:n=60,d=500,rank=3,noise=0.02,seed=5")
        assert (spec.rank, spec.noise, spec.seed) == (3, 0.02, 5)

    def test_inline_seed_wins(self):
        spec = parse_generator_spec("powerlaw:n=4,d=4,alpha=1,seed=3", seed=9)
        assert spec.seed == 3

    @pytest.mark.parametrize(
        "text",
        [
            "lowrank",  # missing fields
            "powerlaw:n=4",  # missing d
            "powerlaw:n=4,d=x,alpha=1",  # bad int
            "powerlaw:n=4,d=4,alpha=1,bogus=3",  # unknown key
            "powerlaw:n=4,d=4,alpha",  # not key=value
            ":n=4,d=4",  # empty kind
        ],
    )
    def test_rejects_malformed(self, text):
        with pytest.raises(ConfigError):
            parse_generator_spec(text)
