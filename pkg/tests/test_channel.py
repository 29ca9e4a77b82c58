import json
from collections import Counter

import numpy as np
import pytest

from onebit_csit.channel import (
    SupportSet,
    draw_channels,
    draw_supports,
    dump_channels,
    to_angular_domain,
    to_antenna_domain,
)
from onebit_csit.config import ConfigurationError, ScenarioConfig
from onebit_csit.numerics import InvalidDimensionError, RandomSource


@pytest.fixture(scope="module")
def many_supports():
    cfg = ScenarioConfig(M=128, s=10, c=6, K=10)
    rng = RandomSource(2024)
    return cfg, [draw_supports(cfg, rng) for _ in range(10_000)]


class TestDrawSupports:
    def test_structure_on_10000_draws(self, many_supports):
        _, draws = many_supports
        for sup in draws:
            assert 6 <= len(sup.common) <= 7
            inter = frozenset.intersection(*sup.user_supports)
            assert sup.common <= inter
            for s_i in sup.user_supports:
                assert 8 <= len(s_i) <= 10
                assert all(0 <= j < 128 for j in s_i)

    def test_size_frequencies(self, many_supports):
        _, draws = many_supports
        common_sizes = Counter(len(d.common) for d in draws)
        for size in (6, 7):
            assert abs(common_sizes[size] / len(draws) - 0.5) < 0.02
        user_sizes = Counter(len(s) for d in draws for s in d.user_supports[:1])
        for size in (8, 9, 10):
            assert abs(user_sizes[size] / len(draws) - 1 / 3) < 0.02

    def test_no_common_support(self):
        cfg = ScenarioConfig(M=64, s=8, c=0, K=5)
        sup = draw_supports(cfg, RandomSource(0))
        assert sup.common == frozenset()
        assert all(6 <= len(s) <= 8 for s in sup.user_supports)

    def test_infeasible(self):
        with pytest.raises(ConfigurationError):
            draw_supports(ScenarioConfig(M=4, s=3, c=3, K=2), RandomSource(0))

    def test_s_too_small_for_draw(self):
        with pytest.raises(ConfigurationError):
            draw_supports(ScenarioConfig(M=8, s=2, c=0, K=1), RandomSource(0))

    def test_config_rejects_s_above_M(self):
        with pytest.raises(ConfigurationError):
            ScenarioConfig(M=8, s=9, c=0)


class TestDrawChannels:
    def test_support_and_energy(self):
        cfg = ScenarioConfig(M=32, N=3, K=4, s=6, c=2)
        rng = RandomSource(9)
        for _ in range(50):
            sup = draw_supports(cfg, rng)
            ch = draw_channels(sup, cfg, rng)
            for h_a, h, s_i in zip(ch.angular, ch.antenna, sup.user_supports):
                nz_cols = set(np.flatnonzero(np.any(h_a != 0, axis=0)).tolist())
                assert nz_cols == set(s_i)
                # every row shares the same support
                for row in h_a:
                    assert set(np.flatnonzero(row).tolist()) == set(s_i)
                assert abs(np.linalg.norm(h) ** 2 - np.linalg.norm(h_a) ** 2) < 1e-9

    def test_cached_antenna_matches_triple_product(self):
        cfg = ScenarioConfig(M=4, N=2, K=1, s=3, c=0)
        sup = SupportSet((frozenset({1, 3}),), frozenset())
        ch = draw_channels(sup, cfg, RandomSource(11))
        h_a = ch.angular[0]
        # oracle: explicit DFT entries and summation
        a_r = np.array([[np.exp(-2j * np.pi * p * q / 2) / np.sqrt(2) for q in range(2)]
                        for p in range(2)])
        a_t = np.array([[np.exp(-2j * np.pi * p * q / 4) / 2 for q in range(4)] for p in range(4)])
        expected = np.zeros((2, 4), dtype=complex)
        for r in range(2):
            for m in range(4):
                expected[r, m] = sum(a_r[r, p] * h_a[p, q] * np.conj(a_t[m, q])
                                     for p in range(2) for q in range(4))
        assert np.max(np.abs(ch.antenna[0] - expected)) < 1e-12
        assert set(np.flatnonzero(np.any(h_a != 0, axis=0)).tolist()) == {1, 3}

    def test_nonzero_entry_power(self):
        cfg = ScenarioConfig(M=128, N=2, K=1, s=10, c=0)
        rng = RandomSource(77)
        total, count = 0.0, 0
        for _ in range(10_000):
            ch = draw_channels(draw_supports(cfg, rng), cfg, rng)
            nz = ch.angular[0][ch.angular[0] != 0]
            total += np.sum(np.abs(nz) ** 2)
            count += nz.size
        assert abs(total / count - 1.0) < 0.05

    def test_dump_is_json(self):
        cfg = ScenarioConfig(M=8, N=2, K=2, s=4, c=1)
        rng = RandomSource(1)
        ch = draw_channels(draw_supports(cfg, rng), cfg, rng)
        rec = json.loads(dump_channels(ch, cfg))
        assert rec["config"]["M"] == 8
        assert len(rec["angular"]) == 2 and len(rec["angular"][0]) == 16
        re, im = rec["angular"][1][3]
        assert complex(re, im) == ch.angular[1].ravel()[3]


class TestDomainMaps:
    def test_scalar_identity(self):
        assert to_antenna_domain(np.array([[2 - 1j]]), M=1, N=1)[0, 0] == 2 - 1j

    def test_zero(self):
        assert not np.any(to_antenna_domain(np.zeros((2, 8)), M=8, N=2))

    def test_round_trip(self):
        g = np.random.default_rng(3)
        h_a = g.standard_normal((4, 128)) + 1j * g.standard_normal((4, 128))
        h = to_antenna_domain(h_a, M=128, N=4)
        assert np.max(np.abs(to_angular_domain(h, M=128, N=4) - h_a)) < 1e-10

    def test_shape_mismatch(self):
        with pytest.raises(InvalidDimensionError):
            to_antenna_domain(np.zeros((3, 8)), M=8, N=2)
