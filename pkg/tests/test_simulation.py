import math

import numpy as np
import pytest
from scipy import stats
from scipy.special import ndtr

import tailmax.simulation as simulation
from tailmax.copulas import GeneralizedClayton, MarshallOlkin, copula_value
from tailmax.simulation import (
    ReplicationError,
    SimConfig,
    ar1_series,
    gc_pair_series,
    lomax_sample,
    replication_seeds,
    run_replication,
    sample_marshall_olkin,
    simulation_study,
)


class TestAr1:
    def test_white_noise(self):
        z = ar1_series(0.0, 1_000_000, 1)
        assert z.var() == pytest.approx(1.0, rel=0.01)

    def test_stationary_moments(self):
        z = ar1_series(0.6, 1_000_000, 2)
        assert SimConfig(0.4, 0.2, 0.1).sigma == pytest.approx(1.25, abs=1e-15)
        assert z.std() == pytest.approx(1.25, rel=0.01)
        lag1 = np.mean((z[1:] - z.mean()) * (z[:-1] - z.mean()))
        assert lag1 == pytest.approx(0.6 / (1 - 0.36), rel=0.02)

    def test_first_value_is_stationary(self):
        first = np.array([ar1_series(0.9, 2, s)[0] for s in range(4000)])
        assert first.std() == pytest.approx(1 / math.sqrt(1 - 0.81), rel=0.05)

    def test_bad_coefficient(self):
        with pytest.raises(ValueError):
            ar1_series(1.0, 10, 0)


class TestLomax:
    def test_inverse_cdf_values(self):
        assert lomax_sample(1.0, 1.0, 0.0) == 0.0
        assert lomax_sample(1.0, 1.0, 0.5) == pytest.approx(1.0, abs=1e-15)

    def test_survival(self):
        rng = np.random.default_rng(4)
        z = lomax_sample(2.0, 1.0, rng.random(1_000_000))
        assert np.mean(z > 1.0) == pytest.approx(0.25, rel=0.01)


def _gaussian_quadrature_lag_corr(rho, order=80):
    # corr(Phi(A), Phi(B)) for standard normals with corr rho, by Gauss-Hermite
    x, w = np.polynomial.hermite_e.hermegauss(order)
    w = w / w.sum()
    a = x[:, None]
    b = rho * x[:, None] + math.sqrt(1 - rho * rho) * x[None, :]
    e = np.sum(w[:, None] * w[None, :] * ndtr(a) * ndtr(b))
    return (e - 0.25) * 12.0


class TestGcSampler:
    def test_clayton_against_closed_form(self):
        u, v = gc_pair_series(0.4, 0.0, 1_000_000, 0.0, 7)
        emp = np.mean((u <= 0.5) & (v <= 0.5))
        assert emp == pytest.approx(copula_value(GeneralizedClayton(0.4, 0.0), 0.5, 0.5), abs=0.005)

    @pytest.mark.parametrize("g0,g1", [(0.1, 0.8), (0.4, 0.8), (0.4, 0.2)])
    def test_joint_law_and_margins(self, g0, g1):
        u, v = gc_pair_series(g0, g1, 1_000_000, 0.6, 8)
        model = GeneralizedClayton(g0, g1)
        for a, b in [(0.5, 0.5), (0.1, 0.3), (0.8, 0.2)]:
            emp = np.mean((u <= a) & (v <= b))
            assert emp == pytest.approx(copula_value(model, a, b), abs=0.005)
        for margin in (u, v):
            s = np.sort(margin)
            grid = np.arange(1, s.size + 1) / s.size
            assert np.max(np.abs(grid - s)) <= 0.005

    def test_latent_lag_correlation(self):
        _, v = gc_pair_series(0.4, 0.8, 1_000_000, 0.6, 9)
        emp = np.corrcoef(v[1:], v[:-1])[0, 1]
        assert emp == pytest.approx(_gaussian_quadrature_lag_corr(0.6), abs=0.02)
        # the quadrature agrees with the rank-correlation identity
        assert _gaussian_quadrature_lag_corr(0.6) == pytest.approx(6 / math.pi * math.asin(0.3), abs=1e-8)

    def test_matches_conditional_inverse_sampler(self):
        theta = 1 / 0.4
        rng = np.random.default_rng(10)
        v = rng.random(20_000)
        w = rng.random(20_000)
        u = ((w ** (-theta / (1 + theta)) - 1) * v ** (-theta) + 1) ** (-1 / theta)
        u2, v2 = gc_pair_series(0.4, 0.0, 20_000, 0.0, 11)
        assert stats.ks_2samp(u * v, u2 * v2).pvalue > 0.001
        assert stats.ks_2samp(np.minimum(u, v), np.minimum(u2, v2)).pvalue > 0.001

    def test_seeded(self):
        a = gc_pair_series(0.4, 0.2, 1000, 0.6, 3)
        b = gc_pair_series(0.4, 0.2, 1000, 0.6, 3)
        np.testing.assert_array_equal(a[0], b[0])
        np.testing.assert_array_equal(a[1], b[1])


@pytest.mark.parametrize("a,b", [(0.5, 0.5), (1.0, 0.5), (0.3, 0.9)])
def test_marshall_olkin_sampler(a, b):
    u, v = sample_marshall_olkin(a, b, 500_000, 12)
    model = MarshallOlkin(a, b)
    for x, y in [(0.5, 0.5), (0.2, 0.7), (0.05, 0.1)]:
        assert np.mean((u <= x) & (v <= y)) == pytest.approx(copula_value(model, x, y), abs=0.004)


class TestStudy:
    def test_config_validation(self):
        with pytest.raises(ValueError):
            SimConfig(0.4, 0.2, 0.0)
        with pytest.raises(ValueError):
            SimConfig(0.4, 0.2, 0.1, phi=1.0)
        with pytest.raises(ValueError):
            SimConfig(-0.4, 0.2, 0.1)

    def test_seed_streams_differ(self):
        d0, g0 = replication_seeds(0, 0)
        d1, g1 = replication_seeds(0, 1)
        assert g0 != g1
        assert d0.generate_state(2).tolist() != d1.generate_state(2).tolist()
        assert replication_seeds(0, 0)[1] == g0

    def test_single_replication_has_no_sd(self):
        row = simulation_study(SimConfig(0.4, 0.2, 0.1, n=5000, replications=1), workers=1)
        assert row.stdev is None
        assert row.replication_estimates == [run_replication(row_config(row), 0)]

    def test_worker_count_invariance(self):
        cfg = SimConfig(0.4, 0.8, 0.1, n=5000, replications=5, seed=42)
        one = simulation_study(cfg, workers=1)
        two = simulation_study(cfg, workers=2)
        assert one.replication_estimates == two.replication_estimates
        assert one.mean == two.mean and one.stdev == two.stdev

    def test_failure_carries_index(self, monkeypatch):
        def boom(*args, **kwargs):
            raise FloatingPointError("bad draw")

        monkeypatch.setattr(simulation, "gc_pair_series", boom)
        with pytest.raises(ReplicationError) as info:
            run_replication(SimConfig(0.4, 0.2, 0.1, n=100), 3)
        assert info.value.index == 3

    def test_env_threads(self, monkeypatch):
        monkeypatch.setenv("TAILMAX_THREADS", "3")
        assert simulation.resolve_workers() == 3
        assert simulation.resolve_workers(2) == 2


def row_config(row):
    return SimConfig(**row.config)
