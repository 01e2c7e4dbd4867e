import numpy as np
import pytest
from scipy.stats import chi2

from tailmax.portmanteau import PortmanteauKind, portmanteau_suite
from tailmax.simulation import ar1_series


def _reference_stats(x, lag):
    """Loop-based versions of the five statistics at one lag."""
    x = x - x.mean(axis=0)
    n, k = x.shape

    def gamma(h):
        return sum(np.outer(x[t], x[t - h]) for t in range(h, n)) / n

    g0i = np.linalg.inv(gamma(0))
    tr = [np.trace(gamma(h).T @ g0i @ gamma(h) @ g0i) for h in range(1, lag + 1)]
    bp = n * sum(tr)
    lb = n * (n + 2) * sum(t / (n - h) for h, t in enumerate(tr, start=1))
    hk = n * n * sum(t / (n - h) for h, t in enumerate(tr, start=1))
    lm = bp + k * k * lag * (lag + 1) / (2 * n)
    # whitened autocorrelations W G_h W' with G_0 = C C', W = C^{-1}, so R(0) = I
    d = np.linalg.inv(np.linalg.cholesky(gamma(0)))
    blocks = [[None] * (lag + 1) for _ in range(lag + 1)]
    for i in range(lag + 1):
        for j in range(lag + 1):
            g = gamma(i - j) if i >= j else gamma(j - i).T
            blocks[i][j] = d @ g @ d.T
    R = np.block(blocks)
    mm = -3 * n / (2 * lag + 1) * np.log(np.linalg.det(R))
    return {"BoxPierceMV": bp, "LjungBoxMV": lb, "Hosking": hk, "LiMcLeod": lm, "MahdiMcLeod": mm}


def test_matches_reference_loops():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((120, 2)) + [3.0, -1.0]
    report = portmanteau_suite(x, max_lag=6)
    for lag in (1, 4, 6):
        ref = _reference_stats(x, lag)
        for r in report.results:
            if r.lag == lag:
                assert r.statistic == pytest.approx(ref[r.test_kind.value], rel=1e-9)


def test_degrees_of_freedom_and_p_values():
    x = np.random.default_rng(1).standard_normal((200, 2))
    report = portmanteau_suite(x, max_lag=4)
    for r in report.results:
        if r.test_kind is PortmanteauKind.MAHDI_MCLEOD:
            assert r.df == pytest.approx(3 * 4 * r.lag * (r.lag + 1) / (2 * (2 * r.lag + 1)))
        else:
            assert r.df == 4 * r.lag
        assert r.p_value == pytest.approx(chi2.sf(r.statistic, r.df))
    assert len(report.results) == 5 * 4
    assert report.p_value("Hosking", 2) == next(
        r.p_value for r in report.results if r.test_kind is PortmanteauKind.HOSKING and r.lag == 2
    )


def test_retained_percentages():
    x = np.random.default_rng(2).standard_normal((300, 2))
    report = portmanteau_suite(x, max_lag=10)
    keep = [r.p_value > 0.05 for r in report.results]
    assert report.retained_pct_pooled == pytest.approx(100 * np.mean(keep))
    assert set(report.retained_pct_by_test) == {k.value for k in PortmanteauKind}


def test_hosking_size():
    rng = np.random.default_rng(3)
    rejects = sum(
        portmanteau_suite(rng.standard_normal((500, 2)), 10).p_value("Hosking", 10) < 0.05
        for _ in range(300)
    )
    assert 0.02 <= rejects / 300 <= 0.09


def test_power_against_ar1():
    for s in range(20):
        x = np.column_stack([ar1_series(0.9, 500, 2 * s), ar1_series(0.9, 500, 2 * s + 1)])
        report = portmanteau_suite(x, 5)
        for kind in PortmanteauKind:
            assert report.p_value(kind, 1) < 0.001


def test_errors():
    with pytest.raises(np.linalg.LinAlgError):
        portmanteau_suite(np.ones((200, 2)), 5)
    with pytest.raises(ValueError):
        portmanteau_suite(np.random.default_rng(0).standard_normal((40, 2)), 10)
    with pytest.raises(ValueError):
        portmanteau_suite(np.zeros(100), 2)
