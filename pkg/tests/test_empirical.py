import math

import numpy as np
import pytest

from tailmax.empirical import (
    EmptySelectionError,
    PseudoSample,
    diagonal_selection,
    dominance_counts,
    empirical_copula,
    empirical_fstar,
    mtd_maximizer,
    pseudo_observations,
)


def _brute_count(sample, q, x):
    return int(np.count_nonzero((sample.u <= x) & (sample.v <= min(q * q / x, 1.0))))


def _brute_maximizer(sample, q):
    """Scan the candidate set point by point."""
    q2 = q * q
    cands = [min(max(c, q2), 1.0) for c in list(sample.u) + [q2 / v for v in sample.v] + [q2, 1.0]]
    counts = [_brute_count(sample, q, x) for x in cands]
    best = max(counts)
    if best == 0:
        # the whole range ties, q itself included
        return 0, q
    winners = sorted({x for x, c in zip(cands, counts) if c == best})
    return best, min(winners, key=lambda x: (abs(math.log(x) - math.log(q)), x))


class TestPseudoObservations:
    def test_ranks(self):
        s = pseudo_observations([3, 1, 2], [10, 30, 20])
        np.testing.assert_allclose(s.u, [0.75, 0.25, 0.5])
        np.testing.assert_allclose(s.v, [0.25, 0.75, 0.5])

    def test_ties_first_occurrence(self):
        s = pseudo_observations([1, 1, 2], [1, 2, 3])
        np.testing.assert_allclose(s.u, [0.25, 0.5, 0.75])

    def test_monotone_invariance(self):
        rng = np.random.default_rng(3)
        x, y = rng.normal(size=(2, 200))
        a = pseudo_observations(x, y)
        b = pseudo_observations(np.exp(x), y**3)
        np.testing.assert_array_equal(a.u, b.u)
        np.testing.assert_array_equal(a.v, b.v)

    def test_independent_normals(self):
        rng = np.random.default_rng(11)
        x, y = rng.standard_normal((2, 10_000))
        assert empirical_copula(pseudo_observations(x, y), 0.5, 0.5) == pytest.approx(0.25, abs=0.02)

    @pytest.mark.parametrize("x,y", [([1, 2], [1]), ([1, np.nan], [1, 2]), ([1], [1])])
    def test_bad_input(self, x, y):
        with pytest.raises(ValueError):
            pseudo_observations(x, y)


class TestEmpiricalCopula:
    def test_corners(self):
        s = pseudo_observations(np.arange(7.0), np.arange(7.0)[::-1])
        assert empirical_copula(s, 1, 1) == 1
        assert empirical_copula(s, 0, 0) == 0

    def test_four_points(self):
        s = PseudoSample.from_pairs([(0.2, 0.4), (0.4, 0.2), (0.6, 0.8), (0.8, 0.6)])
        assert empirical_copula(s, 0.5, 0.5) == 0.5


class TestMaximizer:
    def test_comonotone(self):
        n, q = 99, 0.2
        t = np.arange(1, n + 1) / (n + 1)
        sel = mtd_maximizer(PseudoSample(t, t.copy()), q)
        assert abs(sel.phi_star_n - q) <= 1.0 / (n + 1)
        assert sel.m_q == int(np.count_nonzero(t <= q))

    def test_tie_example(self):
        s = PseudoSample.from_pairs([(0.05, 0.9), (0.9, 0.05), (0.04, 0.04)])
        sel = mtd_maximizer(s, 0.2)
        best, x = _brute_maximizer(s, 0.2)
        assert best == sel.m_q == 1
        assert sel.phi_star_n == x
        assert list(sel.member_indices) == [2]

    def test_empty_rectangle(self):
        s = PseudoSample.from_pairs([(0.5, 0.5), (0.9, 0.3)])
        sel = mtd_maximizer(s, 0.1)
        assert sel.m_q == 0
        assert sel.member_indices.size == 0
        assert sel.phi_star_n == 0.1

    @pytest.mark.parametrize("seed", range(25))
    def test_brute_force_small_samples(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 51))
        z = rng.multivariate_normal([0, 0], [[1, 0.6], [0.6, 1]], size=n)
        s = pseudo_observations(z[:, 0], z[:, 1])
        q = float(rng.uniform(0.05, 0.6))
        sel = mtd_maximizer(s, q)
        best, x = _brute_maximizer(s, q)
        assert sel.m_q == best
        assert sel.phi_star_n == pytest.approx(x, rel=1e-15)
        # dense log grid never beats the exact maximum
        grid = np.exp(np.linspace(2 * math.log(q), 0, 4001))
        assert max(_brute_count(s, q, g) for g in grid) <= best
        assert _brute_count(s, q, sel.phi_star_n) == best

    def test_members_and_scaling(self):
        rng = np.random.default_rng(5)
        s = pseudo_observations(*rng.standard_normal((2, 3000)))
        sel = mtd_maximizer(s, 0.15)
        x, y = sel.phi_star_n, 0.15**2 / sel.phi_star_n
        inside = np.flatnonzero((s.u <= x) & (s.v <= y))
        np.testing.assert_array_equal(sel.member_indices, inside)
        assert np.all((sel.u_tilde > 0) & (sel.u_tilde <= 1) & (sel.v_tilde > 0) & (sel.v_tilde <= 1))
        assert sel.pi_star_n == sel.m_q / s.n

    def test_count_monotone_in_q(self):
        rng = np.random.default_rng(9)
        s = pseudo_observations(*rng.standard_normal((2, 2000)))
        counts = [mtd_maximizer(s, q).m_q for q in (0.02, 0.05, 0.1, 0.2, 0.5, 1.0)]
        assert counts == sorted(counts)
        assert counts[-1] == s.n

    def test_at_least_diagonal_count(self):
        rng = np.random.default_rng(2)
        s = pseudo_observations(*rng.standard_normal((2, 1000)))
        for q in (0.05, 0.1, 0.3):
            assert mtd_maximizer(s, q).m_q >= diagonal_selection(s, q).n_q

    @pytest.mark.parametrize("q", [0.0, -0.1, 1.5])
    def test_bad_q(self, q):
        with pytest.raises(ValueError):
            mtd_maximizer(PseudoSample.from_pairs([(0.5, 0.5)]), q)


class TestDiagonal:
    def test_example(self):
        s = PseudoSample.from_pairs([(0.01, 0.02), (0.05, 0.04), (0.5, 0.5)])
        d = diagonal_selection(s, 0.1)
        assert d.n_q == 2
        np.testing.assert_allclose(d.w_values, [5.0, 2.0])

    def test_boundary_member(self):
        d = diagonal_selection(PseudoSample.from_pairs([(0.1, 0.1)]), 0.1)
        assert d.n_q == 1 and d.w_values[0] == 1.0

    def test_none_inside(self):
        assert diagonal_selection(PseudoSample.from_pairs([(0.5, 0.2)]), 0.1).n_q == 0


class TestFstar:
    def _selection(self, pairs):
        s = PseudoSample.from_pairs(pairs)
        return mtd_maximizer(s, 1.0)

    def test_corner_and_self_inclusion(self):
        rng = np.random.default_rng(0)
        s = pseudo_observations(*rng.standard_normal((2, 500)))
        sel = mtd_maximizer(s, 0.3)
        assert empirical_fstar(sel, 1, 1) == 1
        k = 3
        assert empirical_fstar(sel, sel.u_tilde[k], sel.v_tilde[k]) >= 1 / sel.m_q

    def test_two_members(self):
        sel = self._selection([(0.5, 1.0), (1.0, 0.5)])
        np.testing.assert_allclose(sel.scaled_pairs, [(0.5, 1.0), (1.0, 0.5)])
        assert empirical_fstar(sel, 0.75, 0.75) == 0

    def test_empty(self):
        sel = mtd_maximizer(PseudoSample.from_pairs([(0.9, 0.9)]), 0.1)
        with pytest.raises(EmptySelectionError):
            empirical_fstar(sel, 0.5, 0.5)


@pytest.mark.parametrize("n,block", [(1, 4), (37, 4), (600, 64), (1000, 512)])
def test_dominance_counts_brute_force(n, block):
    rng = np.random.default_rng(n)
    # coarse values force ties in both coordinates
    x = rng.integers(0, 15, n) / 15.0
    y = rng.integers(0, 15, n) / 15.0
    expected = ((x[None, :] <= x[:, None]) & (y[None, :] <= y[:, None])).sum(axis=1)
    np.testing.assert_array_equal(dominance_counts(x, y, block=block), expected)
