"""Bound and rank conditions of the relaxed identified set."""

import numpy as np

from misnet import (
    CellSummary,
    Dataset,
    Network,
    PairCovariates,
    Theta,
    ThetaGrid,
    cell_summary,
    identified_set,
    membership,
)
from misnet.normal import norm_cdf

from conftest import default_theta, random_dataset, scalar_support
from oracles import isotonic_sse


def theta_with_rates(fp, fn, d=1):
    return Theta(externality=[0.5, 0.25, 0.25], homophily=np.full(d, 0.8), fp_rate=fp, fn_rate=fn)


class TestMembership:
    def test_fp_bound_violation(self):
        summary = CellSummary(means=[0.2, 0.6], indices=[-1.0, 1.0])
        result = membership(summary, theta_with_rates(0.3, 0.0))
        assert not result.member
        kinds = {v.condition for v in result.violations}
        assert kinds == {"fp_bound"}
        assert result.violations[0].cells == (0,)

    def test_fn_bound_violation(self):
        summary = CellSummary(means=[0.5, 0.9], indices=[-1.0, 1.0])
        result = membership(summary, theta_with_rates(0.0, 0.2))
        assert not result.member
        assert {v.condition for v in result.violations} == {"fn_bound"}

    def test_single_cell_reduces_to_bounds(self):
        summary = CellSummary(means=[0.4], indices=[0.7])
        assert membership(summary, theta_with_rates(0.3, 0.5)).member
        assert not membership(summary, theta_with_rates(0.5, 0.0)).member
        assert not membership(summary, theta_with_rates(0.0, 0.7)).member

    def test_flat_means_make_rank_condition_vacuous(self):
        summary = CellSummary(means=[0.5, 0.5, 0.5], indices=[3.0, -2.0, 0.0])
        assert membership(summary, theta_with_rates(0.2, 0.2)).member

    def test_rank_violation_names_cell_pair(self):
        summary = CellSummary(means=[0.7, 0.3], indices=[-1.0, 1.0])
        result = membership(summary, theta_with_rates(0.1, 0.1))
        assert not result.member
        rank = [v for v in result.violations if v.condition == "rank"]
        assert rank and rank[0].cells == (0, 1)

    def test_equal_indices_with_unequal_means_violate(self):
        summary = CellSummary(means=[0.3, 0.6], indices=[0.5, 0.5])
        result = membership(summary, theta_with_rates(0.1, 0.1))
        assert not result.member
        assert any(v.condition == "rank" for v in result.violations)

    def test_monotone_configuration_is_member(self):
        summary = CellSummary(means=[0.2, 0.5, 0.8], indices=[-1.0, 0.0, 2.0])
        assert membership(summary, theta_with_rates(0.1, 0.1)).member


class TestIsotonicEquivalence:
    def test_rank_condition_iff_exact_isotonic_fit(self, rng):
        """The pairwise rank condition is equivalent to a zero-error
        monotone regression of means on indices."""
        theta = theta_with_rates(0.0, 0.0)
        for _ in range(200):
            J = int(rng.integers(2, 6))
            means = np.round(rng.random(J), 3)
            indices = np.round(rng.standard_normal(J), 2)
            if rng.random() < 0.3:
                indices[rng.integers(0, J)] = indices[rng.integers(0, J)]  # force ties
            summary = CellSummary(means=means, indices=indices)
            result = membership(summary, theta)
            rank_ok = not any(v.condition == "rank" for v in result.violations)
            sse = isotonic_sse(indices, means)
            assert rank_ok == (sse <= 1e-12), (means, indices, sse)

    def test_positive_scaling_of_weights_preserves_verdict(self, rng):
        data = random_dataset(rng, n=12, n_cells=3)
        theta = default_theta()
        for lam in (0.5, 2.0, 10.0):
            scaled = Theta(
                externality=lam * theta.externality,
                homophily=lam * theta.homophily,
                fp_rate=theta.fp_rate,
                fn_rate=theta.fn_rate,
            )
            base = membership(cell_summary(data, theta), theta)
            other = membership(cell_summary(data, scaled), scaled)
            base_rank = any(v.condition == "rank" for v in base.violations)
            other_rank = any(v.condition == "rank" for v in other.violations)
            assert base_rank == other_rank


class TestPopulationLogic:
    def test_truth_is_member_on_population_cells(self):
        """Cell means built from the probit law at theta0 satisfy all
        conditions at theta0."""
        theta0 = theta_with_rates(0.05, 0.10)
        indices = np.array([-0.8, -0.1, 0.4, 1.2])
        lam = 1 - theta0.fp_rate - theta0.fn_rate
        means = theta0.fp_rate + lam * norm_cdf(indices)
        summary = CellSummary(means=means, indices=indices)
        assert membership(summary, theta0).member

    def test_moment_zero_implies_membership(self):
        """Any parameter reproducing the cell means through the probit form
        passes the bound and rank checks."""
        for fp, fn in [(0.0, 0.0), (0.1, 0.2), (0.3, 0.1)]:
            theta = theta_with_rates(fp, fn)
            indices = np.linspace(-1.5, 1.5, 5)
            lam = 1 - fp - fn
            means = fp + lam * norm_cdf(indices)
            assert membership(CellSummary(means=means, indices=indices), theta).member


class TestIdentifiedSet:
    def test_flat_network_reduces_to_rate_bounds(self, rng):
        """A data set whose cells all have mean one half accepts exactly the
        grid points with both rates at or below one half.

        A tournament (exactly one direction linked per unordered pair) with
        label symmetric in (i, j) puts both directions in the same cell, so
        every cell mean is exactly one half.
        """
        n = 10
        adj = np.zeros((n, n), dtype=int)
        adj[np.triu_indices(n, 1)] = 1
        idx = np.arange(n)
        labels = (idx[:, None] + idx[None, :]) % 2
        data = Dataset(
            network=Network(adj),
            covariates=PairCovariates(labels),
            support=scalar_support(-0.5, 0.5),
        )
        means = cell_summary(data, theta_with_rates(0.0, 0.0)).means
        assert np.allclose(means, 0.5)
        grid = ThetaGrid(
            externality_axes=([0.0], [0.0], [0.0]),
            homophily_axes=([0.0],),
            fp_axis=[0.1, 0.4, 0.6],
            fn_axis=[0.1, 0.4, 0.6],
        )
        results = identified_set(data, grid)
        for theta, res in results:
            expected = theta.fp_rate <= 0.5 and theta.fn_rate <= 0.5
            assert res.member == expected

    def test_grid_results_align_with_membership(self, rng):
        data = random_dataset(rng, n=12, n_cells=2)
        grid = ThetaGrid(
            externality_axes=([0.0, 0.5], [0.25], [0.25]),
            homophily_axes=([0.8],),
            fp_axis=[0.0, 0.1],
            fn_axis=[0.1],
        )
        results = identified_set(data, grid)
        assert len(results) == len(grid)
        for theta, res in results:
            again = membership(cell_summary(data, theta), theta)
            assert again.member == res.member
