"""Plug-in estimators from one observed network.

All pair sums run over ordered pairs with i != j (N = n(n-1) pairs); the
inner sums of the cell statistics run over every agent k, relying on the zero
diagonal to suppress degenerate terms.  Cell quantities are indexed by the
covariate support order.  The variance estimator is built from per-agent
influence terms: each agent's term depends only on that agent's row of the
adjacency matrix, which is what makes the across-agent covariance a valid
variance estimate for the moment vector.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateVariance, EmptyCell
from .misclassification import correction_maps
from .model import CovariateSupport, Network, PairCovariates, Theta
from .normal import norm_cdf, norm_pdf

__all__ = [
    "Dataset",
    "CellEstimates",
    "cell_estimates",
    "moment",
    "stat_influence",
    "stat_influence_all",
    "moment_variance",
    "quadratic_form",
    "moment_statistic",
    "MomentEvaluator",
]

MIN_VARIANCE_EIGENVALUE = 1e-10
MAX_CONDITION_NUMBER = 1e12


@dataclass(frozen=True)
class Dataset:
    """Observed network, pair covariates, and the covariate support."""

    network: Network
    covariates: PairCovariates
    support: CovariateSupport

    def __post_init__(self):
        if self.covariates.n != self.network.n:
            raise ValueError("covariate assignment and network sizes differ")
        if int(self.covariates.assignment.max()) >= self.support.n_points:
            raise ValueError("assignment references a cell outside the support")

    @property
    def n(self) -> int:
        return self.network.n

    @property
    def n_cells(self) -> int:
        return self.support.n_points

    @property
    def n_pairs(self) -> int:
        return self.n * (self.n - 1)


@dataclass(frozen=True)
class CellEstimates:
    """Cell frequencies and cell-averaged link statistics.

    freq[j]  share of ordered pairs assigned to support point j
    stats[j] cell average of (reciprocal link, in-degree, common in-neighbor
             count, combined in-degree), each inner average scaled by 1/n
    counts[j] raw pair count of the cell
    """

    freq: np.ndarray  # (J,)
    stats: np.ndarray  # (J, 4)
    counts: np.ndarray  # (J,)


def _offdiag_mask(n: int) -> np.ndarray:
    mask = np.ones((n, n), dtype=bool)
    np.fill_diagonal(mask, False)
    return mask


def _pair_stats(adj: np.ndarray) -> np.ndarray:
    """Per-pair observed 4-vector, shape (n, n, 4)."""
    g = adj.astype(float)
    n = g.shape[0]
    col = g.sum(axis=0)
    recip = g.T
    in_deg = np.broadcast_to(col[None, :] / n, (n, n))
    common = (g.T @ g) / n
    deg_sum = (col[:, None] + col[None, :]) / n
    return np.stack([recip, in_deg, common, deg_sum], axis=-1)


def cell_estimates(data: Dataset) -> CellEstimates:
    """Cell frequencies and cell-averaged statistics; raises on empty cells."""
    n, J = data.n, data.n_cells
    labels = data.covariates.assignment
    off = _offdiag_mask(n)
    counts = np.bincount(labels[off], minlength=J).astype(float)
    for j in range(J):
        if counts[j] == 0:
            raise EmptyCell(j)
    freq = counts / data.n_pairs
    pair = _pair_stats(data.network.adj)
    stats = np.empty((J, 4))
    flat_labels = labels[off]
    for comp in range(4):
        sums = np.bincount(flat_labels, weights=pair[..., comp][off], minlength=J)
        stats[:, comp] = sums / counts
    return CellEstimates(freq=freq, stats=stats, counts=counts)


def _cell_indices(cells: CellEstimates, support: CovariateSupport, theta: Theta) -> np.ndarray:
    """Corrected utility index per cell, shape (J,)."""
    cm = correction_maps(theta.fp_rate, theta.fn_rate)
    corrected = cells.stats @ cm.matrix.T + cm.offset  # (J, 3)
    return corrected @ theta.externality + support.points @ theta.homophily


def moment(data: Dataset, theta: Theta, cells: CellEstimates | None = None) -> np.ndarray:
    """Sample moment vector, one coordinate per covariate cell.

    m_j averages G_ij - r0 - (1 - r0 - r1) * Phi(corrected index) over the
    pairs of cell j, scaled by the cell share, so each |m_j| <= freq[j].
    """
    if cells is None:
        cells = cell_estimates(data)
    n = data.n
    labels = data.covariates.assignment
    off = _offdiag_mask(n)
    u = _cell_indices(cells, data.support, theta)
    lam = 1.0 - theta.fp_rate - theta.fn_rate
    fitted = theta.fp_rate + lam * norm_cdf(u)
    link_sums = np.bincount(
        labels[off], weights=data.network.adj[off].astype(float), minlength=data.n_cells
    )
    return (link_sums - cells.counts * fitted) / data.n_pairs


def stat_influence(data: Dataset, agent: int, cell: int, cells: CellEstimates) -> np.ndarray:
    """Agent's influence on the cell-averaged statistics, one (agent, cell) pair.

    The first component collects the agent's links over pairs whose second
    index is the agent, scaled by n over the cell count; the remaining three
    are cell averages of the agent's contributions to the inner sums.  By
    construction the agent average of these terms reproduces the cell
    statistics exactly: mean_k stat_influence(k, j) == cells.stats[j].
    """
    if cells.counts[cell] == 0:
        raise EmptyCell(cell)
    n = data.n
    g = data.network.adj.astype(float)
    labels = data.covariates.assignment
    mask = (labels == cell) & _offdiag_mask(n)
    m_count = cells.counts[cell]
    row = g[agent]
    col_count = mask.sum(axis=0).astype(float)  # pairs per second index
    row_count = mask.sum(axis=1).astype(float)  # pairs per first index
    comp2 = (col_count @ row) / m_count
    comp3 = (row @ mask @ row) / m_count
    comp4 = ((row_count + col_count) @ row) / m_count
    comp1 = n * (mask[:, agent] @ row) / m_count
    return np.array([comp1, comp2, comp3, comp4])


def stat_influence_all(data: Dataset, cells: CellEstimates) -> np.ndarray:
    """Influence terms for every (agent, cell), shape (n, J, 4)."""
    n, J = data.n, data.n_cells
    g = data.network.adj.astype(float)
    labels = data.covariates.assignment
    off = _offdiag_mask(n)
    out = np.empty((n, J, 4))
    for j in range(J):
        mask = ((labels == j) & off).astype(float)
        m_count = cells.counts[j]
        col_count = mask.sum(axis=0)
        row_count = mask.sum(axis=1)
        out[:, j, 0] = n * (mask.T * g).sum(axis=1) / m_count
        out[:, j, 1] = (g @ col_count) / m_count
        out[:, j, 2] = np.einsum("ki,ij,kj->k", g, mask, g) / m_count
        out[:, j, 3] = (g @ (row_count + col_count)) / m_count
    return out


def _agent_link_shares(data: Dataset) -> np.ndarray:
    """First influence term: (1/n) sum_{j != i} G_ij per cell, shape (n, J)."""
    n, J = data.n, data.n_cells
    g = data.network.adj.astype(float)
    labels = data.covariates.assignment
    off = _offdiag_mask(n)
    out = np.empty((n, J))
    for j in range(J):
        out[:, j] = (g * ((labels == j) & off)).sum(axis=1) / n
    return out


def _psi_matrix(
    link_shares: np.ndarray,
    influences: np.ndarray,
    cells: CellEstimates,
    support: CovariateSupport,
    theta: Theta,
    n: int,
) -> np.ndarray:
    """Per-agent moment influence vectors, shape (n, J)."""
    cm = correction_maps(theta.fp_rate, theta.fn_rate)
    u = _cell_indices(cells, support, theta)
    lam = 1.0 - theta.fp_rate - theta.fn_rate
    weights = norm_pdf(u) * cells.counts / (n * n)  # (J,)
    slope = cm.matrix.T @ theta.externality  # (4,)
    correction = (influences @ slope) * weights[None, :]  # (n, J)
    return link_shares - lam * correction


def _covariance_of(psi: np.ndarray, n: int, min_eigenvalue: float) -> np.ndarray:
    centered = psi - psi.mean(axis=0)
    S = centered.T @ centered / n
    S = 0.5 * (S + S.T)
    eigs = np.linalg.eigvalsh(S)
    if eigs[0] < min_eigenvalue:
        raise DegenerateVariance(
            f"smallest variance eigenvalue {eigs[0]:.3e} below {min_eigenvalue:.1e}"
        )
    return S


def moment_variance(
    data: Dataset,
    theta: Theta,
    cells: CellEstimates | None = None,
    min_eigenvalue: float = MIN_VARIANCE_EIGENVALUE,
) -> np.ndarray:
    """Across-agent covariance of the influence vectors, shape (J, J).

    Raises :class:`DegenerateVariance` when the smallest eigenvalue falls
    below ``min_eigenvalue``, which signals that the eigenvalue condition for
    the chi-square calibration fails in this sample.
    """
    if cells is None:
        cells = cell_estimates(data)
    psi = _psi_matrix(
        _agent_link_shares(data),
        stat_influence_all(data, cells),
        cells,
        data.support,
        theta,
        data.n,
    )
    return _covariance_of(psi, data.n, min_eigenvalue)


def quadratic_form(m: np.ndarray, S: np.ndarray, n: int) -> float:
    """n * m' S^{-1} m via a linear solve; rejects ill-conditioned S."""
    cond = np.linalg.cond(S)
    if not np.isfinite(cond) or cond > MAX_CONDITION_NUMBER:
        raise DegenerateVariance(f"variance condition number {cond:.3e} too large")
    value = float(n * (m @ np.linalg.solve(S, m)))
    return max(value, 0.0)


def moment_statistic(data: Dataset, theta: Theta, cells: CellEstimates | None = None) -> float:
    """Quadratic-form statistic of the moment vector at ``theta``."""
    if cells is None:
        cells = cell_estimates(data)
    m = moment(data, theta, cells)
    S = moment_variance(data, theta, cells)
    return quadratic_form(m, S, data.n)


class MomentEvaluator:
    """Caches the parameter-free pieces for repeated evaluation over a grid.

    Cell estimates, per-agent link shares and the statistic influence terms
    do not depend on the parameter point, so a grid search only pays for the
    probit index, the influence contraction and a J x J eigendecomposition
    per point.
    """

    def __init__(self, data: Dataset):
        self.data = data
        self.cells = cell_estimates(data)
        self._link_shares = _agent_link_shares(data)
        self._influences = stat_influence_all(data, self.cells)
        off = _offdiag_mask(data.n)
        self._link_sums = np.bincount(
            data.covariates.assignment[off],
            weights=data.network.adj[off].astype(float),
            minlength=data.n_cells,
        )

    def moment(self, theta: Theta) -> np.ndarray:
        u = _cell_indices(self.cells, self.data.support, theta)
        lam = 1.0 - theta.fp_rate - theta.fn_rate
        fitted = theta.fp_rate + lam * norm_cdf(u)
        return (self._link_sums - self.cells.counts * fitted) / self.data.n_pairs

    def variance(self, theta: Theta) -> np.ndarray:
        psi = _psi_matrix(
            self._link_shares,
            self._influences,
            self.cells,
            self.data.support,
            theta,
            self.data.n,
        )
        return _covariance_of(psi, self.data.n, MIN_VARIANCE_EIGENVALUE)

    def statistic(self, theta: Theta) -> float:
        return quadratic_form(self.moment(theta), self.variance(theta), self.data.n)
