"""Link misclassification: the flip mechanism and its correction algebra.

A recorded link differs from the latent one with probability fp_rate when the
latent link is absent and fn_rate when it is present, independently across
ordered pairs.  The correction algebra maps the four observed expected
statistics back to the three latent ones through an affine map whose 4x4
forward matrix has the closed-form inverse implemented here.
"""

from dataclasses import dataclass

import numpy as np

from .equilibrium import BeliefMatrix, extended_stats_from_beliefs
from .model import BeliefStats, Network, validate_rates

__all__ = [
    "CorrectionMaps",
    "correction_maps",
    "apply_misclassification",
    "true_beliefs_from_observed",
    "observed_beliefs_from_true",
    "pair_belief_stats",
]


@dataclass(frozen=True)
class CorrectionMaps:
    """Affine correction for one (fp_rate, fn_rate) point.

    true_stats = offset + matrix @ observed_stats, and the forward direction
    observed_stats = shift + forward @ true_stats_ext, where the extended true
    vector carries the combined in-degree component.
    """

    offset: np.ndarray  # (3,)
    matrix: np.ndarray  # (3, 4)
    forward: np.ndarray  # (4, 4)
    fp_rate: float
    fn_rate: float

    @property
    def shift(self) -> np.ndarray:
        """Forward-map intercept (r0, r0, r0^2, r0)."""
        r0 = self.fp_rate
        return np.array([r0, r0, r0 * r0, r0])

    def true_from_observed(self, observed_stats) -> np.ndarray:
        return self.offset + self.matrix @ np.asarray(observed_stats, dtype=float)

    def observed_from_true(self, true_stats_ext) -> np.ndarray:
        return self.shift + self.forward @ np.asarray(true_stats_ext, dtype=float)


def correction_maps(fp_rate: float, fn_rate: float) -> CorrectionMaps:
    """Closed-form correction algebra for given rates.

    The forward matrix is block diagonal with retention factor
    lam = 1 - fp - fn; its inverse is computed analytically (the offset third
    component is exactly zero because the fp^2 terms cancel in the block
    inverse), which keeps grid searches exact and fast.  Rates with
    fp + fn >= 1 are rejected: the forward matrix would be singular.
    """
    validate_rates(fp_rate, fn_rate)
    lam = 1.0 - fp_rate - fn_rate
    forward = np.array(
        [
            [lam, 0.0, 0.0, 0.0],
            [0.0, lam, 0.0, 0.0],
            [0.0, 0.0, lam * lam, fp_rate * lam],
            [0.0, 0.0, 0.0, lam],
        ]
    )
    inv_lam = 1.0 / lam
    matrix = np.array(
        [
            [inv_lam, 0.0, 0.0, 0.0],
            [0.0, inv_lam, 0.0, 0.0],
            [0.0, 0.0, inv_lam * inv_lam, -fp_rate * inv_lam * inv_lam],
        ]
    )
    offset = np.array([-fp_rate * inv_lam, -fp_rate * inv_lam, 0.0])
    return CorrectionMaps(
        offset=offset,
        matrix=matrix,
        forward=forward,
        fp_rate=float(fp_rate),
        fn_rate=float(fn_rate),
    )


def apply_misclassification(
    true_network: Network, fp_rate: float, fn_rate: float, seed
) -> Network:
    """Flip each off-diagonal entry independently; deterministic given seed."""
    validate_rates(fp_rate, fn_rate)
    g = true_network.adj
    rng = np.random.default_rng(seed)
    u = rng.random(g.shape)
    observed = np.where(g == 1, u >= fn_rate, u < fp_rate).astype(np.int8)
    np.fill_diagonal(observed, 0)
    return Network(observed)


def true_beliefs_from_observed(observed_stats, fp_rate: float, fn_rate: float) -> np.ndarray:
    """Latent 3-vector of expected statistics from the observed 4-vector."""
    return correction_maps(fp_rate, fn_rate).true_from_observed(observed_stats)


def observed_beliefs_from_true(true_stats_ext, fp_rate: float, fn_rate: float) -> np.ndarray:
    """Observed 4-vector of expected statistics from the extended latent one."""
    return correction_maps(fp_rate, fn_rate).observed_from_true(true_stats_ext)


def pair_belief_stats(
    beliefs: BeliefMatrix, fp_rate: float, fn_rate: float, i: int, j: int
) -> BeliefStats:
    """Latent and observed expected statistics for the ordered pair (i, j)."""
    ext = extended_stats_from_beliefs(beliefs)[i, j]
    observed = observed_beliefs_from_true(ext, fp_rate, fn_rate)
    return BeliefStats(true_stats=ext[:3], observed_stats=observed)
