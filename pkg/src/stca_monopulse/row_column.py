"""Subarray-level row/column MVDR beamforming and the six adaptive monopulse beams.

Elements are first combined by analog beamforming inside rectangular tiles.
Each row of tiles is then adaptively beamformed across its columns (nulls
placed in azimuth), and each column of tiles across its rows (nulls in
elevation). Sum and difference beams are formed afterwards along the
orthogonal axis, so jamming suppression in one direction leaves the
monopulse ratio in the other direction undistorted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from .array_model import RadarConfig, Steer, axis_steering, quiescent_monopulse_weights
from .four_channel import compensate
from .scene import SnapshotBatch, covariance

DEFAULT_LOADING = 1e-5


class SingularCovarianceError(np.linalg.LinAlgError):
    """Covariance could not be inverted even after diagonal loading."""


@dataclass(frozen=True)
class SubarrayPartition:
    """``tile_rows`` x ``tile_cols`` grid of equal rectangular tiles."""

    tile_rows: int
    tile_cols: int

    @classmethod
    def parse(cls, text: str) -> "SubarrayPartition":
        try:
            p, q = (int(s) for s in text.lower().split("x"))
        except ValueError:
            raise ValueError(f"partition must look like PxQ, got {text!r}") from None
        return cls(p, q)

    def validate(self, cfg: RadarConfig) -> None:
        if self.tile_rows < 2 or self.tile_cols < 2:
            raise ValueError("need at least 2 x 2 tiles for monopulse beams")
        if cfg.rows % self.tile_rows or cfg.cols % self.tile_cols:
            raise ValueError(
                f"{cfg.rows} x {cfg.cols} array does not split into {self.tile_rows} x {self.tile_cols} tiles")

    def tile_shape(self, cfg: RadarConfig) -> Tuple[int, int]:
        return cfg.rows // self.tile_rows, cfg.cols // self.tile_cols

    def row_centers(self, cfg: RadarConfig) -> np.ndarray:
        """Tile phase centers along the rows, in element-spacing units."""
        h = cfg.rows // self.tile_rows
        return np.arange(self.tile_rows) * h + (h - 1) / 2.0

    def col_centers(self, cfg: RadarConfig) -> np.ndarray:
        w = cfg.cols // self.tile_cols
        return np.arange(self.tile_cols) * w + (w - 1) / 2.0


@dataclass(frozen=True)
class SubarrayData:
    """Digitised tile outputs, ``data`` shape (K, tile_rows, tile_cols)."""

    data: np.ndarray
    cfg: RadarConfig
    partition: SubarrayPartition
    plane: str
    transform: np.ndarray  # (P*Q, M*N): tile outputs = transform @ element data


@dataclass(frozen=True)
class MvdrWeights:
    """Row weights (P, Q), column weights (Q, P) and optional range-plane row weights (P, Q)."""

    rows: np.ndarray
    cols: Optional[np.ndarray]
    range_rows: Optional[np.ndarray] = None


@dataclass(frozen=True)
class AdaptiveAxisBeams:
    """Adaptive row/column outputs per snapshot: x_E (K, P), x_A (K, Q), x_R (K, P) or None."""

    x_E: np.ndarray
    x_A: np.ndarray
    x_R: Optional[np.ndarray] = None


def _vertical_step(cfg: RadarConfig, steer: Steer, plane: str) -> np.ndarray:
    axis = "elevation" if plane == "azimuth_elevation" else "range"
    return axis_steering(cfg, steer, axis, positions=np.arange(cfg.rows))


def subarray_transform(cfg: RadarConfig, partition: SubarrayPartition, steer: Steer,
                       plane: str = "azimuth_elevation") -> np.ndarray:
    """Analog tile beamformer as a (P*Q, M*N) matrix.

    Each tile is steered to ``steer`` with phases referenced to its own
    geometric center, so the tile outputs keep the inter-tile phase
    progression of a uniform array with spacing equal to the tile size.
    """
    partition.validate(cfg)
    h, w = partition.tile_shape(cfg)
    z_full = _vertical_step(cfg, steer, plane)
    y_full = axis_steering(cfg, steer, "azimuth", positions=np.arange(cfg.cols))
    # re-reference every element phase to its tile center
    z_center = np.repeat(axis_steering(cfg, steer, "elevation" if plane == "azimuth_elevation" else "range",
                                       positions=partition.row_centers(cfg)), h)
    y_center = np.repeat(axis_steering(cfg, steer, "azimuth", positions=partition.col_centers(cfg)), w)
    z_local = z_full / z_center
    y_local = y_full / y_center
    row_tile = np.arange(cfg.rows) // h
    col_tile = np.arange(cfg.cols) // w
    t = np.zeros((partition.tile_rows * partition.tile_cols, cfg.num_elements), dtype=complex)
    for m in range(cfg.rows):
        for n in range(cfg.cols):
            t[row_tile[m] * partition.tile_cols + col_tile[n], m * cfg.cols + n] = np.conj(z_local[m] * y_local[n])
    return t


def subarray_outputs(batch: SnapshotBatch, partition: SubarrayPartition, steer: Steer,
                     plane: str = "azimuth_elevation",
                     compensation_elevation: Optional[float] = None) -> SubarrayData:
    """Tile outputs for every snapshot.

    The azimuth-range plane compensates the elevation phase at element level
    (using ``compensation_elevation``) before tile summation.
    """
    cfg = batch.cfg
    if plane == "azimuth_range":
        if cfg.time_shift <= 0:
            raise ValueError("azimuth-range processing needs a positive time shift")
        if compensation_elevation is None:
            raise ValueError("azimuth-range processing needs an elevation to compensate")
        data = compensate(batch, compensation_elevation)
    elif plane == "azimuth_elevation":
        data = batch.data
    else:
        raise ValueError(f"unknown plane {plane!r}")
    t = subarray_transform(cfg, partition, steer, plane)
    tiles = (data @ t.T).reshape(-1, partition.tile_rows, partition.tile_cols)
    return SubarrayData(tiles, cfg, partition, plane, t)


def mvdr(cov: np.ndarray, steering: np.ndarray, loading: float = DEFAULT_LOADING) -> np.ndarray:
    """Distortionless minimum-variance weights ``R^-1 a / (a^H R^-1 a)``.

    ``loading`` adds ``loading * trace(R) / dim`` to the diagonal first.
    """
    cov = np.asarray(cov)
    dim = cov.shape[0]
    loaded = cov + (loading * np.real(np.trace(cov)) / dim) * np.eye(dim)
    try:
        r_inv_a = np.linalg.solve(loaded, steering)
    except np.linalg.LinAlgError as exc:
        raise SingularCovarianceError(str(exc)) from exc
    denom = np.vdot(steering, r_inv_a)
    if not np.all(np.isfinite(r_inv_a)) or abs(denom) == 0 or np.linalg.cond(loaded) > 1e14:
        raise SingularCovarianceError("covariance is singular after diagonal loading")
    return r_inv_a / denom


def _row_steering(sub: SubarrayData, steer: Steer, row: int, reference_row: bool) -> np.ndarray:
    cfg, part = sub.cfg, sub.partition
    a = axis_steering(cfg, steer, "azimuth", positions=part.col_centers(cfg))
    if reference_row:
        axis = "elevation" if sub.plane == "azimuth_elevation" else "range"
        a = a * axis_steering(cfg, steer, axis, positions=part.row_centers(cfg))[row]
    return a


def _col_steering(sub: SubarrayData, steer: Steer, col: int, reference_col: bool) -> np.ndarray:
    cfg, part = sub.cfg, sub.partition
    a = axis_steering(cfg, steer, "elevation", positions=part.row_centers(cfg))
    if reference_col:
        a = a * axis_steering(cfg, steer, "azimuth", positions=part.col_centers(cfg))[col]
    return a


def mvdr_row_weights(sub: SubarrayData, row: int, steer: Steer, loading: float = DEFAULT_LOADING,
                     reference_row: bool = False, cov: Optional[np.ndarray] = None,
                     centered: bool = True) -> np.ndarray:
    """MVDR weights across the tile columns of one tile row.

    With ``reference_row`` the distortionless constraint uses the row's full
    steering subvector (its vertical phase included); adjacent rows then
    differ by exactly the vertical steering phase step. ``cov`` overrides the
    sample covariance; ``centered`` removes the batch mean (the constant
    target echo) before the covariance is formed.
    """
    if sub.data.shape[0] < sub.partition.tile_cols and cov is None:
        raise ValueError("fewer snapshots than adaptive degrees of freedom")
    r = covariance(sub.data[:, row, :], centered) if cov is None else cov
    return mvdr(r, _row_steering(sub, steer, row, reference_row), loading)


def mvdr_row_weights_range(sub: SubarrayData, row: int, steer: Steer, loading: float = DEFAULT_LOADING,
                           reference_row: bool = False, cov: Optional[np.ndarray] = None,
                           centered: bool = True) -> np.ndarray:
    """Row MVDR weights on compensated (azimuth-range) tile data."""
    if sub.plane != "azimuth_range":
        raise ValueError("range-plane row weights need azimuth-range subarray data")
    return mvdr_row_weights(sub, row, steer, loading, reference_row, cov, centered)


def mvdr_column_weights(sub: SubarrayData, col: int, steer: Steer, loading: float = DEFAULT_LOADING,
                        reference_col: bool = False, cov: Optional[np.ndarray] = None,
                        centered: bool = True) -> np.ndarray:
    """MVDR weights across the tile rows of one tile column (nulls in elevation)."""
    if sub.plane != "azimuth_elevation":
        raise ValueError("column weights are formed in the azimuth-elevation plane")
    if sub.data.shape[0] < sub.partition.tile_rows and cov is None:
        raise ValueError("fewer snapshots than adaptive degrees of freedom")
    r = covariance(sub.data[:, :, col], centered) if cov is None else cov
    return mvdr(r, _col_steering(sub, steer, col, reference_col), loading)


WEIGHT_MODES = ("independent", "shared")


def pooled_covariance(sub: SubarrayData, axis: str, centered: bool = True) -> np.ndarray:
    """Average of the per-row (``axis='row'``) or per-column sample covariances.

    Every tile row sees each jammer with the same azimuth response, scaled
    by a row-dependent phase, so the rows estimate one common covariance.
    Pooling them averages out the finite-sample cross terms between
    jammers, which otherwise differ from row to row.
    """
    if axis == "row":
        blocks = [sub.data[:, i, :] for i in range(sub.partition.tile_rows)]
    elif axis == "col":
        blocks = [sub.data[:, :, k] for k in range(sub.partition.tile_cols)]
    else:
        raise ValueError(f"axis must be 'row' or 'col', got {axis!r}")
    return sum(covariance(b, centered) for b in blocks) / len(blocks)


def row_weight_set(sub: SubarrayData, steer: Steer, loading: float = DEFAULT_LOADING,
                   mode: str = "independent") -> np.ndarray:
    """MVDR weights for every tile row, shape (P, Q).

    ``independent`` follows the per-row formulation (one sample covariance
    per row); ``shared`` solves once with the pooled row covariance and
    gives every row the same weights.
    """
    p = sub.partition.tile_rows
    if mode == "independent":
        return np.array([mvdr_row_weights(sub, i, steer, loading) for i in range(p)])
    if mode == "shared":
        if sub.data.shape[0] < sub.partition.tile_cols:
            raise ValueError("fewer snapshots than adaptive degrees of freedom")
        w = mvdr(pooled_covariance(sub, "row"), _row_steering(sub, steer, 0, False), loading)
        return np.tile(w, (p, 1))
    raise ValueError(f"unknown weight mode {mode!r}; expected one of {WEIGHT_MODES}")


def column_weight_set(sub: SubarrayData, steer: Steer, loading: float = DEFAULT_LOADING,
                      mode: str = "independent") -> np.ndarray:
    """MVDR weights for every tile column, shape (Q, P); modes as in ``row_weight_set``."""
    q = sub.partition.tile_cols
    if mode == "independent":
        return np.array([mvdr_column_weights(sub, k, steer, loading) for k in range(q)])
    if mode == "shared":
        if sub.plane != "azimuth_elevation":
            raise ValueError("column weights are formed in the azimuth-elevation plane")
        if sub.data.shape[0] < sub.partition.tile_rows:
            raise ValueError("fewer snapshots than adaptive degrees of freedom")
        w = mvdr(pooled_covariance(sub, "col"), _col_steering(sub, steer, 0, False), loading)
        return np.tile(w, (q, 1))
    raise ValueError(f"unknown weight mode {mode!r}; expected one of {WEIGHT_MODES}")


def compute_weights(sub_angle: SubarrayData, steer: Steer, sub_range: Optional[SubarrayData] = None,
                    loading: float = DEFAULT_LOADING, mode: str = "independent") -> MvdrWeights:
    """MVDR weights for every tile row and column (and range-plane rows if given)."""
    rows = row_weight_set(sub_angle, steer, loading, mode)
    cols = column_weight_set(sub_angle, steer, loading, mode)
    range_rows = None
    if sub_range is not None:
        if sub_range.plane != "azimuth_range":
            raise ValueError("range-plane row weights need azimuth-range subarray data")
        range_rows = row_weight_set(sub_range, steer, loading, mode)
    return MvdrWeights(rows, cols, range_rows)


def adaptive_axis_beams(sub_angle: SubarrayData, weights: MvdrWeights,
                        sub_range: Optional[SubarrayData] = None) -> AdaptiveAxisBeams:
    """Apply row/column weights: x_E[i] = W_i^H x_Ri, x_A[k] = W_k^H x_Ck, x_R likewise."""
    x_e = np.einsum("iq,kiq->ki", weights.rows.conj(), sub_angle.data)
    x_a = np.einsum("qp,kpq->kq", weights.cols.conj(), sub_angle.data)
    x_r = None
    if sub_range is not None:
        if weights.range_rows is None:
            raise ValueError("range-plane data given without range-plane weights")
        x_r = np.einsum("iq,kiq->ki", weights.range_rows.conj(), sub_range.data)
    return AdaptiveAxisBeams(x_e, x_a, x_r)


def _monopulse_weight_pairs(cfg: RadarConfig, partition: SubarrayPartition, steer: Steer):
    rows, cols = partition.row_centers(cfg), partition.col_centers(cfg)
    return {
        "elevation": tuple(quiescent_monopulse_weights(cfg, steer, "elevation", k, rows) for k in ("sum", "difference")),
        "azimuth": tuple(quiescent_monopulse_weights(cfg, steer, "azimuth", k, cols) for k in ("sum", "difference")),
        "range": tuple(quiescent_monopulse_weights(cfg, steer, "range", k, rows) for k in ("sum", "difference")),
    }


def monopulse_beams(beams: AdaptiveAxisBeams, cfg: RadarConfig, partition: SubarrayPartition,
                    steer: Steer) -> Dict[str, Tuple[np.ndarray, np.ndarray]]:
    """The six adaptive monopulse beams as (sum, difference) series per axis."""
    pairs = _monopulse_weight_pairs(cfg, partition, steer)
    series = {"elevation": beams.x_E, "azimuth": beams.x_A, "range": beams.x_R}
    out = {}
    for axis, x in series.items():
        if x is None:
            continue
        w_sum, w_diff = pairs[axis]
        out[axis] = (x @ w_sum.conj(), x @ w_diff.conj())
    return out


def conventional_weights(sub: SubarrayData, steer: Steer) -> MvdrWeights:
    """Non-adaptive row/column weights ``a / len(a)`` (unit gain at the steer point)."""
    cfg, part = sub.cfg, sub.partition
    a_row = _row_steering(sub, steer, 0, False)
    rows = np.tile(a_row / a_row.size, (part.tile_rows, 1))
    cols = None
    if sub.plane == "azimuth_elevation":
        a_col = _col_steering(sub, steer, 0, False)
        cols = np.tile(a_col / a_col.size, (part.tile_cols, 1))
    return MvdrWeights(rows, cols)


def _combine_rows(t: np.ndarray, row_w: np.ndarray, axis_w: np.ndarray) -> np.ndarray:
    # sum_i axis_w[i] * T_i^H W_i
    return sum(axis_w[i] * (t[i].conj().T @ row_w[i]) for i in range(t.shape[0]))


def _combine_cols(t: np.ndarray, col_w: np.ndarray, axis_w: np.ndarray) -> np.ndarray:
    return sum(axis_w[k] * (t[:, k, :].conj().T @ col_w[k]) for k in range(t.shape[1]))


def element_weights(sub: SubarrayData, weights: MvdrWeights, steer: Steer,
                    range_sub: Optional[SubarrayData] = None) -> Dict[str, Tuple[np.ndarray, np.ndarray]]:
    """Element-level weights equivalent to each adaptive monopulse beam.

    Beam output = ``w.conj() @ x`` on (compensated) element data, which lets
    beampatterns be evaluated on any manifold. ``sub`` may come from either
    plane; the range pair needs ``range_sub`` and ``weights.range_rows``.
    """
    cfg, part = sub.cfg, sub.partition
    pairs = _monopulse_weight_pairs(cfg, part, steer)
    p, q = part.tile_rows, part.tile_cols
    result = {}
    if sub.plane == "azimuth_elevation":
        t = sub.transform.reshape(p, q, -1)
        result["elevation"] = tuple(_combine_rows(t, weights.rows, w) for w in pairs["elevation"])
        if weights.cols is not None:
            result["azimuth"] = tuple(_combine_cols(t, weights.cols, w) for w in pairs["azimuth"])
    if range_sub is not None and weights.range_rows is not None:
        tr = range_sub.transform.reshape(p, q, -1)
        range_pairs = _monopulse_weight_pairs(range_sub.cfg, part, steer)["range"]
        result["range"] = tuple(_combine_rows(tr, weights.range_rows, w) for w in range_pairs)
    return result
