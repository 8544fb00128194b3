"""Evaluation metrics: map distance error, neighborhood preservation, hop errors."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import HopDistanceMatrix
from .netgen import PointCloud
from .tpm import TopologyMap

DIRECTIONS = ("horizontal", "vertical")

# the 8 axis-aligned orthogonal transforms of the plane: flips and swaps
_AXIS_TRANSFORMS = [
    np.array([[sx, 0], [0, sy]]) if not swap else np.array([[0, sx], [sy, 0]])
    for swap in (False, True)
    for sx in (1, -1)
    for sy in (1, -1)
]


@dataclass(frozen=True)
class ScanLineConfig:
    directions: tuple[str, ...] = DIRECTIONS
    bin_width: float = 1.0

    def __post_init__(self):
        if self.bin_width <= 0:
            raise ValueError("bin_width must be positive")
        for d in self.directions:
            if d not in DIRECTIONS:
                raise ValueError(f"unknown scan direction {d!r}")
        if not self.directions:
            raise ValueError("need at least one scan direction")


@dataclass(frozen=True)
class MetricReport:
    network: str
    procedure: str
    m: int
    f: float
    seed: int
    metric: str
    value: float

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("metric values are nonnegative")


def mean_distance_error(
    tpm_f: TopologyMap, tpm_0: TopologyMap, anchor_ids: np.ndarray
) -> float:
    """Relative change in node-to-anchor map distances.

    Sums |d_ij(f) - d_ij(0)| over every node i and anchor j, divided by
    the same sum of baseline distances d_ij(0).
    """
    if tpm_f.coords.shape != tpm_0.coords.shape:
        raise ValueError("maps must share n and k")
    anchor_ids = np.asarray(anchor_ids, dtype=np.int64)
    if anchor_ids.size == 0 or anchor_ids.min() < 0 or anchor_ids.max() >= tpm_0.n:
        raise ValueError("anchor ids out of range")
    d_f = np.linalg.norm(
        tpm_f.coords[:, None, :] - tpm_f.coords[None, anchor_ids, :], axis=2
    )
    d_0 = np.linalg.norm(
        tpm_0.coords[:, None, :] - tpm_0.coords[None, anchor_ids, :], axis=2
    )
    denom = d_0.sum()
    if denom <= 0:
        raise ValueError("baseline map is degenerate: zero distance total")
    return float(np.abs(d_f - d_0).sum() / denom)


def _scan_lines(values: np.ndarray, bin_width: float) -> list[np.ndarray]:
    """Group node indices into lines by binning one coordinate."""
    bins = np.rint(values / bin_width).astype(np.int64)
    lines = []
    for b in np.unique(bins):
        idx = np.flatnonzero(bins == b)
        if idx.size >= 2:
            lines.append(idx)
    return lines


def _ordered_pair_violations(order_key: np.ndarray, proj: np.ndarray) -> tuple[int, int]:
    """Count ordered pairs whose projected order disagrees with the
    original order along a line."""
    sort = np.argsort(order_key, kind="stable")
    p = proj[sort]
    m = p.size
    # after sorting by the original coordinate, any non-increasing pair is
    # out of order; each bad unordered pair counts twice (i,j) and (j,i)
    bad = 0
    for i in range(m - 1):
        bad += int(np.count_nonzero(p[i] >= p[i + 1 :]))
    return 2 * bad, m * (m - 1)


def topology_preservation_error(
    layout: PointCloud, tpm: TopologyMap, cfg: ScanLineConfig | None = None
) -> float:
    """Fraction of ordered node pairs, along horizontal and vertical scan
    lines of the original layout, whose order the map fails to preserve.
    The map is scored under all 8 axis-aligned orthogonal transforms and
    the best score is returned."""
    if cfg is None:
        cfg = ScanLineConfig()
    if layout.dim != 2 or tpm.k != 2:
        raise ValueError("neighborhood preservation is defined for 2-d maps")
    if layout.n != tpm.n:
        raise ValueError("layout and map must share node indexing")

    # direction -> (line node sets, original order key axis, map axis)
    jobs = []
    if "horizontal" in cfg.directions:
        for line in _scan_lines(layout.coords[:, 1], cfg.bin_width):
            jobs.append((line, layout.coords[line, 0], 0))
    if "vertical" in cfg.directions:
        for line in _scan_lines(layout.coords[:, 0], cfg.bin_width):
            jobs.append((line, layout.coords[line, 1], 1))
    if not jobs:
        raise ValueError("no scan line holds two or more nodes")

    best = None
    for t in _AXIS_TRANSFORMS:
        mapped = tpm.coords @ t.T
        bad_total = 0
        pair_total = 0
        for line, order_key, axis in jobs:
            bad, pairs = _ordered_pair_violations(order_key, mapped[line, axis])
            bad_total += bad
            pair_total += pairs
        score = bad_total / pair_total
        if best is None or score < best:
            best = score
    return float(best)


def _hop_error_sums(h_hat: np.ndarray, h: HopDistanceMatrix) -> tuple[float, float]:
    h_hat = np.asarray(h_hat, dtype=float)
    if h_hat.shape != h.hops.shape:
        raise ValueError("estimate and reference dimensions differ")
    h.require_finite()
    true = h.hops.astype(float)
    return float(np.abs(h_hat - true).sum()), float(true.sum())


def hdm_mean_error(h_hat: np.ndarray, h: HopDistanceMatrix) -> float:
    """Total absolute hop deviation relative to the total hop count."""
    dev, total = _hop_error_sums(h_hat, h)
    if total <= 0:
        raise ValueError("reference hop matrix sums to zero")
    return dev / total

def hdm_absolute_error(h_hat: np.ndarray, h: HopDistanceMatrix) -> float:
    """Mean absolute hop deviation per matrix cell."""
    dev, _ = _hop_error_sums(h_hat, h)
    return dev / h.hops.size
