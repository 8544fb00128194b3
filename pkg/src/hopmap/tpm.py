"""Topology coordinates and topology-preserving maps from anchor distances."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph import VcMatrix
from .lowrank import (
    CompletionConfig,
    CompletionResult,
    complete_nuclear_norm,
    double_center_partial,
    svd,
)
from .sampling import ObservedMatrix


@dataclass(frozen=True)
class TopologyMap:
    coords: np.ndarray  # n x k, k in {2, 3}

    def __post_init__(self):
        if self.coords.ndim != 2 or self.coords.shape[1] not in (2, 3):
            raise ValueError("coords must be n x 2 or n x 3")
        if not np.all(np.isfinite(self.coords)):
            raise ValueError("coords must be finite")
        self.coords.flags.writeable = False

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def k(self) -> int:
        return self.coords.shape[1]


class CompletionFailure(RuntimeError):
    """Completion hit its iteration cap before reaching tolerance."""

    def __init__(self, result: CompletionResult):
        self.result = result
        super().__init__(
            f"completion stopped at iteration {result.iterations} with "
            f"residual {result.final_residual:.3e}"
        )


def _completed_or_raise(o: ObservedMatrix, cfg: CompletionConfig | None) -> np.ndarray:
    res = complete_nuclear_norm(o, cfg)
    if not res.converged:
        raise CompletionFailure(res)
    return res.completed


def _check_k(m: int, k: int) -> None:
    if k not in (2, 3):
        raise ValueError("map dimension k must be 2 or 3")
    if m <= k:
        raise ValueError(f"need more than {k} anchor columns, got {m}")


def tpm_full_vc(p: VcMatrix, k: int = 2) -> TopologyMap:
    """Map coordinates from the full anchor-distance matrix: columns
    2..k+1 of U Sigma (the leading column carries no shape information
    and is dropped)."""
    _check_k(p.hops.shape[1], k)
    f = svd(p.hops.astype(float))
    coords = (f.u * f.s)[:, 1 : k + 1]
    return TopologyMap(coords=coords.copy())


def tpm_via_p_completion(
    o: ObservedMatrix, k: int = 2, cfg: CompletionConfig | None = None
) -> TopologyMap:
    """Complete the partial anchor-distance matrix, then extract columns
    2..k+1 of U Sigma."""
    _check_k(o.shape[1], k)
    completed = _completed_or_raise(o, cfg)
    f = svd(completed)
    coords = (f.u * f.s)[:, 1 : k + 1]
    return TopologyMap(coords=coords.copy())


def tpm_via_grammian(
    o: ObservedMatrix, k: int = 2, cfg: CompletionConfig | None = None
) -> TopologyMap:
    """Partially double-center the squared observations, complete the
    centered matrix, and take the first k columns of U Sigma."""
    _check_k(o.shape[1], k)
    centered = double_center_partial(o)
    completed = _completed_or_raise(centered, cfg)
    f = svd(completed)
    coords = (f.u * f.s)[:, :k]
    return TopologyMap(coords=coords.copy())


@dataclass(frozen=True)
class AlignmentTransform:
    rotation: np.ndarray  # k x k orthogonal, reflections allowed
    scale: float
    residual: float


def align_maps(a: TopologyMap, b: TopologyMap) -> tuple[TopologyMap, AlignmentTransform]:
    """Orthogonal-plus-uniform-scale registration of map a onto map b
    minimizing the sum of squared point distances."""
    if a.coords.shape != b.coords.shape:
        raise ValueError("maps must share n and k")
    if np.allclose(a.coords, a.coords[0]) or np.allclose(b.coords, b.coords[0]):
        raise ValueError("degenerate map: all points coincide")
    # orthogonal Procrustes: rotation from the SVD of the cross-covariance
    u, s, vt = np.linalg.svd(a.coords.T @ b.coords)
    rot = u @ vt
    scale = float(s.sum() / (a.coords ** 2).sum())
    moved = scale * a.coords @ rot
    residual = float(np.linalg.norm(moved - b.coords))
    return TopologyMap(coords=moved), AlignmentTransform(
        rotation=rot, scale=scale, residual=residual
    )


def write_tpm(tm: TopologyMap, path: str | Path) -> None:
    header = ["node_id", "x", "y"] + (["z"] if tm.k == 3 else [])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i in range(tm.n):
            w.writerow([i] + [repr(float(c)) for c in tm.coords[i]])


def read_tpm(path: str | Path) -> TopologyMap:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header not in (["node_id", "x", "y"], ["node_id", "x", "y", "z"]):
            raise ValueError(f"bad map header: {header}")
        rows = []
        for line in reader:
            if len(line) != len(header):
                raise ValueError(f"malformed map row: {line}")
            rows.append((int(line[0]), [float(v) for v in line[1:]]))
    if not rows:
        raise ValueError("map file has no points")
    rows.sort()
    if [r[0] for r in rows] != list(range(len(rows))):
        raise ValueError("map node ids are not a dense 0..n-1 range")
    return TopologyMap(coords=np.array([r[1] for r in rows]))
