"""SVD, spectra, double centering, and nuclear-norm matrix completion."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .sampling import ObservedMatrix, validate_mask

RANK_TOLERANCE = 1e-10


@dataclass(frozen=True)
class SvdFactors:
    """Thin SVD m = u @ diag(s) @ v.T with s descending."""

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.s) @ self.v.T

    @property
    def rank(self) -> int:
        return singular_rank(self.s)

    def validate(self, m: np.ndarray | None = None) -> None:
        r = self.s.size
        eye = np.eye(r)
        if not np.allclose(self.u.T @ self.u, eye, atol=1e-8):
            raise ValueError("left singular vectors not orthonormal")
        if not np.allclose(self.v.T @ self.v, eye, atol=1e-8):
            raise ValueError("right singular vectors not orthonormal")
        if np.any(np.diff(self.s) > 0) or np.any(self.s < 0):
            raise ValueError("singular values not descending and nonnegative")
        if m is not None:
            err = np.linalg.norm(self.reconstruct() - m)
            denom = np.linalg.norm(m)
            if denom > 0 and err > 1e-6 * denom:
                raise ValueError(f"reconstruction error {err / denom:.3e} above 1e-6")


def singular_rank(s: np.ndarray, rel_tol: float = RANK_TOLERANCE) -> int:
    """Count of singular values above rel_tol times the largest."""
    s = np.asarray(s, dtype=float)
    if s.size == 0 or s[0] <= 0.0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


def _fix_signs(u: np.ndarray, v: np.ndarray) -> None:
    # reproducible convention: largest-magnitude entry of each left vector >= 0
    for i in range(u.shape[1]):
        j = int(np.argmax(np.abs(u[:, i])))
        if u[j, i] < 0:
            u[:, i] = -u[:, i]
            v[:, i] = -v[:, i]


def svd(m: np.ndarray) -> SvdFactors:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.size == 0:
        raise ValueError("svd expects a nonempty 2-d array")
    if not np.all(np.isfinite(m)):
        raise ValueError("svd input contains non-finite entries")
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    v = vt.T
    _fix_signs(u, v)
    return SvdFactors(u=u, s=s, v=v)


def matrix_rank(m: np.ndarray) -> int:
    return svd(m).rank


def normalized_spectrum(m: np.ndarray, center: bool = False) -> np.ndarray:
    """Singular values divided by the largest, optionally after double
    centering the elementwise-squared matrix."""
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        raise ValueError("empty matrix")
    if center:
        m = double_center_full(m * m)
    s = svd(m).s
    if s[0] <= 0.0:
        raise ValueError("all-zero matrix has no normalized spectrum")
    return s / s[0]


def double_center_full(sq: np.ndarray) -> np.ndarray:
    """Double centering of an already-squared distance matrix.

    Returns -1/2 (sq - row means - column means + grand mean); every row
    and column of the result sums to zero.
    """
    sq = np.asarray(sq, dtype=float)
    row_means = sq.mean(axis=1, keepdims=True)
    col_means = sq.mean(axis=0, keepdims=True)
    grand = sq.mean()
    return -0.5 * (sq - row_means - col_means + grand)


def double_center_partial(o: ObservedMatrix) -> ObservedMatrix:
    """Double centering of raw distances observed on a mask.

    Input values are squared internally; row, column, and grand means run
    over observed entries only. The mask is unchanged.
    """
    mask = o.mask
    row_counts = mask.sum(axis=1)
    col_counts = mask.sum(axis=0)
    if np.any(row_counts == 0):
        raise ValueError(f"empty row {int(np.argmin(row_counts))} in observation mask")
    if np.any(col_counts == 0):
        raise ValueError(f"empty column {int(np.argmin(col_counts))} in observation mask")
    sq = np.where(mask, o.values * o.values, 0.0)
    row_means = sq.sum(axis=1) / row_counts
    col_means = sq.sum(axis=0) / col_counts
    grand = sq.sum() / mask.sum()
    centered = -0.5 * (sq - row_means[:, None] - col_means[None, :] + grand)
    return ObservedMatrix(
        values=np.where(mask, centered, 0.0),
        mask=mask.copy(),
        symmetric=o.symmetric,
        seed=o.seed,
    )


@dataclass(frozen=True)
class CompletionConfig:
    tolerance: float = 1e-6
    max_iters: int = 500
    mu_scale: float = 1.0          # mu_0 = mu_scale / ||P_Omega(M)||_2
    mu_growth: float = 1.05        # geometric penalty growth per iteration
    full_svd_below: int = 400      # min dimension under which plain SVD is used
    oversample: int = 10           # extra columns for the randomized range finder
    power_iters: int = 2

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.mu_growth <= 1.0:
            raise ValueError("mu_growth must exceed 1")


@dataclass(frozen=True)
class CompletionResult:
    completed: np.ndarray
    iterations: int
    final_residual: float
    converged: bool
    residual_trace: tuple[float, ...] = ()
    nuclear_trace: tuple[float, ...] = ()


def _spectral_norm(a: np.ndarray, iters: int = 100, tol: float = 1e-9) -> float:
    """Largest singular value by alternating power iteration."""
    v = np.ones(a.shape[1]) / math.sqrt(a.shape[1])
    sigma = 0.0
    for _ in range(iters):
        u = a @ v
        nu = np.linalg.norm(u)
        if nu == 0.0:
            return 0.0
        v = a.T @ (u / nu)
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return 0.0
        v /= nv
        if abs(nv - sigma) <= tol * max(nv, 1.0):
            return float(nv)
        sigma = nv
    return float(sigma)


def _randomized_svd(a, k, oversample, power_iters, rng):
    """Halko-style range finder; top ~k singular triplets of a."""
    min_dim = min(a.shape)
    p = min(k + oversample, min_dim)
    q = np.linalg.qr(a @ rng.standard_normal((a.shape[1], p)))[0]
    for _ in range(power_iters):
        q = np.linalg.qr(a.T @ q)[0]
        q = np.linalg.qr(a @ q)[0]
    ub, s, vt = np.linalg.svd(q.T @ a, full_matrices=False)
    return q @ ub, s, vt


def _svt(g, thresh, rank_guess, cfg, rng):
    """Singular value thresholding: keep sigma > thresh, shrink by thresh."""
    min_dim = min(g.shape)
    if min_dim <= cfg.full_svd_below:
        u, s, vt = np.linalg.svd(g, full_matrices=False)
    else:
        k = max(rank_guess, 1)
        while True:
            if k >= min_dim // 2:
                # partial SVD no longer pays off at this rank
                u, s, vt = np.linalg.svd(g, full_matrices=False)
                break
            u, s, vt = _randomized_svd(g, k, cfg.oversample, cfg.power_iters, rng)
            if s.size >= min_dim or s[-1] <= thresh:
                break
            k = 2 * k + 5
    kept = s > thresh
    n_kept = int(np.count_nonzero(kept))
    if n_kept == 0:
        m, n = g.shape
        return np.zeros((m, n)), 0, 0.0
    shrunk = s[kept] - thresh
    a = (u[:, kept] * shrunk) @ vt[kept]
    return a, n_kept, float(shrunk.sum())


def complete_nuclear_norm(
    o: ObservedMatrix,
    cfg: CompletionConfig | None = None,
    trace_path: str | Path | None = None,
) -> CompletionResult:
    """Fill the unobserved entries of o with the minimum-nuclear-norm
    extension, via an inexact augmented Lagrangian / singular value
    thresholding iteration.

    The observed entries of the result match o within cfg.tolerance
    (relative Frobenius over the mask). Symmetric-mode inputs are
    symmetrized on output. Deterministic for fixed inputs and config.
    """
    if cfg is None:
        cfg = CompletionConfig()
    mask = o.mask
    if not mask.any():
        raise ValueError("observation mask is empty")
    d = np.where(mask, o.values, 0.0)
    if not np.all(np.isfinite(d)):
        raise ValueError("observations contain non-finite values")
    report = validate_mask(o)
    if report.empty_rows or report.empty_cols:
        raise ValueError(
            f"mask has empty rows {report.empty_rows} / columns {report.empty_cols}"
        )

    trace_file = None
    writer = None
    if trace_path is not None:
        trace_file = open(trace_path, "w", newline="")
        writer = csv.writer(trace_file)
        writer.writerow(["iter", "residual", "nuclear_norm"])

    try:
        obs_norm = np.linalg.norm(d)
        if mask.all() or obs_norm == 0.0:
            # constraint pins every entry (or the zero matrix is optimal)
            completed = d.copy()
            return CompletionResult(
                completed=completed,
                iterations=0,
                final_residual=0.0,
                converged=True,
            )

        mu = cfg.mu_scale / _spectral_norm(d)
        rng = np.random.default_rng(np.random.SeedSequence(0x5EED))
        a = np.zeros_like(d)
        y = np.zeros_like(d)
        residuals: list[float] = []
        nuclears: list[float] = []
        rank_guess = 10
        converged = False
        iterations = 0
        for it in range(1, cfg.max_iters + 1):
            iterations = it
            g = np.where(mask, d + y / mu, a)
            a, n_kept, nuclear = _svt(g, 1.0 / mu, rank_guess, cfg, rng)
            rank_guess = n_kept + 5
            gap = np.where(mask, d - a, 0.0)
            residual = float(np.linalg.norm(gap) / obs_norm)
            residuals.append(residual)
            nuclears.append(nuclear)
            if writer is not None:
                writer.writerow([it, repr(residual), repr(nuclear)])
            if residual <= cfg.tolerance:
                converged = True
                break
            y += mu * gap
            mu *= cfg.mu_growth

        completed = a
        if o.symmetric:
            completed = 0.5 * (completed + completed.T)
        return CompletionResult(
            completed=completed,
            iterations=iterations,
            final_residual=residuals[-1],
            converged=converged,
            residual_trace=tuple(residuals),
            nuclear_trace=tuple(nuclears),
        )
    finally:
        if trace_file is not None:
            trace_file.close()
