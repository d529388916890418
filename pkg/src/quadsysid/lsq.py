"""Stacked linear least squares plus the one-dimensional grid minimizer."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import NonFiniteObjective, RankDeficient, ShapeMismatch

# numerical rank tolerance relative to the largest singular value
RANK_RCOND = 1e-10


@dataclass(frozen=True)
class LinearSystem:
    """Vertically stacked regression problem a @ x = b.

    row_blocks counts the samples that contributed; every sample contributes
    the same fixed number of rows.
    """

    a: np.ndarray
    b: np.ndarray
    row_blocks: int

    def __post_init__(self):
        if self.a.ndim != 2 or self.b.ndim != 1:
            raise ShapeMismatch(f"expected 2-D a and 1-D b, got {self.a.shape} and {self.b.shape}")
        if self.a.shape[0] != self.b.shape[0]:
            raise ShapeMismatch(f"a has {self.a.shape[0]} rows but b has {self.b.shape[0]}")
        if self.a.shape[1] < 1:
            raise ShapeMismatch("system needs at least one unknown")

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]


@dataclass(frozen=True)
class LsqSolution:
    x: np.ndarray
    rmse: float           # residual_norm / sqrt(rows)
    residual_norm: float


def stack(blocks: Sequence[tuple[np.ndarray, np.ndarray]]) -> LinearSystem:
    """Concatenate per-sample (a_k, b_k) blocks in input order."""
    if not blocks:
        raise ShapeMismatch("cannot stack zero blocks")
    mats, vecs = [], []
    cols = None
    for k, (a_k, b_k) in enumerate(blocks):
        a_k = np.atleast_2d(np.asarray(a_k, dtype=np.float64))
        b_k = np.atleast_1d(np.asarray(b_k, dtype=np.float64))
        if cols is None:
            cols = a_k.shape[1]
        elif a_k.shape[1] != cols:
            raise ShapeMismatch(f"block {k} has {a_k.shape[1]} columns, expected {cols}")
        if a_k.shape[0] != b_k.shape[0]:
            raise ShapeMismatch(f"block {k}: a has {a_k.shape[0]} rows but b has {b_k.shape[0]}")
        mats.append(a_k)
        vecs.append(b_k)
    return LinearSystem(a=np.concatenate(mats, axis=0), b=np.concatenate(vecs), row_blocks=len(blocks))


def solve_ols(system: LinearSystem) -> LsqSolution:
    """Minimize ||a x - b||_2 via an orthogonal decomposition.

    Raises RankDeficient when the numerical rank at RANK_RCOND falls short of
    the column count (insufficient excitation shows up here).
    """
    a, b = system.a, system.b
    if system.rows < system.cols:
        raise RankDeficient(f"{system.rows} rows cannot determine {system.cols} unknowns")
    x, _, rank, _ = np.linalg.lstsq(a, b, rcond=RANK_RCOND)
    if rank < system.cols:
        raise RankDeficient(f"numerical rank {rank} < {system.cols} unknowns")
    residual = a @ x - b
    residual_norm = float(np.linalg.norm(residual))
    return LsqSolution(x=x, rmse=residual_norm / math.sqrt(system.rows), residual_norm=residual_norm)


def grid_minimize(objective: Callable[[float], float],
                  grid: Sequence[float]) -> tuple[float, list[tuple[float, float]]]:
    """Evaluate objective on an increasing positive grid, return the argmin.

    Ties break toward the smaller candidate. The full (candidate, value) curve
    is returned for plotting.
    """
    grid = [float(g) for g in grid]
    if not grid:
        raise ValueError("grid must be nonempty")
    if any(g <= 0 for g in grid):
        raise ValueError("grid candidates must be positive")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly increasing")
    curve: list[tuple[float, float]] = []
    for g in grid:
        value = float(objective(g))
        if not math.isfinite(value):
            raise NonFiniteObjective(f"objective returned {value} at candidate {g}")
        curve.append((g, value))
    # first occurrence of the minimum = smallest candidate on an ascending grid
    best_idx = min(range(len(curve)), key=lambda i: curve[i][1])
    return grid[best_idx], curve
