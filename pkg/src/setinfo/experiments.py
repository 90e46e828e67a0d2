"""Finite experiments and Markov kernels as row-stochastic matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DominationError, SetInfoError

ROW_SUM_TOL = 1e-12


def _validate_stochastic(rows: np.ndarray, what: str) -> None:
    if rows.ndim != 2:
        raise DimensionError(f"{what} needs a 2-d array, got shape {rows.shape}")
    if np.any(rows < 0.0):
        i, j = np.argwhere(rows < 0.0)[0]
        raise SetInfoError(f"{what} row {i} has negative entry at column {j}")
    sums = rows.sum(axis=1)
    bad = np.nonzero(np.abs(sums - 1.0) > ROW_SUM_TOL)[0]
    if bad.size:
        i = int(bad[0])
        raise SetInfoError(f"{what} row {i} sums to {sums[i]!r}, expected 1")


@dataclass(frozen=True)
class Experiment:
    """n label-conditional distributions over m outcomes, one per row."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.atleast_2d(np.asarray(self.rows, dtype=float))
        _validate_stochastic(rows, "experiment")
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def m(self) -> int:
        return self.rows.shape[1]


@dataclass(frozen=True)
class Kernel:
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        _validate_stochastic(matrix, "kernel")
        object.__setattr__(self, "matrix", matrix)

    @property
    def rows_in(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols_out(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class RefMeasure:
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if np.any(w < 0.0):
            raise SetInfoError("reference measure has a negative weight")
        if w.sum() <= 0.0:
            raise SetInfoError("reference measure has no mass")
        object.__setattr__(self, "weights", w)

    @property
    def m(self) -> int:
        return self.weights.size


def default_ref(e: Experiment) -> RefMeasure:
    """rho = (1/n) * sum of the rows; dominates every row by construction."""
    return RefMeasure(e.rows.mean(axis=0))


def uniform_ref(e: Experiment) -> RefMeasure:
    return RefMeasure(np.full(e.m, 1.0 / e.m))


def compose_label(r: Kernel, e: Experiment) -> Experiment:
    """Label noise: rows of the result are R @ rows."""
    if r.rows_in != r.cols_out or r.cols_out != e.n:
        raise DimensionError(f"label kernel {r.rows_in}x{r.cols_out} against {e.n} labels")
    return Experiment(r.matrix @ e.rows)


def compose_observation(e: Experiment, s: Kernel) -> Experiment:
    """Observation noise: each row E_i is pushed forward to E_i @ S."""
    if s.rows_in != e.m:
        raise DimensionError(f"observation kernel rows {s.rows_in} against {e.m} outcomes")
    return Experiment(e.rows @ s.matrix)


def rn_matrix(e: Experiment, ref: RefMeasure | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Columnwise Radon-Nikodym vectors dE_i/drho and a null-outcome mask.

    A null outcome has rho(x) = 0 and every E_i(x) = 0; it carries no mass and
    its column is all zeros. rho(x) = 0 with some E_i(x) > 0 violates
    domination and raises.
    """
    ref = default_ref(e) if ref is None else ref
    if ref.m != e.m:
        raise DimensionError(f"reference over {ref.m} outcomes, experiment has {e.m}")
    w = ref.weights
    null = w == 0.0
    if np.any(e.rows[:, null] > 0.0):
        x = int(np.nonzero(null & np.any(e.rows > 0.0, axis=0))[0][0])
        raise DominationError(f"rho({x}) = 0 but outcome {x} has experiment mass")
    rn = np.zeros_like(e.rows)
    rn[:, ~null] = e.rows[:, ~null] / w[~null]
    return rn, null


def rn_vector(e: Experiment, ref: RefMeasure, outcome: int) -> np.ndarray:
    rn, _ = rn_matrix(e, ref)
    if not 0 <= outcome < e.m:
        raise DimensionError(f"outcome {outcome} out of range for m = {e.m}")
    return rn[:, outcome].copy()


def make_tni(n: int, m: int, c=None) -> Experiment:
    """Totally noninformative experiment: every row is the same distribution."""
    if c is None:
        row = np.full(m, 1.0 / m)
    else:
        row = np.asarray(c, dtype=float).reshape(-1)
        if row.size != m:
            raise DimensionError(f"weight vector length {row.size}, expected {m}")
        if np.any(row < 0.0) or row.sum() <= 0.0:
            raise SetInfoError("weights must be nonnegative with positive total")
        row = row / row.sum()
    return Experiment(np.tile(row, (n, 1)))


def make_ti(n: int, m: int) -> Experiment:
    """Totally informative experiment: rows with pairwise disjoint supports.

    Outcomes are dealt round-robin: label i owns outcomes i, i+n, i+2n, ...
    uniformly.
    """
    if m < n:
        raise DimensionError(f"totally informative needs m >= n, got n={n} m={m}")
    rows = np.zeros((n, m))
    owner = np.arange(m) % n
    for i in range(n):
        mine = owner == i
        rows[i, mine] = 1.0 / mine.sum()
    return Experiment(rows)


def product_with_prior(prior, e: Experiment) -> np.ndarray:
    """Joint distribution over labels x outcomes: entry (i, x) = pi_i * E_i(x)."""
    pi = np.asarray(prior, dtype=float).reshape(-1)
    if pi.size != e.n:
        raise DimensionError(f"prior length {pi.size}, experiment has {e.n} labels")
    if np.any(pi < 0.0) or abs(pi.sum() - 1.0) > ROW_SUM_TOL:
        raise SetInfoError("prior must be a probability vector")
    return pi[:, None] * e.rows
