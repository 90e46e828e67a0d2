"""Dense two-phase simplex for desk-scale linear programs.

Solves ``max c@x  s.t.  A@x <= b`` with free ``x`` by splitting variables and
running a standard-form tableau simplex with Bland's anti-cycling rule.
Unboundedness is reported with a ray certificate, infeasibility by status.
The pivot loop is the hot kernel: a numba build and a pure-numpy build share
the identical pivot sequence (entering rule, ratio test, tie-breaks), so the
two backends return the same terminal basis bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import HAVE_NUMBA, active_backend

OPTIMAL = 0
UNBOUNDED = 1
INFEASIBLE = 2

PIVOT_TOL = 1e-10


@dataclass(frozen=True)
class LPResult:
    status: int
    value: float
    x: np.ndarray | None
    ray: np.ndarray | None
    basis: np.ndarray | None


def _pivot_np(T: np.ndarray, leave: int, enter: int) -> None:
    T[leave] /= T[leave, enter]
    f = T[:, enter].copy()
    f[leave] = 0.0
    T -= np.outer(f, T[leave])
    T[:, enter] = 0.0
    T[leave, enter] = 1.0


def _core_np(T: np.ndarray, basis: np.ndarray, ncand: int, tol: float) -> tuple[int, int]:
    m = T.shape[0] - 1
    while True:
        negative = np.nonzero(T[m, :ncand] < -tol)[0]
        if negative.size == 0:
            return OPTIMAL, -1
        enter = int(negative[0])
        col = T[:m, enter]
        rows = np.nonzero(col > tol)[0]
        if rows.size == 0:
            return UNBOUNDED, enter
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios == best]
        leave = int(ties[np.argmin(basis[ties])])
        _pivot_np(T, leave, enter)
        basis[leave] = enter


if HAVE_NUMBA:
    import numba

    @numba.njit(cache=True)
    def _core_nb(T, basis, ncand, tol):  # pragma: no cover - compiled
        m = T.shape[0] - 1
        ncols = T.shape[1] - 1
        while True:
            enter = -1
            for j in range(ncand):
                if T[m, j] < -tol:
                    enter = j
                    break
            if enter < 0:
                return 0, -1
            leave = -1
            best = np.inf
            for i in range(m):
                a = T[i, enter]
                if a > tol:
                    r = T[i, ncols] / a
                    if leave < 0 or r < best or (r == best and basis[i] < basis[leave]):
                        best = r
                        leave = i
            if leave < 0:
                return 1, enter
            piv = T[leave, enter]
            for j in range(ncols + 1):
                T[leave, j] /= piv
            for i in range(m + 1):
                if i != leave:
                    f = T[i, enter]
                    if f != 0.0:
                        for j in range(ncols + 1):
                            T[i, j] -= f * T[leave, j]
            for i in range(m + 1):
                T[i, enter] = 0.0
            T[leave, enter] = 1.0
            basis[leave] = enter


def _run_core(T: np.ndarray, basis: np.ndarray, ncand: int, tol: float) -> tuple[int, int]:
    if active_backend() == "numba":
        return _core_nb(T, basis, ncand, tol)
    return _core_np(T, basis, ncand, tol)


def _price_out(T: np.ndarray, basis: np.ndarray) -> None:
    m = T.shape[0] - 1
    for i in range(m):
        cj = T[m, basis[i]]
        if cj != 0.0:
            T[m] -= cj * T[i]


def solve_max(c, A, b, tol: float = PIVOT_TOL) -> LPResult:
    """max c@x subject to A@x <= b, x free (sign-unrestricted)."""
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2:
        A = A.reshape(b.size, -1)
    m, n = A.shape
    if c.size != n or b.size != m:
        raise ValueError(f"shape mismatch: A {A.shape}, b {b.shape}, c {c.shape}")

    # standard form over z = [u, w, s] with x = u - w, slacks s
    nz = 2 * n + m
    body = np.hstack([A, -A, np.eye(m)])
    rhs = b.copy()
    flip = rhs < 0
    body[flip] *= -1.0
    rhs[flip] *= -1.0
    art_rows = np.nonzero(flip)[0]
    nart = art_rows.size
    ncols = nz + nart

    T = np.zeros((m + 1, ncols + 1))
    T[:m, :nz] = body
    T[:m, -1] = rhs
    basis = 2 * n + np.arange(m, dtype=np.int64)
    for k, i in enumerate(art_rows):
        T[i, nz + k] = 1.0
        basis[i] = nz + k

    if nart:
        T[m, nz:ncols] = 1.0
        _price_out(T, basis)
        status, _ = _run_core(T, basis, ncols, tol)
        if status != OPTIMAL:
            raise RuntimeError("phase-1 simplex reported unbounded: numerical breakdown")
        if -T[m, -1] > 10.0 * tol * max(1.0, float(np.abs(rhs).max())):
            return LPResult(INFEASIBLE, np.nan, None, None, None)
        # drive leftover artificials out of the basis where possible
        for i in range(m):
            if basis[i] >= nz:
                for j in range(nz):
                    if abs(T[i, j]) > tol:
                        _pivot_np(T, i, j)
                        basis[i] = j
                        break

    T[m, :] = 0.0
    T[m, :n] = -c
    T[m, n : 2 * n] = c
    _price_out(T, basis)
    status, enter = _run_core(T, basis, nz, tol)

    if status == UNBOUNDED:
        dz = np.zeros(ncols)
        dz[enter] = 1.0
        mrows = T.shape[0] - 1
        for i in range(mrows):
            if basis[i] < ncols:
                dz[basis[i]] = -T[i, enter]
        ray = dz[:n] - dz[n : 2 * n]
        return LPResult(UNBOUNDED, np.inf, None, ray, basis.copy())

    z = np.zeros(ncols)
    z[basis] = T[: T.shape[0] - 1, -1]
    x = z[:n] - z[n : 2 * n]
    return LPResult(OPTIMAL, float(c @ x), x, None, basis.copy())


def feasible(A, b, tol: float = PIVOT_TOL) -> bool:
    """Whether {x : A@x <= b} is nonempty (phase-1 probe)."""
    n = np.asarray(A).shape[1]
    return solve_max(np.zeros(n), A, b, tol=tol).status != INFEASIBLE
