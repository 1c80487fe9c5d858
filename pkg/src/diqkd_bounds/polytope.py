"""Local-polytope decomposition: vertex enumeration and the local-weight LP.

The decomposition engine writes a behavior as q_L * (mixture of deterministic
vertices) + (1 - q_L) * (no-signaling residual) with q_L maximal.  A small
dense two-phase simplex with Bland's rule does the optimization; problem
sizes here are a few dozen variables, so robustness beats speed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .devices import Behavior
from .errors import (
    InfeasibleError,
    NumericalFailureError,
    TooManyVerticesError,
    UnboundedError,
)

VERTEX_CAP = 10**6
PIVOT_TOL = 1e-11


class DeterministicVertex(NamedTuple):
    """Local deterministic strategy: one outcome per input per party."""

    a_map: tuple[int, ...]  # outcome for each Alice input
    b_map: tuple[int, ...]  # outcome for each Bob input


def enumerate_vertices(x_count: int, y_count: int, a_count: int,
                       b_count: int) -> list[DeterministicVertex]:
    """All deterministic vertices of the local polytope, lexicographic order.

    The Alice map varies slowest; total count is a^x * b^y and must not
    exceed the 10^6 cap.
    """
    if min(x_count, y_count, a_count, b_count) < 1:
        raise ValueError("all cardinalities must be at least 1")
    count = a_count**x_count * b_count**y_count
    if count > VERTEX_CAP:
        raise TooManyVerticesError(f"{count} vertices exceed the cap {VERTEX_CAP}")
    vertices = []
    for a_map in itertools.product(range(a_count), repeat=x_count):
        for b_map in itertools.product(range(b_count), repeat=y_count):
            vertices.append(DeterministicVertex(a_map, b_map))
    return vertices


def vertex_table(v: DeterministicVertex, y_count_dims: tuple[int, int, int, int]) -> np.ndarray:
    """Behavior table of a deterministic vertex."""
    x_count, y_count, a_count, b_count = y_count_dims
    t = np.zeros((x_count, y_count, a_count, b_count))
    for x in range(x_count):
        for y in range(y_count):
            t[x, y, v.a_map[x], v.b_map[y]] = 1.0
    return t


@dataclass(frozen=True)
class LinearProgram:
    """maximize c.x  subject to  a_ub x <= b_ub, a_eq x == b_eq, x >= 0."""

    c: np.ndarray
    a_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    a_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None


class SimplexResult(NamedTuple):
    x: np.ndarray
    objective: float


def _pivot(tableau: np.ndarray, basis: list[int], row: int, col: int):
    tableau[row] /= tableau[row, col]
    for r in range(tableau.shape[0]):
        if r != row and abs(tableau[r, col]) > 0.0:
            tableau[r] -= tableau[r, col] * tableau[row]
    basis[row] = col


def _run_simplex(tableau: np.ndarray, basis: list[int], cost: np.ndarray,
                 n_cols: int, max_iter: int, tol: float) -> None:
    """Minimize cost over the tableau in place (Bland's anti-cycling rule)."""
    m = tableau.shape[0]
    for _ in range(max_iter):
        # reduced costs: c_j - c_B . B^-1 A_j
        reduced = cost[:n_cols] - cost[basis] @ tableau[:, :n_cols]
        entering = -1
        for j in range(n_cols):
            if reduced[j] < -tol:
                entering = j
                break
        if entering < 0:
            return
        ratios = []
        for r in range(m):
            if tableau[r, entering] > tol:
                ratios.append((tableau[r, -1] / tableau[r, entering], basis[r], r))
        if not ratios:
            raise UnboundedError("objective is unbounded along an entering direction")
        ratios.sort(key=lambda t: (t[0], t[1]))  # Bland: lowest index on ties
        _pivot(tableau, basis, ratios[0][2], entering)
    raise NumericalFailureError(f"simplex exceeded its {max_iter}-iteration cap")


def simplex_solve(lp: LinearProgram, tol: float = PIVOT_TOL) -> SimplexResult:
    """Solve a standard-form LP with a dense two-phase tableau simplex.

    Returns a primal-feasible solution whose objective is within 1e-8 of the
    optimum (termination at nonnegative reduced costs certifies optimality of
    the final basis).  Raises `UnboundedError`, `InfeasibleError`, or
    `NumericalFailureError`.
    """
    c = np.asarray(lp.c, dtype=float)
    n = c.size
    rows = []
    rhs = []
    kinds = []  # "ub" or "eq"
    if lp.a_ub is not None:
        a_ub = np.atleast_2d(np.asarray(lp.a_ub, dtype=float))
        b_ub = np.atleast_1d(np.asarray(lp.b_ub, dtype=float))
        for i in range(a_ub.shape[0]):
            rows.append(a_ub[i])
            rhs.append(b_ub[i])
            kinds.append("ub")
    if lp.a_eq is not None:
        a_eq = np.atleast_2d(np.asarray(lp.a_eq, dtype=float))
        b_eq = np.atleast_1d(np.asarray(lp.b_eq, dtype=float))
        for i in range(a_eq.shape[0]):
            rows.append(a_eq[i])
            rhs.append(b_eq[i])
            kinds.append("eq")
    if not rows:
        raise ValueError("LP has no constraints")
    m = len(rows)
    a = np.array(rows)
    b = np.array(rhs)

    # slack for <=; flipped <= rows (negative rhs) get surplus + artificial
    n_slack = sum(1 for k in kinds if k == "ub")
    slack_cols = {}
    col = n
    for i, k in enumerate(kinds):
        if k == "ub":
            slack_cols[i] = col
            col += 1
    needs_art = []
    for i in range(m):
        if b[i] < 0:
            a[i] = -a[i]
            b[i] = -b[i]
            if kinds[i] == "ub":  # became >=: slack coefficient flips sign
                needs_art.append(i)
        elif kinds[i] == "eq":
            needs_art.append(i)
    for i in range(m):
        if kinds[i] == "eq" and i not in needs_art:
            needs_art.append(i)
    needs_art = sorted(set(needs_art))
    art_cols = {}
    for i in needs_art:
        art_cols[i] = col
        col += 1
    n_total = col

    tableau = np.zeros((m, n_total + 1))
    basis: list[int] = [0] * m
    for i in range(m):
        tableau[i, :n] = a[i]
        tableau[i, -1] = b[i]
        if i in slack_cols:
            sign = -1.0 if i in art_cols else 1.0  # flipped rows carry surplus
            tableau[i, slack_cols[i]] = sign
        if i in art_cols:
            tableau[i, art_cols[i]] = 1.0
            basis[i] = art_cols[i]
        else:
            basis[i] = slack_cols[i]

    max_iter = 10 * (m + n_total)

    if art_cols:
        phase1 = np.zeros(n_total)
        for j in art_cols.values():
            phase1[j] = 1.0
        _run_simplex(tableau, basis, phase1, n_total, max_iter, tol)
        infeas = sum(tableau[r, -1] for r in range(m) if basis[r] in art_cols.values())
        if infeas > 1e-8:
            raise InfeasibleError(f"phase-1 optimum {infeas:.3e} > 0")
        # pivot remaining artificials out of the basis where possible
        art_set = set(art_cols.values())
        for r in range(m):
            if basis[r] in art_set:
                for j in range(n_total):
                    if j not in art_set and abs(tableau[r, j]) > tol:
                        _pivot(tableau, basis, r, j)
                        break
        tableau[:, sorted(art_set)] = 0.0

    phase2 = np.zeros(n_total)
    phase2[:n] = -c  # minimize -c.x
    _run_simplex(tableau, basis, phase2, n_total - len(art_cols), max_iter, tol)

    x = np.zeros(n_total)
    for r, j in enumerate(basis):
        x[j] = tableau[r, -1]
    x = x[:n]
    return SimplexResult(x, float(c @ x))


@dataclass(frozen=True)
class LocalDecomposition:
    """Maximal-local-weight split of a behavior.

    ``vertex_weights`` aligns with `enumerate_vertices` order and sums to
    ``local_weight``; ``residual`` is the normalized no-signaling remainder
    and is flagged unused (uniform placeholder) when the behavior is local.
    """

    local_weight: float
    vertex_weights: np.ndarray
    vertices: tuple[DeterministicVertex, ...]
    residual: Behavior
    residual_used: bool

    def reconstruct(self) -> np.ndarray:
        """Reassembled table q_L * local mixture + (1 - q_L) * residual."""
        shape = self.residual.table.shape
        t = np.zeros(shape)
        for w, v in zip(self.vertex_weights, self.vertices):
            if w > 0.0:
                t += w * vertex_table(v, shape)
        if self.residual_used:
            t += (1.0 - self.local_weight) * self.residual.table
        return t


def max_local_weight(b: Behavior) -> LocalDecomposition:
    """Largest q_L with b = q_L * local + (1 - q_L) * no-signaling residual.

    Solves the LP  max sum_i p_i  subject to  sum_i p_i D_i(ab|xy) <= p(ab|xy)
    entrywise, p_i >= 0.  Always feasible (p = 0); the residual inherits
    no-signaling from the behavior and the vertices.
    """
    shape = b.shape
    x_count, y_count, a_count, b_count = shape
    vertices = enumerate_vertices(x_count, y_count, a_count, b_count)
    n = len(vertices)
    m = int(np.prod(shape))
    d = np.zeros((m, n))
    for j, v in enumerate(vertices):
        d[:, j] = vertex_table(v, shape).reshape(-1)
    target = np.clip(b.table.reshape(-1), 0.0, None)
    res = simplex_solve(LinearProgram(c=np.ones(n), a_ub=d, b_ub=target))
    weights = np.clip(res.x, 0.0, None)
    q_l = float(min(max(weights.sum(), 0.0), 1.0))
    if q_l < 1.0 - 1e-9:
        leftover = (target - d @ weights).reshape(shape)
        residual = Behavior(np.clip(leftover, 0.0, None) / (1.0 - q_l))
        used = True
    else:
        uniform = np.full(shape, 1.0 / (a_count * b_count))
        residual = Behavior(uniform)
        used = False
    return LocalDecomposition(q_l, weights, tuple(vertices), residual, used)
