"""Dense two-phase tableau simplex for small standard-form programs ``min c·x  s.t.  A x = b, x >= 0``.

Bland's rule (lowest index enters, lowest basic index leaves on ratio ties) is used in both phases, so the method
terminates without cycling.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from svetlichny.defaults import SIMPLEX_MAX_ITERATIONS
from svetlichny.exceptions import InputError, SolverError

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

OPTIMAL = 'optimal'
INFEASIBLE = 'infeasible'
UNBOUNDED = 'unbounded'

PIVOT_TOLERANCE = 1e-11


@dataclass(frozen=True)
class LinearProgramResult:
    """Outcome of a two-phase solve.

    ``phase_one_residual`` is the minimal total artificial mass, i.e. how far ``A x = b`` is from being satisfiable
    with ``x >= 0``. It is ~0 for feasible programs.
    """

    status: str
    x: Optional[np.ndarray]
    objective: Optional[float]
    phase_one_residual: float
    iterations: int


class TwoPhaseSimplex:
    """Solve ``min c·x`` subject to ``A x = b`` and ``x >= 0`` on a dense tableau."""

    def __init__(self, max_iterations: int = SIMPLEX_MAX_ITERATIONS, feasibility_tolerance: float = 1e-9):
        """Init method for TwoPhaseSimplex.

        Parameters
        ----------
        max_iterations : int
            Pivot cap shared by both phases. Reaching it raises SolverError.
        feasibility_tolerance : float
            Phase-one residual above which the program is declared infeasible.
        """
        self.max_iterations = max_iterations
        self.feasibility_tolerance = feasibility_tolerance
        self.iterations = 0

    @staticmethod
    def _pivot(tableau: np.ndarray, row: int, col: int):
        tableau[row, :] /= tableau[row, col]
        for r in range(tableau.shape[0]):
            if r != row and tableau[r, col] != 0.0:
                tableau[r, :] -= tableau[r, col] * tableau[row, :]

    @staticmethod
    def _entering(cost_row: np.ndarray, allowed: int) -> int:
        """Lowest column index with a negative reduced cost, or -1 at optimality."""
        candidates = np.flatnonzero(cost_row[:allowed] < -PIVOT_TOLERANCE)
        return int(candidates[0]) if candidates.size else -1

    @staticmethod
    def _leaving(tableau: np.ndarray, col: int, basis: List[int]) -> int:
        """Minimum-ratio row; ties go to the row whose basic variable has the lowest index."""
        best_row, best_ratio = -1, np.inf
        for row in range(tableau.shape[0] - 1):
            entry = tableau[row, col]
            if entry <= PIVOT_TOLERANCE:
                continue
            ratio = tableau[row, -1] / entry
            if best_row < 0 or ratio < best_ratio - 1e-15 or \
                    (abs(ratio - best_ratio) <= 1e-15 and basis[row] < basis[best_row]):
                best_row, best_ratio = row, ratio
        return best_row

    def _run(self, tableau: np.ndarray, basis: List[int], allowed: int) -> str:
        """Pivot until optimal or unbounded; only the first ``allowed`` columns may enter."""
        while True:
            col = self._entering(tableau[-1, :], allowed)
            if col < 0:
                return OPTIMAL

            row = self._leaving(tableau, col, basis)
            if row < 0:
                return UNBOUNDED

            if self.iterations >= self.max_iterations:
                raise SolverError(f"Simplex did not terminate within {self.max_iterations} pivots")

            self._pivot(tableau, row, col)
            basis[row] = col
            self.iterations += 1

    def solve(self, c: np.ndarray, a_eq: np.ndarray, b_eq: np.ndarray) -> LinearProgramResult:
        """Run phase one (feasibility) then phase two (objective).

        Raises
        ------
        InputError
            If the dimensions of ``c``, ``a_eq`` and ``b_eq`` disagree.
        SolverError
            If the pivot cap is reached in either phase.
        """
        c = np.asarray(c, dtype=float).reshape(-1)
        a_eq = np.array(a_eq, dtype=float, ndmin=2)
        b_eq = np.array(b_eq, dtype=float).reshape(-1)
        m, n = a_eq.shape
        if c.shape != (n,) or b_eq.shape != (m,):
            raise InputError(f"Inconsistent LP shapes: c {c.shape}, A {a_eq.shape}, b {b_eq.shape}")

        self.iterations = 0

        # Phase one: one artificial per row, rows flipped so that b >= 0
        flip = np.where(b_eq < 0, -1.0, 1.0)
        tableau = np.zeros((m + 1, n + m + 1))
        tableau[:m, :n] = a_eq * flip[:, np.newaxis]
        tableau[:m, n:n + m] = np.eye(m)
        tableau[:m, -1] = b_eq * flip
        tableau[-1, :n] = -tableau[:m, :n].sum(axis=0)
        tableau[-1, -1] = -tableau[:m, -1].sum()
        basis = list(range(n, n + m))

        self._run(tableau, basis, allowed=n + m)
        residual = max(0.0, float(-tableau[-1, -1]))
        logger.debug(f"Phase one finished after {self.iterations} pivots with residual {residual:.3e}")
        if residual > self.feasibility_tolerance:
            return LinearProgramResult(INFEASIBLE, None, None, residual, self.iterations)

        # Drive artificials out of the basis; rows where that is impossible are redundant
        keep_rows = []
        for row, var in enumerate(basis):
            if var >= n:
                candidates = np.flatnonzero(np.abs(tableau[row, :n]) > PIVOT_TOLERANCE)
                if candidates.size == 0:
                    continue
                self._pivot(tableau, row, int(candidates[0]))
                basis[row] = int(candidates[0])
            keep_rows.append(row)

        # Phase two on the original columns
        phase_two = np.zeros((len(keep_rows) + 1, n + 1))
        phase_two[:-1, :n] = tableau[keep_rows, :n]
        phase_two[:-1, -1] = tableau[keep_rows, -1]
        basis = [basis[row] for row in keep_rows]
        phase_two[-1, :n] = c
        for row, var in enumerate(basis):
            phase_two[-1, :] -= c[var] * phase_two[row, :]

        status = self._run(phase_two, basis, allowed=n)
        if status == UNBOUNDED:
            return LinearProgramResult(UNBOUNDED, None, None, residual, self.iterations)

        x = np.zeros(n)
        for row, var in enumerate(basis):
            x[var] = phase_two[row, -1]
        x = np.clip(x, 0.0, None)
        logger.debug(f"Phase two finished after {self.iterations} pivots in total")

        return LinearProgramResult(OPTIMAL, x, float(c @ x), residual, self.iterations)


def solve_standard_form(c, a_eq, b_eq, max_iterations: int = SIMPLEX_MAX_ITERATIONS,
                        feasibility_tolerance: float = 1e-9) -> LinearProgramResult:
    """Convenience wrapper around TwoPhaseSimplex.solve."""
    return TwoPhaseSimplex(max_iterations, feasibility_tolerance).solve(c, a_eq, b_eq)
