"""Exact support-enumeration solvers: all Nash equilibria of small bimatrix
and single-population games, replicator rest points, and degeneracy detection.

For every candidate support the in-support indifference conditions form a
small linear system; solutions with strictly positive in-support entries that
survive the best-response test are equilibria.  Exact Fraction arithmetic is
the default so ties are classified correctly; float mode exists to cross-check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import TooLarge
from .games import (
    FLOAT_SUPPORT_EPS,
    BimatrixGame,
    MixedStrategy,
    SingleGame,
    fraction_str,
    is_nash_bimatrix,
    is_nash_single,
    expected_payoffs,
)
from .linsolve import INCONSISTENT, UNDERDETERMINED, UNIQUE, solve_linear

MAX_ACTIONS = 6
FLOAT_DEDUP_EPS = 1e-8


@dataclass(frozen=True)
class EquilibriumCandidate:
    """An equilibrium (or verified candidate) with provenance-free payload."""

    kind: str  # "bimatrix" | "single"
    x: MixedStrategy
    y: MixedStrategy | None
    support_x: tuple[int, ...]
    support_y: tuple[int, ...] | None
    is_strict: bool
    payoffs: object  # (u, v) for bimatrix, scalar for single, None if not computed

    def key(self):
        """Value identity: the strategy profile, ignoring derived fields."""
        return (self.x.probs, None if self.y is None else self.y.probs)


@dataclass(frozen=True)
class RestPoint:
    """Zero-velocity state of the single-population replicator dynamics."""

    point: MixedStrategy
    support: tuple[int, ...]
    is_nash: bool
    common_payoff: object
    continuum: bool = False  # representative (barycentre) of a solution segment


@dataclass(frozen=True)
class DegeneracyWitness:
    supports: tuple
    reason: str  # "singular-system" | "excess-best-responses" | "continuum"


@dataclass(frozen=True)
class DegeneracyReport:
    degenerate: bool
    witnesses: tuple[DegeneracyWitness, ...]


def _matrices(g: BimatrixGame, exact: bool):
    if exact:
        return g.row_payoffs, g.col_payoffs
    return g.a_float().tolist(), g.b_float().tolist()


def _single_matrix(s: SingleGame, exact: bool):
    return s.payoffs if exact else s.m_float().tolist()


def _positive(values, exact: bool) -> bool:
    if exact:
        return all(v > 0 for v in values)
    return all(v > FLOAT_SUPPORT_EPS for v in values)


def _full_vector(n: int, support, values, exact: bool) -> MixedStrategy:
    if exact:
        probs = [Fraction(0)] * n
    else:
        probs = [0.0] * n
        total = sum(values)
        values = [v / total for v in values]  # remove elimination roundoff
    for idx, v in zip(support, values):
        probs[idx] = v
    return MixedStrategy(tuple(probs), "exact" if exact else "float")


def _y_system(a_mat, rows, cols):
    """Indifference system for the column-side vector: all rows in `rows`
    earn the same payoff u against y supported on `cols`, and y sums to 1."""
    sys_rows = [[a_mat[i][j] for j in cols] + [-1] for i in rows]
    sys_rows.append([1] * len(cols) + [0])
    rhs = [0] * len(rows) + [1]
    return sys_rows, rhs


def _x_system(b_mat, rows, cols):
    sys_rows = [[b_mat[i][j] for i in rows] + [-1] for j in cols]
    sys_rows.append([1] * len(rows) + [0])
    rhs = [0] * len(cols) + [1]
    return sys_rows, rhs


def _guard_bimatrix(g: BimatrixGame) -> None:
    if g.n_rows > MAX_ACTIONS or g.n_cols > MAX_ACTIONS:
        raise TooLarge(f"support enumeration capped at {MAX_ACTIONS} actions, game is {g.n_rows}x{g.n_cols}")


def _guard_single(s: SingleGame) -> None:
    if s.n > MAX_ACTIONS:
        raise TooLarge(f"support enumeration capped at {MAX_ACTIONS} actions, game has {s.n}")


def _bimatrix_strict(g: BimatrixGame, x: MixedStrategy, y: MixedStrategy) -> bool:
    # Strictness is decided on the exact payoffs regardless of solve mode.
    sx, sy = x.support(), y.support()
    if len(sx) != 1 or len(sy) != 1:
        return False
    i, j = sx[0], sy[0]
    a, b = g.row_payoffs, g.col_payoffs
    row_ok = all(a[k][j] < a[i][j] for k in range(g.n_rows) if k != i)
    col_ok = all(b[i][l] < b[i][j] for l in range(g.n_cols) if l != j)
    return row_ok and col_ok


def _single_strict(s: SingleGame, x: MixedStrategy) -> bool:
    sx = x.support()
    if len(sx) != 1:
        return False
    i = sx[0]
    return all(s.payoffs[k][i] < s.payoffs[i][i] for k in range(s.n) if k != i)


def _dedup_and_sort(candidates, exact: bool):
    kept = []
    seen = set()
    for cand in candidates:
        if exact:
            k = cand.key()
            if k in seen:
                continue
            seen.add(k)
        else:
            flat = list(cand.x.probs) + (list(cand.y.probs) if cand.y is not None else [])
            dup = False
            for other in kept:
                oflat = list(other.x.probs) + (list(other.y.probs) if other.y is not None else [])
                if max(abs(a - b) for a, b in zip(flat, oflat)) < FLOAT_DEDUP_EPS:
                    dup = True
                    break
            if dup:
                continue
        kept.append(cand)
    def sort_key(c):
        sy = c.support_y if c.support_y is not None else ()
        return (len(c.support_x), len(sy), c.support_x, sy, c.x.probs,
                c.y.probs if c.y is not None else ())
    kept.sort(key=sort_key)
    return kept


def _bimatrix_candidate_from_supports(g, a_mat, b_mat, rows, cols, exact, tol):
    """Solve both indifference systems for one support pair; return the
    verified candidate or None (with the linear results for witness callers)."""
    yres = solve_linear(*_y_system(a_mat, rows, cols), exact=exact)
    xres = solve_linear(*_x_system(b_mat, rows, cols), exact=exact)
    if yres.status != UNIQUE or xres.status != UNIQUE:
        return None, yres, xres
    y_vals, x_vals = yres.solution[:-1], xres.solution[:-1]
    if not (_positive(y_vals, exact) and _positive(x_vals, exact)):
        return None, yres, xres
    x = _full_vector(g.n_rows, rows, x_vals, exact)
    y = _full_vector(g.n_cols, cols, y_vals, exact)
    if not is_nash_bimatrix(g, x, y, tol=tol):
        return None, yres, xres
    cand = EquilibriumCandidate(
        kind="bimatrix",
        x=x,
        y=y,
        support_x=x.support(),
        support_y=y.support(),
        is_strict=_bimatrix_strict(g, x, y),
        payoffs=expected_payoffs(g, x, y),
    )
    return cand, yres, xres


def detect_degeneracy(g: BimatrixGame) -> DegeneracyReport:
    """Scan every equal-size support pair's indifference systems.

    The game is degenerate when some valid mixed strategy admits more pure
    best responses than its support size, or when a support system is
    singular with a whole continuum of solutions.
    """
    _guard_bimatrix(g)
    a_mat, b_mat = _matrices(g, exact=True)
    witnesses: list[DegeneracyWitness] = []
    seen = set()

    def add(rows, cols, reason):
        key = (rows, cols, reason)
        if key not in seen:
            seen.add(key)
            witnesses.append(DegeneracyWitness(supports=(rows, cols), reason=reason))

    for k in range(1, min(g.n_rows, g.n_cols) + 1):
        for rows in itertools.combinations(range(g.n_rows), k):
            for cols in itertools.combinations(range(g.n_cols), k):
                yres = solve_linear(*_y_system(a_mat, rows, cols), exact=True)
                if yres.status == UNDERDETERMINED:
                    pos = _positive(yres.solution[:-1], True)
                    add(rows, cols, "continuum" if pos else "singular-system")
                elif yres.status == UNIQUE and _positive(yres.solution[:-1], True):
                    y = _full_vector(g.n_cols, cols, yres.solution[:-1], True)
                    ay = [sum(a_mat[i][j] * y.probs[j] for j in range(g.n_cols)) for i in range(g.n_rows)]
                    best = max(ay)
                    if sum(1 for v in ay if v == best) > k:
                        add(rows, cols, "excess-best-responses")
                xres = solve_linear(*_x_system(b_mat, rows, cols), exact=True)
                if xres.status == UNDERDETERMINED:
                    pos = _positive(xres.solution[:-1], True)
                    add(rows, cols, "continuum" if pos else "singular-system")
                elif xres.status == UNIQUE and _positive(xres.solution[:-1], True):
                    x = _full_vector(g.n_rows, rows, xres.solution[:-1], True)
                    xb = [sum(x.probs[i] * b_mat[i][j] for i in range(g.n_rows)) for j in range(g.n_cols)]
                    best = max(xb)
                    if sum(1 for v in xb if v == best) > k:
                        add(rows, cols, "excess-best-responses")
    return DegeneracyReport(degenerate=bool(witnesses), witnesses=tuple(witnesses))


def enumerate_nash_bimatrix(g: BimatrixGame, mode: str = "exact") -> list[EquilibriumCandidate]:
    """All Nash equilibria found by support enumeration, sorted by support.

    Equal-cardinality support pairs are always scanned; unequal pairs are
    scanned in addition when the game is degenerate (only then can equilibria
    have supports of different sizes).  Continuum solution sets are skipped;
    they show up as witnesses in detect_degeneracy instead.
    """
    _guard_bimatrix(g)
    exact = mode == "exact"
    tol = 0.0 if exact else FLOAT_SUPPORT_EPS
    a_mat, b_mat = _matrices(g, exact)
    found = []
    for k in range(1, min(g.n_rows, g.n_cols) + 1):
        for rows in itertools.combinations(range(g.n_rows), k):
            for cols in itertools.combinations(range(g.n_cols), k):
                cand, _, _ = _bimatrix_candidate_from_supports(g, a_mat, b_mat, rows, cols, exact, tol)
                if cand is not None:
                    found.append(cand)
    if detect_degeneracy(g).degenerate:
        for k1 in range(1, g.n_rows + 1):
            for k2 in range(1, g.n_cols + 1):
                if k1 == k2:
                    continue
                for rows in itertools.combinations(range(g.n_rows), k1):
                    for cols in itertools.combinations(range(g.n_cols), k2):
                        cand, _, _ = _bimatrix_candidate_from_supports(
                            g, a_mat, b_mat, rows, cols, exact, tol)
                        if cand is not None:
                            found.append(cand)
    return _dedup_and_sort(found, exact)


def enumerate_nash_single(s: SingleGame, mode: str = "exact") -> list[EquilibriumCandidate]:
    """All symmetric Nash equilibria of a single-population game.

    Only single-strategy (symmetric) equilibria are considered: for each
    support solve the indifference system and keep positive solutions whose
    out-of-support fitnesses do not exceed the common payoff.
    """
    _guard_single(s)
    exact = mode == "exact"
    tol = 0.0 if exact else FLOAT_SUPPORT_EPS
    m_mat = _single_matrix(s, exact)
    found = []
    for k in range(1, s.n + 1):
        for supp in itertools.combinations(range(s.n), k):
            res = solve_linear(*_y_system(m_mat, supp, supp), exact=exact)
            if res.status != UNIQUE:
                continue
            vals = res.solution[:-1]
            if not _positive(vals, exact):
                continue
            x = _full_vector(s.n, supp, vals, exact)
            if not is_nash_single(s, x, tol=tol):
                continue
            found.append(EquilibriumCandidate(
                kind="single",
                x=x,
                y=None,
                support_x=x.support(),
                support_y=None,
                is_strict=_single_strict(s, x),
                payoffs=res.solution[-1],
            ))
    return _dedup_and_sort(found, exact)


def _segment_barycentre(particular, direction):
    """Midpoint of the positive segment {p + t*d > 0} of a 1-dim solution set,
    over the in-support coordinates (the common-payoff unknown rides along)."""
    lo, hi = None, None
    for p, d in zip(particular[:-1], direction[:-1]):
        if d > 0:
            bound = -p / d
            lo = bound if lo is None else max(lo, bound)
        elif d < 0:
            bound = -p / d
            hi = bound if hi is None else min(hi, bound)
        elif p <= 0:
            return None
    if lo is None or hi is None or lo >= hi:
        return None
    t = (lo + hi) / 2
    return [p + t * d for p, d in zip(particular, direction)]


def enumerate_rest_points(s: SingleGame, mode: str = "exact") -> list[RestPoint]:
    """Every interior-of-support rest point of the replicator dynamics.

    A state is a rest point exactly when all in-support fitnesses are equal,
    so each support contributes its indifference-system solution when that
    solution is strictly positive; every vertex qualifies trivially.  A
    singular system with a positive solution segment is reported once, as the
    segment's midpoint flagged `continuum`.
    """
    _guard_single(s)
    exact = mode == "exact"
    m_mat = _single_matrix(s, exact)
    found = []
    for k in range(1, s.n + 1):
        for supp in itertools.combinations(range(s.n), k):
            res = solve_linear(*_y_system(m_mat, supp, supp), exact=exact)
            if res.status == INCONSISTENT:
                continue
            continuum = False
            if res.status == UNDERDETERMINED:
                if len(res.nullspace) != 1:
                    continue
                sol = _segment_barycentre(res.solution, res.nullspace[0])
                if sol is None:
                    continue
                continuum = True
            else:
                sol = res.solution
            vals = sol[:-1]
            if not _positive(vals, exact):
                continue
            x = _full_vector(s.n, supp, vals, exact)
            c = sol[-1]
            fitness = [sum(m_mat[i][j] * x.probs[j] for j in range(s.n)) for i in range(s.n)]
            if exact:
                nash = max(fitness) <= c
            else:
                nash = max(fitness) <= c + FLOAT_SUPPORT_EPS
            found.append(RestPoint(point=x, support=x.support(), is_nash=nash,
                                   common_payoff=c, continuum=continuum))
    found.sort(key=lambda r: (len(r.support), r.support, r.point.probs))
    return found


def candidate_json(c: EquilibriumCandidate) -> dict:
    """JSON form of an equilibrium: fraction strings in exact mode."""
    def vec(ms):
        return ms.to_jsonable()

    def val(v):
        return fraction_str(v) if isinstance(v, Fraction) else float(v)

    doc = {"x": vec(c.x)}
    if c.y is not None:
        doc["y"] = vec(c.y)
    doc["support_x"] = list(c.support_x)
    if c.support_y is not None:
        doc["support_y"] = list(c.support_y)
    doc["strict"] = c.is_strict
    if c.payoffs is None:
        doc["payoffs"] = None
    elif isinstance(c.payoffs, tuple):
        doc["payoffs"] = [val(v) for v in c.payoffs]
    else:
        doc["payoffs"] = val(c.payoffs)
    return doc
