"""Replicator-dynamics vector fields and fixed-step RK4 integration.

Three views of the same game: the single-population field on one square
matrix, the coupled two-population field on a bimatrix game, and the two
decoupled counterpart fields.  All dynamics run in float64; exact payoffs
enter only through the initial matrix conversion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainEscape, NotSquare, SizeMismatch, UnsupportedDimension, ValidationError
from .games import BimatrixGame, MixedStrategy, SingleGame, counterpart_games

SYSTEMS = ("single", "coupled", "cp1", "cp2")
CLAMP_EPS = 1e-12
ESCAPE_EPS = 1e-9
SIMPLEX_TOL = 1e-9


def _as_state(value, n: int, what: str) -> np.ndarray:
    if isinstance(value, MixedStrategy):
        arr = value.as_floats()
    else:
        arr = np.asarray(value, dtype=np.float64)
    if arr.shape != (n,):
        raise SizeMismatch(f"{what} has {arr.shape[0] if arr.ndim == 1 else '?'} components, expected {n}")
    return arr


def _check_simplex(arr: np.ndarray, what: str) -> None:
    if arr.min() < -SIMPLEX_TOL or abs(arr.sum() - 1.0) > SIMPLEX_TOL:
        raise ValidationError(f"{what} is not on the probability simplex: {arr.tolist()}")


def rd_single_field(s: SingleGame, x) -> np.ndarray:
    """v_i = x_i * [(Mx)_i - x^T M x]; tangent to the simplex by construction."""
    xa = _as_state(x, s.n, "state")
    mx = s.m_float() @ xa
    return xa * (mx - xa @ mx)


def rd_coupled_field(g: BimatrixGame, x, y) -> tuple[np.ndarray, np.ndarray]:
    """Two-population field: each population's fitness depends on the other."""
    xa = _as_state(x, g.n_rows, "row state")
    ya = _as_state(y, g.n_cols, "column state")
    ay = g.a_float() @ ya
    xb = xa @ g.b_float()
    vx = xa * (ay - xa @ ay)
    vy = ya * (xb - xb @ ya)
    return vx, vy


def rd_counterpart_fields(g: BimatrixGame, x, y) -> tuple[np.ndarray, np.ndarray]:
    """Velocities of the two decoupled counterpart systems: the first moves
    the column strategy y on matrix A, the second moves x on B transposed."""
    if not g.is_square:
        raise NotSquare("counterpart dynamics require a square game; pad first")
    cp1, cp2 = counterpart_games(g)
    return rd_single_field(cp1, y), rd_single_field(cp2, x)


@dataclass(frozen=True)
class Trajectory:
    """Fixed-step integration record.  `ys` is None for one-population systems."""

    system: str
    times: np.ndarray
    xs: np.ndarray  # shape (steps + 1, n)
    ys: np.ndarray | None  # shape (steps + 1, m) for coupled systems

    @property
    def n_states(self) -> int:
        return self.xs.shape[0]


@dataclass(frozen=True)
class FieldSample:
    """One grid point of a velocity field; tuples hold one or two populations."""

    points: tuple[np.ndarray, ...]
    velocities: tuple[np.ndarray, ...]


def _field_fn(system: str, game):
    """Return (state_dims, f) where f maps a flat state to a flat velocity."""
    if system == "single":
        if not isinstance(game, SingleGame):
            raise ValidationError("system 'single' needs a SingleGame")
        m = game.m_float()

        def f(state):
            mx = m @ state
            return state * (mx - state @ mx)

        return (game.n,), f
    if not isinstance(game, BimatrixGame):
        raise ValidationError(f"system {system!r} needs a BimatrixGame")
    if system == "coupled":
        a, b = game.a_float(), game.b_float()
        n, m = game.n_rows, game.n_cols

        def f(state):
            x, y = state[:n], state[n:]
            ay = a @ y
            xb = x @ b
            return np.concatenate([x * (ay - x @ ay), y * (xb - xb @ y)])

        return (n, m), f
    if system in ("cp1", "cp2"):
        if not game.is_square:
            raise NotSquare("counterpart systems require a square game; pad first")
        cp1, cp2 = counterpart_games(game)
        s = cp1 if system == "cp1" else cp2
        mat = s.m_float()

        def f(state):
            mx = mat @ state
            return state * (mx - state @ mx)

        return (s.n,), f
    raise ValidationError(f"unknown system {system!r}; expected one of {SYSTEMS}")


def _split_init(system: str, dims, init) -> np.ndarray:
    if len(dims) == 2:
        if not (isinstance(init, (tuple, list)) and len(init) == 2):
            raise ValidationError("coupled systems need an initial state per population")
        x0 = _as_state(init[0], dims[0], "initial row state")
        y0 = _as_state(init[1], dims[1], "initial column state")
        _check_simplex(x0, "initial row state")
        _check_simplex(y0, "initial column state")
        return np.concatenate([x0, y0])
    x0 = _as_state(init, dims[0], "initial state")
    _check_simplex(x0, "initial state")
    return x0


def _project(state: np.ndarray, dims) -> np.ndarray:
    """Clamp roundoff negatives and renormalize each population to sum 1."""
    if state.min() < -ESCAPE_EPS:
        raise DomainEscape(f"state component {state.min()} below -{ESCAPE_EPS}; reduce dt")
    state = np.where((state < 0.0) & (state >= -CLAMP_EPS), 0.0, state)
    out = []
    offset = 0
    for d in dims:
        block = state[offset:offset + d]
        out.append(block / block.sum())
        offset += d
    return np.concatenate(out)


def integrate(system: str, game, init, dt: float = 0.01, t_max: float = 50.0) -> Trajectory:
    """Classical fixed-step RK4 on the requested system, recording every step.

    States are projected back to the simplex after each step (clamp tiny
    negatives, renormalize); a component below -1e-9 aborts with DomainEscape.
    Faces stay invariant exactly: a zero component has zero velocity at every
    RK4 stage and scaling preserves it.
    """
    if dt <= 0:
        raise ValidationError("dt must be positive")
    if t_max < dt:
        raise ValidationError("t_max must be at least dt")
    dims, f = _field_fn(system, game)
    state = _split_init(system, dims, init)
    steps = max(1, int(round(t_max / dt)))
    states = np.empty((steps + 1, state.shape[0]))
    states[0] = state
    for k in range(steps):
        k1 = f(state)
        k2 = f(state + 0.5 * dt * k1)
        k3 = f(state + 0.5 * dt * k2)
        k4 = f(state + dt * k3)
        state = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        state = _project(state, dims)
        states[k + 1] = state
    times = np.arange(steps + 1) * dt
    if len(dims) == 2:
        return Trajectory(system=system, times=times, xs=states[:, :dims[0]], ys=states[:, dims[0]:])
    return Trajectory(system=system, times=times, xs=states, ys=None)


def sample_field_grid(system: str, game, resolution: int) -> list[FieldSample]:
    """Velocity samples on a regular grid.

    Coupled 2x2 systems sample ((p, 1-p), (q, 1-q)) on a resolution^2 lattice
    over the unit square; one-population 3-action systems sample the
    barycentric lattice with step 1/resolution.  Other shapes have no grid.
    """
    if resolution < 2:
        raise ValidationError("resolution must be at least 2")
    dims, f = _field_fn(system, game)
    samples = []
    if len(dims) == 2:
        if dims != (2, 2):
            raise UnsupportedDimension("unit-square grids need 2 actions per player")
        for i in range(resolution):
            p = i / (resolution - 1)
            for j in range(resolution):
                q = j / (resolution - 1)
                state = np.array([p, 1.0 - p, q, 1.0 - q])
                v = f(state)
                samples.append(FieldSample(points=(state[:2], state[2:]),
                                           velocities=(v[:2], v[2:])))
        return samples
    if dims[0] != 3:
        raise UnsupportedDimension("simplex grids need exactly 3 actions")
    for i in range(resolution + 1):
        for j in range(resolution + 1 - i):
            k = resolution - i - j
            state = np.array([i, j, k], dtype=np.float64) / resolution
            v = f(state)
            samples.append(FieldSample(points=(state,), velocities=(v,)))
    return samples
