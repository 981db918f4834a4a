"""Counterpart decomposition pipeline for asymmetric games.

A square game (A, B) splits into the single-population games A and B^T.  For
every column permutation of the padded game, single-population equilibria of
the two counterparts with identical supports combine into equilibria of the
original bimatrix game; scanning all permutations covers every configuration
of equal-size supports, which is exhaustive for non-degenerate games.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, replace
from fractions import Fraction

from .errors import TheoremViolation, TooLarge
from .games import (
    BimatrixGame,
    MixedStrategy,
    PaddingRecord,
    Permutation,
    counterpart_games,
    expected_payoffs,
    fraction_str,
    is_nash_bimatrix,
    make_bimatrix,
    pad_to_square,
    permute_columns,
    serialize_game,
)
from .solver import (
    DegeneracyReport,
    EquilibriumCandidate,
    candidate_json,
    detect_degeneracy,
    enumerate_nash_bimatrix,
    enumerate_nash_single,
)

MAX_DECOMPOSE_ACTIONS = 5  # n! permutations are scanned; 120 is the ceiling


@dataclass(frozen=True)
class PermutationAnalysis:
    """Counterpart equilibria and matched pairs for one column permutation."""

    permutation: Permutation
    cp1_equilibria: tuple[EquilibriumCandidate, ...]
    cp2_equilibria: tuple[EquilibriumCandidate, ...]
    matched_pairs: tuple[EquilibriumCandidate, ...]  # padded coords, original column order


@dataclass(frozen=True)
class DecompositionReport:
    game: BimatrixGame
    padding: PaddingRecord
    per_permutation: tuple[PermutationAnalysis, ...]
    reconstructed: tuple[EquilibriumCandidate, ...]  # original, unpadded coordinates
    direct_solution: tuple[EquilibriumCandidate, ...] | None
    agreement: bool | None
    degeneracy: DegeneracyReport


def reconstruct_candidates(cp1_eqs, cp2_eqs, perm: Permutation) -> list[EquilibriumCandidate]:
    """Combine counterpart equilibria with matching supports into bimatrix
    candidates.

    cp1_eqs are single-population equilibria of the column-permuted row matrix
    (these play the role of the column strategy); cp2_eqs come from the
    transposed, column-permuted column matrix (the row strategy).  The column
    strategy is mapped back to the original action order before returning.
    Payoffs are left unset; callers verify and fill them against the game.
    """
    out = []
    for x_cand in cp2_eqs:
        for y_cand in cp1_eqs:
            if x_cand.support_x != y_cand.support_x:
                continue
            y_perm = y_cand.x
            n = len(y_perm)
            if y_perm.mode == "exact":
                probs = [Fraction(0)] * n
            else:
                probs = [0.0] * n
            for j in range(n):
                probs[perm(j)] = y_perm.probs[j]
            y = MixedStrategy(tuple(probs), y_perm.mode)
            out.append(EquilibriumCandidate(
                kind="bimatrix",
                x=x_cand.x,
                y=y,
                support_x=x_cand.x.support(),
                support_y=y.support(),
                is_strict=False,
                payoffs=None,
            ))
    return out


def _strip_padding(cand: EquilibriumCandidate, padding: PaddingRecord) -> EquilibriumCandidate:
    """Drop dummy coordinates (always the trailing indices of the padded side)."""
    if not padding.padded:
        return cand
    rows0, cols0 = padding.original_dims
    x, y = cand.x, cand.y
    if padding.player == "row":
        dropped = x.probs[rows0:]
        x = MixedStrategy(x.probs[:rows0], x.mode)
    else:
        dropped = y.probs[cols0:]
        y = MixedStrategy(y.probs[:cols0], y.mode)
    if any(p != 0 for p in dropped):
        raise TheoremViolation("reconstructed candidate puts probability on a dummy action")
    return EquilibriumCandidate(
        kind="bimatrix", x=x, y=y,
        support_x=x.support(), support_y=y.support(),
        is_strict=False, payoffs=None,
    )


def _finalize(cand: EquilibriumCandidate, g: BimatrixGame) -> EquilibriumCandidate:
    from .solver import _bimatrix_strict  # strictness shares the solver's definition
    return replace(cand,
                   payoffs=expected_payoffs(g, cand.x, cand.y),
                   is_strict=_bimatrix_strict(g, cand.x, cand.y))


def decompose(g: BimatrixGame, verify: bool = True) -> DecompositionReport:
    """Run the full counterpart pipeline on a (possibly non-square) game.

    Pads to square, scans all column permutations, enumerates both
    counterparts' symmetric equilibria per permutation, reconstructs matching
    pairs, strips dummies and deduplicates.  Every reconstructed candidate is
    verified exactly against the game; a failure raises TheoremViolation
    since the counterpart correspondence guarantees it cannot happen.  With
    `verify` the direct support-enumeration solution is computed as well and
    compared (over equal-size supports) to set `agreement`.
    """
    padded, padding = pad_to_square(g)
    n = padded.n_rows
    if n > MAX_DECOMPOSE_ACTIONS:
        raise TooLarge(f"decomposition capped at {MAX_DECOMPOSE_ACTIONS} actions after padding, got {n}")
    degeneracy = detect_degeneracy(padded)

    entries = []
    pool: list[EquilibriumCandidate] = []
    for mapping in itertools.permutations(range(n)):
        perm = Permutation(mapping)
        gp = permute_columns(padded, perm)
        cp1, cp2 = counterpart_games(gp)
        eqs1 = enumerate_nash_single(cp1)
        eqs2 = enumerate_nash_single(cp2)
        matched = [
            _finalize(c, padded) for c in reconstruct_candidates(eqs1, eqs2, perm)
        ]
        for cand in matched:
            if not is_nash_bimatrix(padded, cand.x, cand.y, tol=0.0):
                raise TheoremViolation(
                    f"candidate x={cand.x.probs} y={cand.y.probs} from permutation "
                    f"{mapping} is not an equilibrium of the padded game")
        entries.append(PermutationAnalysis(
            permutation=perm,
            cp1_equilibria=tuple(eqs1),
            cp2_equilibria=tuple(eqs2),
            matched_pairs=tuple(matched),
        ))
        pool.extend(matched)

    seen = set()
    reconstructed = []
    for cand in pool:
        stripped = _strip_padding(cand, padding)
        if stripped.key() in seen:
            continue
        seen.add(stripped.key())
        if not is_nash_bimatrix(g, stripped.x, stripped.y, tol=0.0):
            raise TheoremViolation(
                f"candidate x={stripped.x.probs} y={stripped.y.probs} fails on the original game")
        reconstructed.append(_finalize(stripped, g))
    reconstructed.sort(key=lambda c: (len(c.support_x), len(c.support_y),
                                      c.support_x, c.support_y, c.x.probs, c.y.probs))

    direct = None
    agreement = None
    if verify:
        direct = enumerate_nash_bimatrix(g)
        equal_support = {c.key() for c in direct if len(c.support_x) == len(c.support_y)}
        agreement = {c.key() for c in reconstructed} == equal_support

    return DecompositionReport(
        game=g,
        padding=padding,
        per_permutation=tuple(entries),
        reconstructed=tuple(reconstructed),
        direct_solution=None if direct is None else tuple(direct),
        agreement=agreement,
        degeneracy=degeneracy,
    )


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of the randomized round-trip check of the decomposition."""

    trials: int
    size: int
    seed: int
    tested: int
    discarded_degenerate: int
    passed: bool
    counterexample: dict | None


def random_game(rng: random.Random, size: int, name: str = "random") -> BimatrixGame:
    """Square game with integer payoffs drawn uniformly from [-5, 5]."""
    rows = [f"R{i + 1}" for i in range(size)]
    cols = [f"C{j + 1}" for j in range(size)]
    a = [[rng.randint(-5, 5) for _ in range(size)] for _ in range(size)]
    b = [[rng.randint(-5, 5) for _ in range(size)] for _ in range(size)]
    return make_bimatrix(name, rows, cols, a, b)


def verify_roundtrip(trials: int, size: int, seed: int) -> VerificationReport:
    """Generate seeded random games, discard degenerate ones, and check that
    the reconstructed equilibrium set matches the direct solver on the rest.
    Stops at the first disagreement and reports it as a counterexample."""
    rng = random.Random(seed)
    tested = 0
    discarded = 0
    counterexample = None
    for i in range(trials):
        g = random_game(rng, size, name=f"random-{seed}-{i}")
        if detect_degeneracy(g).degenerate:
            discarded += 1
            continue
        report = decompose(g, verify=True)
        tested += 1
        if not report.agreement:
            counterexample = {
                "game": json.loads(serialize_game(g)),
                "reconstructed": [candidate_json(c) for c in report.reconstructed],
                "direct_solution": [candidate_json(c) for c in report.direct_solution],
            }
            break
    return VerificationReport(
        trials=trials,
        size=size,
        seed=seed,
        tested=tested,
        discarded_degenerate=discarded,
        passed=counterexample is None,
        counterexample=counterexample,
    )


def report_json(report: DecompositionReport) -> dict:
    """JSON-ready form of a decomposition report (fraction strings throughout)."""
    def pad_doc(p: PaddingRecord) -> dict:
        return {
            "player": p.player,
            "added_count": p.added_count,
            "dummy_payoff": fraction_str(p.dummy_payoff),
            "original_dims": list(p.original_dims),
        }

    def degeneracy_doc(d: DegeneracyReport) -> dict:
        return {
            "degenerate": d.degenerate,
            "witnesses": [
                {"supports": [list(s) for s in w.supports], "reason": w.reason}
                for w in d.witnesses
            ],
        }

    return {
        "game": json.loads(serialize_game(report.game)),
        "padding": pad_doc(report.padding),
        "degeneracy": degeneracy_doc(report.degeneracy),
        "per_permutation": [
            {
                "permutation": list(entry.permutation.mapping),
                "cp1_equilibria": [candidate_json(c) for c in entry.cp1_equilibria],
                "cp2_equilibria": [candidate_json(c) for c in entry.cp2_equilibria],
                "matched_pairs": [candidate_json(c) for c in entry.matched_pairs],
            }
            for entry in report.per_permutation
        ],
        "reconstructed": [candidate_json(c) for c in report.reconstructed],
        "direct_solution": (None if report.direct_solution is None
                            else [candidate_json(c) for c in report.direct_solution]),
        "agreement": report.agreement,
    }
