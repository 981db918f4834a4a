"""Counterpart reconstruction: matching, permutations, round-trip agreement."""

import random
from fractions import Fraction

import pytest

from cpgames import (
    Permutation,
    TooLarge,
    counterpart_games,
    decompose,
    enumerate_nash_single,
    is_nash_bimatrix,
    make_bimatrix,
    pad_to_square,
    permute_columns,
    reconstruct_candidates,
    verify_roundtrip,
)
from cpgames.decomposition import random_game, report_json


def F(s):
    return Fraction(s)


def profiles(cands):
    return {(c.x.probs, c.y.probs) for c in cands}


class TestReconstruct:
    def test_bos_identity_full_support(self, bos):
        cp1, cp2 = counterpart_games(bos)
        cands = reconstruct_candidates(enumerate_nash_single(cp1),
                                       enumerate_nash_single(cp2),
                                       Permutation.identity(2))
        assert ((F("3/5"), F("2/5")), (F("2/5"), F("3/5"))) in profiles(cands)

    def test_fullsupport_identity(self, fullsupport):
        cp1, cp2 = counterpart_games(fullsupport)
        cands = reconstruct_candidates(enumerate_nash_single(cp1),
                                       enumerate_nash_single(cp2),
                                       Permutation.identity(3))
        # cross-pairs with unequal supports are rejected; only full x full matches
        assert profiles(cands) == {
            ((F("1/3"), F("1/3"), F("1/3")), (F("2/7"), F("3/7"), F("2/7")))}

    def test_extended_bos_swap_unpermutes(self, bos_extended):
        padded, _ = pad_to_square(bos_extended)
        perm = Permutation((0, 2, 1))
        gp = permute_columns(padded, perm)
        cp1, cp2 = counterpart_games(gp)
        cands = reconstruct_candidates(enumerate_nash_single(cp1),
                                       enumerate_nash_single(cp2), perm)
        got = profiles(cands)
        assert ((F("3/5"), F("2/5"), F(0)), (F("2/5"), F(0), F("3/5"))) in got
        assert ((F(0), F(1), F(0)), (F(0), F(0), F(1))) in got


class TestDecompose:
    def test_extended_bos_per_permutation(self, bos_extended):
        report = decompose(bos_extended)
        assert report.agreement is True
        assert report.degeneracy.degenerate
        by_perm = {entry.permutation.mapping: entry for entry in report.per_permutation}
        identity_pairs = profiles(by_perm[(0, 1, 2)].matched_pairs)
        assert identity_pairs == {((F(1), F(0), F(0)), (F(1), F(0), F(0)))}
        swap_pairs = profiles(by_perm[(0, 2, 1)].matched_pairs)
        assert ((F("3/5"), F("2/5"), F(0)), (F("2/5"), F(0), F("3/5"))) in swap_pairs
        assert ((F(0), F(1), F(0)), (F(0), F(0), F(1))) in swap_pairs
        assert profiles(report.reconstructed) == {
            ((F(1), F(0)), (F(1), F(0), F(0))),
            ((F(0), F(1)), (F(0), F(0), F(1))),
            ((F("3/5"), F("2/5")), (F("2/5"), F(0), F("3/5"))),
        }

    def test_leduc_single_equilibrium(self, leduc):
        report = decompose(leduc)
        assert report.agreement is True
        assert profiles(report.reconstructed) == {
            ((F("29/35"), F(0), F("6/35")), (F("9/28"), F(0), F("19/28")))}
        # CP2's pure equilibria are in its own list but never reconstructed
        _, cp2 = counterpart_games(leduc)
        cp2_points = {c.x.probs for c in enumerate_nash_single(cp2)}
        assert (F(1), F(0), F(0)) in cp2_points and (F(0), F(0), F(1)) in cp2_points
        xs = {c.x.probs for c in report.reconstructed}
        assert (F(1), F(0), F(0)) not in xs and (F(0), F(0), F(1)) not in xs

    def test_symmetric_game_reduces_to_direct(self, pd):
        report = decompose(pd)
        assert report.agreement is True
        assert profiles(report.reconstructed) == {((F(0), F(1)), (F(0), F(1)))}

    def test_every_candidate_verified_on_original(self, bos_extended, leduc):
        for g in (bos_extended, leduc):
            for c in decompose(g, verify=False).reconstructed:
                assert is_nash_bimatrix(g, c.x, c.y, tol=0.0)

    def test_no_dummy_mass(self, bos_extended):
        report = decompose(bos_extended)
        rows0 = len(bos_extended.row_actions)
        for c in report.reconstructed:
            assert len(c.x) == rows0

    def test_permutation_invariance(self, fullsupport):
        base = profiles(decompose(fullsupport).reconstructed)
        perm = Permutation((2, 0, 1))
        permuted = permute_columns(fullsupport, perm)
        mapped = set()
        for x, y in profiles(decompose(permuted).reconstructed):
            y_orig = [None] * 3
            for j in range(3):
                y_orig[perm(j)] = y[j]
            mapped.add((x, tuple(y_orig)))
        assert mapped == base

    def test_verify_false_skips_direct(self, bos):
        report = decompose(bos, verify=False)
        assert report.direct_solution is None and report.agreement is None

    def test_column_padding_path(self, bos_extended):
        # swap the players: 3x2 game, dummies land on the column side
        g = bos_extended
        swapped = make_bimatrix(
            "swapped", g.col_actions, g.row_actions,
            [[g.col_payoffs[i][j] for i in range(2)] for j in range(3)],
            [[g.row_payoffs[i][j] for i in range(2)] for j in range(3)])
        report = decompose(swapped)
        assert report.padding.player == "col" and report.padding.added_count == 1
        assert report.agreement is True
        # equilibria are the originals with the roles exchanged
        assert profiles(report.reconstructed) == {
            ((F(1), F(0), F(0)), (F(1), F(0))),
            ((F(0), F(0), F(1)), (F(0), F(1))),
            ((F("2/5"), F(0), F("3/5")), (F("3/5"), F("2/5"))),
        }

    def test_too_large_after_padding(self):
        g = make_bimatrix("big", ["r1"], [f"c{i}" for i in range(6)],
                          [[0] * 6], [[0] * 6])
        with pytest.raises(TooLarge):
            decompose(g)

    def test_forward_direction_on_bundled_games(self, all_games):
        # Every equal-support-size equilibrium of the direct solver is recovered.
        for name, g in all_games.items():
            report = decompose(g)
            direct = {(c.x.probs, c.y.probs) for c in report.direct_solution
                      if len(c.support_x) == len(c.support_y)}
            assert profiles(report.reconstructed) == direct, name

    def test_full_support_combinations_are_equilibria(self, all_games):
        # every pairing of full-support counterpart equilibria is an
        # equilibrium of the two-population game
        for g in all_games.values():
            square = g if g.is_square else pad_to_square(g)[0]
            cp1, cp2 = counterpart_games(square)
            full1 = [c for c in enumerate_nash_single(cp1) if len(c.support_x) == cp1.n]
            full2 = [c for c in enumerate_nash_single(cp2) if len(c.support_x) == cp2.n]
            for y_cand in full1:
                for x_cand in full2:
                    assert is_nash_bimatrix(square, x_cand.x, y_cand.x, tol=0.0)

    def test_report_json_shape(self, bos):
        doc = report_json(decompose(bos))
        assert set(doc) == {"game", "padding", "degeneracy", "per_permutation",
                            "reconstructed", "direct_solution", "agreement"}
        assert doc["agreement"] is True
        assert len(doc["per_permutation"]) == 2
        eq = doc["reconstructed"][0]
        assert set(eq) == {"x", "y", "support_x", "support_y", "strict", "payoffs"}


class TestRoundtrip:
    def test_small_sizes_pass(self):
        report = verify_roundtrip(trials=50, size=2, seed=7)
        assert report.passed and report.counterexample is None
        report = verify_roundtrip(trials=40, size=3, seed=42)
        assert report.passed
        assert report.tested + report.discarded_degenerate == 40

    def test_degenerate_games_discarded(self):
        # A seed-independent check that the filter counts discards.
        rng = random.Random(0)
        found_degenerate = False
        for _ in range(20):
            g = random_game(rng, 3)
            from cpgames import detect_degeneracy
            if detect_degeneracy(g).degenerate:
                found_degenerate = True
        assert found_degenerate
