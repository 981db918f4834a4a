"""Jacobian correctness against finite differences; stability taxonomy."""

import math
import random

import numpy as np
import pytest

from cpgames import (
    MixedStrategy,
    NotNash,
    NotRestPoint,
    classify_rest_point,
    counterpart_games,
    enumerate_nash_bimatrix,
    enumerate_nash_single,
    enumerate_rest_points,
    make_single,
    pad_to_square,
    rd_coupled_field,
    rd_jacobian,
    rd_single_field,
    two_species_ess_check,
)
from cpgames.decomposition import random_game
from cpgames.stability import classification_json, tangent_eigenvalues


def fd_jacobian(f, z, h=1e-6):
    """Central-difference oracle for the Jacobian of f at z."""
    z = np.asarray(z, dtype=float)
    n = z.shape[0]
    m = f(z).shape[0]
    jac = np.empty((m, n))
    for j in range(n):
        dz = np.zeros(n)
        dz[j] = h
        jac[:, j] = (f(z + dz) - f(z - dz)) / (2 * h)
    return jac


def single_fd(s, x):
    return fd_jacobian(lambda z: rd_single_field(s, z), x)


def coupled_fd(g, x, y):
    n = g.n_rows

    def f(z):
        vx, vy = rd_coupled_field(g, z[:n], z[n:])
        return np.concatenate([vx, vy])

    return fd_jacobian(f, np.concatenate([x, y]))


def bundled_rest_points(all_games):
    """Every rest point of every bundled counterpart plus all coupled equilibria."""
    singles, coupleds = [], []
    for g in all_games.values():
        square = g if g.is_square else pad_to_square(g)[0]
        for s in counterpart_games(square):
            for rp in enumerate_rest_points(s):
                singles.append((s, rp.point.as_floats()))
        for c in enumerate_nash_bimatrix(g):
            coupleds.append((g, c.x.as_floats(), c.y.as_floats()))
    return singles, coupleds


class TestJacobianMatchesFiniteDifferences:
    def test_all_bundled_rest_points(self, all_games):
        singles, coupleds = bundled_rest_points(all_games)
        assert singles and coupleds
        for s, x in singles:
            analytic = rd_jacobian("single", s, x)
            assert np.abs(analytic - single_fd(s, x)).max() < 1e-5
        for g, x, y in coupleds:
            analytic = rd_jacobian("coupled", g, (x, y))
            assert np.abs(analytic - coupled_fd(g, x, y)).max() < 1e-5

    def test_random_rest_points(self):
        rng = random.Random(31)
        checked = 0
        while checked < 60:
            n = rng.choice([2, 3])
            s = make_single("t", [f"a{i}" for i in range(n)],
                            [[rng.randint(-5, 5) for _ in range(n)] for _ in range(n)])
            for rp in enumerate_rest_points(s):
                if rp.continuum:
                    continue
                x = rp.point.as_floats()
                assert np.abs(rd_jacobian("single", s, x) - single_fd(s, x)).max() < 1e-5
                checked += 1

    def test_random_coupled_equilibria(self):
        rng = random.Random(37)
        checked = 0
        while checked < 40:
            g = random_game(rng, rng.choice([2, 3]))
            for c in enumerate_nash_bimatrix(g):
                x, y = c.x.as_floats(), c.y.as_floats()
                assert np.abs(rd_jacobian("coupled", g, (x, y)) - coupled_fd(g, x, y)).max() < 1e-5
                checked += 1

    def test_not_rest_point_rejected(self, bos):
        with pytest.raises(NotRestPoint):
            rd_jacobian("coupled", bos, ([0.5, 0.5], [0.5, 0.5]))


class TestClassification:
    def test_pd_strict_equilibrium_sink(self, pd):
        cls = classify_rest_point("coupled", pd, (MixedStrategy.exact([0, 1]),
                                                  MixedStrategy.exact([0, 1])), True)
        assert cls.category == "ess_stable" and cls.local_type == "sink"
        assert all(z.imag == 0 and z.real < 0 for z in cls.eigenvalues)
        assert cls.two_species_ess

    def test_rps_centroid_center(self, rps):
        cp1, _ = counterpart_games(rps)
        cls = classify_rest_point("single", cp1, [1 / 3, 1 / 3, 1 / 3], True)
        assert cls.category == "nash_not_ess" and cls.local_type == "center"
        expected = 1 / math.sqrt(3)
        imags = sorted(z.imag for z in cls.eigenvalues)
        assert abs(imags[0] + expected) < 1e-9 and abs(imags[1] - expected) < 1e-9

    def test_bos_mixed_saddle(self, bos):
        x = MixedStrategy.exact(["3/5", "2/5"])
        y = MixedStrategy.exact(["2/5", "3/5"])
        cls = classify_rest_point("coupled", bos, (x, y), True)
        assert cls.category == "nash_not_ess" and cls.local_type == "saddle"
        reals = sorted(z.real for z in cls.eigenvalues)
        assert abs(reals[0] + 1.2) < 1e-9 and abs(reals[1] - 1.2) < 1e-9
        assert not cls.two_species_ess

    def test_bos_pure_ess(self, bos):
        for pure in ([1, 0], [0, 1]):
            cls = classify_rest_point("coupled", bos, (MixedStrategy.exact(pure),
                                                       MixedStrategy.exact(pure)), True)
            assert cls.category == "ess_stable" and cls.two_species_ess

    def test_extended_bos_cp2_face_rest_point(self, bos_extended):
        padded, _ = pad_to_square(bos_extended)
        _, cp2 = counterpart_games(padded)
        face = [r for r in enumerate_rest_points(cp2)
                if not r.is_nash and len(r.support) == 2][0]
        cls = classify_rest_point("single", cp2, face.point, nash_status=face.is_nash)
        assert cls.category == "non_nash_rest_point"

    def test_fullsupport_counterpart_equilibria_unstable(self, fullsupport):
        cp1, cp2 = counterpart_games(fullsupport)
        m1 = [c for c in enumerate_nash_single(cp1) if len(c.support_x) == 3][0]
        m2 = [c for c in enumerate_nash_single(cp2) if len(c.support_x) == 3][0]
        for s, c in ((cp1, m1), (cp2, m2)):
            cls = classify_rest_point("single", s, c.x, nash_status=True)
            assert cls.local_type != "sink"
            assert cls.category == "nash_not_ess"

    def test_json_shape(self, rps):
        cp1, _ = counterpart_games(rps)
        doc = classification_json(classify_rest_point("single", cp1, [1 / 3] * 3, True))
        assert doc["category"] == "nash_not_ess"
        assert doc["local_type"] == "center"
        assert doc["two_species_ess"] is False
        assert all(len(pair) == 2 for pair in doc["eigenvalues"])


class TestTwoSpeciesEss:
    def test_bos_examples(self, bos):
        e1 = MixedStrategy.exact([1, 0])
        assert two_species_ess_check(bos, e1, e1)
        x = MixedStrategy.exact(["3/5", "2/5"])
        y = MixedStrategy.exact(["2/5", "3/5"])
        assert not two_species_ess_check(bos, x, y)

    def test_pd_defect(self, pd):
        d = MixedStrategy.exact([0, 1])
        assert two_species_ess_check(pd, d, d)

    def test_requires_nash(self, pd):
        c = MixedStrategy.exact([1, 0])
        with pytest.raises(NotNash):
            two_species_ess_check(pd, c, c)

    def test_strict_implies_sink(self, all_games):
        for g in all_games.values():
            for c in enumerate_nash_bimatrix(g):
                if not c.is_strict:
                    continue
                cls = classify_rest_point("coupled", g, (c.x, c.y), True)
                assert cls.two_species_ess
                assert cls.category == "ess_stable"

    def test_strict_pure_correspondence_random(self):
        # e_i strict in both counterparts <=> (e_i, e_i) strict in the game
        from cpgames.solver import _single_strict, _bimatrix_strict
        rng = random.Random(41)
        for _ in range(100):
            n = rng.choice([2, 3])
            g = random_game(rng, n)
            cp1, cp2 = counterpart_games(g)
            for i in range(n):
                e = MixedStrategy.exact([1 if k == i else 0 for k in range(n)])
                both_strict = _single_strict(cp1, e) and _single_strict(cp2, e)
                assert both_strict == _bimatrix_strict(g, e, e)


class TestEigenvalueInvariance:
    def test_relabel_actions(self, fullsupport):
        # simultaneous row+column permutation of a counterpart leaves spectra alone
        cp1, _ = counterpart_games(fullsupport)
        perm = [2, 0, 1]
        relabeled = make_single(
            "t", [cp1.actions[p] for p in perm],
            [[cp1.payoffs[perm[i]][perm[j]] for j in range(3)] for i in range(3)])
        for c in enumerate_nash_single(cp1):
            x = c.x.as_floats()
            x_perm = np.array([x[p] for p in perm])
            eig_a = tangent_eigenvalues("single", rd_jacobian("single", cp1, x), (3,))
            eig_b = tangent_eigenvalues("single", rd_jacobian("single", relabeled, x_perm), (3,))
            a = sorted(eig_a, key=lambda z: (round(z.real, 9), round(z.imag, 9)))
            b = sorted(eig_b, key=lambda z: (round(z.real, 9), round(z.imag, 9)))
            assert max(abs(u - v) for u, v in zip(a, b)) < 1e-9
