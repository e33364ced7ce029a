import math
import random

import mpmath
import pytest
from mpmath import mpc, mpf

from lattice_rotor.corelattice import ComplexVector, Rotation
from lattice_rotor.oracle import (
    CoveringOutcome,
    PlanarIsometry,
    apply_isometry,
    check_prop_sep,
    covering_time,
    isometry_max_frac,
    separated_probe,
    separation,
    tau_estimate,
)
from lattice_rotor.precision import working_precision
from lattice_rotor.products import EvenDimPointSet

B = 128


def _pair():
    with working_precision(B):
        return ComplexVector((mpc(0), mpc(mpf("0.5"), 0)), B)


def _triangle(scale=1):
    with working_precision(B):
        w = mpmath.expjpi(mpf(2) / 3)
        return ComplexVector(tuple(mpf(scale) * z for z in (mpc(1), w, w * w)), B)


class TestPlanarIsometry:
    def test_translation_reduced_mod_one(self):
        with working_precision(B):
            g = PlanarIsometry(
                Rotation.from_angle(mpf("0.7"), B), False, (mpf("1.25"), mpf("-0.5"))
            )
        assert g.translation == (mpf("0.25"), mpf("0.5"))

    def test_preserves_pairwise_distances(self):
        with working_precision(B):
            vec = ComplexVector((mpc(1, 2), mpc(-3, "0.5"), mpc(0)), B)
            d0 = abs(vec.entries[0] - vec.entries[1])
        for reflect in (False, True):
            with working_precision(B):
                g = PlanarIsometry(
                    Rotation.from_angle(mpf("2.1"), B), reflect, (mpf("0.1"), mpf("0.9"))
                )
            img = apply_isometry(g, vec)
            with working_precision(B):
                d1 = abs(img.entries[0] - img.entries[1])
            assert abs(d0 - d1) <= mpf(2) ** (-B + 8) * d0

    def test_json_round_trip(self):
        with working_precision(B):
            g = PlanarIsometry(
                Rotation.from_angle(mpf("1.3"), B), True, (mpf("0.6"), mpf("0.2"))
            )
        back = PlanarIsometry.from_json_dict(g.to_json_dict())
        assert back.to_json_dict() == g.to_json_dict()


class TestTauEstimate:
    def test_singleton_at_origin_is_zero(self):
        est = tau_estimate(ComplexVector((mpc(0),), B), 32, 32, bits=B)
        assert est.upper == 0
        assert est.argmin.translation == (mpf(0), mpf(0))
        assert not est.argmin.reflect
        assert est.certified_lower <= est.upper

    def test_two_point_quarter_value(self):
        # independent mini sweep: images are {u, theta/2 + u}; scan the
        # same 40x40x40 grid with plain floats
        n = 40
        best = float("inf")
        for j in range(n):
            ang = 2 * math.pi * j / n
            hx = 0.5 * math.cos(ang)
            hy = 0.5 * math.sin(ang)
            for a in range(n):
                for b in range(n):
                    ux, uy = a / n, b / n
                    f0 = math.hypot(ux - round(ux), uy - round(uy))
                    x, y = hx + ux, hy + uy
                    f1 = math.hypot(x - round(x), y - round(y))
                    best = min(best, max(f0, f1))
        assert best == 0.25

        est = tau_estimate(_pair(), n, n, with_reflection=True, bits=B)
        assert est.upper == mpf("0.25")

    def test_refinement_never_worsens(self):
        pair = _pair()
        coarse = tau_estimate(pair, 50, 50, with_reflection=True, bits=B)
        fine = tau_estimate(pair, 100, 100, with_reflection=True, bits=B)
        assert fine.upper <= coarse.upper + mpf(2) ** (-B // 2)

    def test_argmin_reproduces_upper(self):
        est = tau_estimate(_pair(), 100, 100, with_reflection=True, bits=B)
        replay = isometry_max_frac(est.argmin, _pair(), B)
        assert abs(replay - est.upper) <= mpf(2) ** (-B // 2)

    def test_upper_always_below_half_diagonal(self):
        est = tau_estimate(_triangle(2), 60, 60, with_reflection=True, bits=B)
        assert est.upper < mpmath.sqrt(mpf(2)) / 2

    def test_grid_spec_names_the_sweep(self):
        est = tau_estimate(_pair(), 40, 50, bits=B)
        assert "40" in est.grid_spec and "50" in est.grid_spec

    def test_reflection_flag_widens_search(self):
        base = tau_estimate(_triangle(3), 80, 80, with_reflection=False, bits=B)
        refl = tau_estimate(_triangle(3), 80, 80, with_reflection=True, bits=B)
        assert refl.upper <= base.upper + mpf(2) ** (-B // 2)

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            tau_estimate(_pair(), 0, 10, bits=B)
        with pytest.raises(ValueError):
            tau_estimate(_pair(), 10, 0, bits=B)

    def test_deterministic(self):
        a = tau_estimate(_triangle(2), 60, 60, with_reflection=True, bits=B)
        b = tau_estimate(_triangle(2), 60, 60, with_reflection=True, bits=B)
        assert a.to_json_dict() == b.to_json_dict()


class TestSeparatedProbe:
    def test_probe_separation_is_exactly_t(self):
        for t in (1, 2, 5):
            assert separation(separated_probe(t, B), B) == mpf(t)

    def test_identity_embedding_value(self):
        with working_precision(B):
            ident = PlanarIsometry(Rotation(mpc(1), B), False, (mpf(0), mpf(0)))
        assert isometry_max_frac(ident, separated_probe(7, B), B) == mpf("0.5")

    def test_positive_t_required(self):
        with pytest.raises(ValueError):
            separated_probe(0, B)


class TestPropSepCheck:
    def test_no_violations_in_short_run(self):
        chk = check_prop_sep(2, 2000, seed=11, bits=B)
        assert chk.samples == 2000
        assert chk.minimum >= mpf(1) / 8 - mpf(2) ** (-B // 2)
        assert chk.violations == ()

    def test_argmin_replay_from_seed_stream(self):
        chk = check_prop_sep(3, 500, seed=4, bits=B)
        rng = random.Random(4)
        draws = []
        for _ in range(500):
            turn = rng.random()
            refl = rng.random() < 0.5
            t1 = rng.random()
            t2 = rng.random()
            draws.append((turn, refl, t1, t2))
        turn, refl, t1, t2 = draws[chk.argmin_index]
        with working_precision(B):
            g = PlanarIsometry(
                Rotation.from_angle(2 * mpmath.pi * mpf(turn), B),
                refl,
                (mpf(t1), mpf(t2)),
            )
        replay = isometry_max_frac(g, separated_probe(3, B), B)
        assert abs(replay - chk.minimum) <= mpf(2) ** (-B // 2)

    def test_deterministic(self):
        a = check_prop_sep(2, 500, seed=9, bits=B)
        b = check_prop_sep(2, 500, seed=9, bits=B)
        assert a.to_json_dict() == b.to_json_dict()

    def test_sample_count_validated(self):
        with pytest.raises(ValueError):
            check_prop_sep(2, 0, seed=1, bits=B)


class TestSeparation:
    def test_three_four_five(self):
        with working_precision(B):
            assert separation(ComplexVector((mpc(0), mpc(3, 4)), B)) == 5

    def test_even_dim_point_set(self):
        ps = EvenDimPointSet(((0, 0, 0, 0), (1, 0, 0, 0), (0, 2, 0, 0)), B)
        assert separation(ps) == 1

    def test_coincident_points_rejected(self):
        with working_precision(B):
            vec = ComplexVector((mpc(1, 1), mpc(1, 1)), B)
        with pytest.raises(ValueError, match="coincide"):
            separation(vec)


class TestCoveringTime:
    def test_unit_speed_line_covers_in_one_period(self):
        out = covering_time((1.0,), 0.1, 10.0)
        assert out.covered
        assert 0.9 <= out.L <= 1.0 + 1e-9

    def test_finer_eps_takes_longer(self):
        golden = (1.0, 1.6180339887498949)
        ls = [covering_time(golden, e, 100000.0).L for e in (0.2, 0.1, 0.05)]
        assert all(l is not None for l in ls)
        assert ls[0] <= ls[1] <= ls[2]

    def test_diagonal_never_covers(self):
        out = covering_time((1.0, 1.0), 0.1, 10000.0)
        assert not out.covered
        assert out.L is None
        assert out.cells_visited < out.cells_total

    def test_dimension_cap(self):
        with pytest.raises(ValueError, match="[Dd]imension"):
            covering_time((1.0,) * 7, 0.4, 10.0)

    def test_oversized_grid_refused(self):
        with pytest.raises(ValueError):
            covering_time((1.0,) * 6, 0.05, 10.0)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            covering_time((1.0,), 0.6, 10.0)  # eps must stay below 1/2
        with pytest.raises(ValueError):
            covering_time((1.0,), 0.1, 0.0)
        with pytest.raises(ValueError):
            covering_time((0.0, 0.0), 0.1, 10.0)

    def test_outcome_serializes(self):
        out = covering_time((1.0,), 0.2, 10.0)
        d = out.to_json_dict()
        assert isinstance(d["L"], str)
        assert isinstance(out, CoveringOutcome)
