import dataclasses
import math

import numpy as np
import pytest

from satcycles import (
    CrossingSequence,
    NoConvergenceError,
    Params,
    displacement_d,
    dP,
    extract_crossings,
    find_all_cycles,
    g_aux,
    lambda_of_x,
    residual_3z,
    residual_direct,
    solve_crossing_system,
)
from satcycles.crossings import _residual_direct_raw

TWO_PI = 2.0 * math.pi


@pytest.fixture(scope="module")
def three_zonal_case():
    p = Params(a=-0.05, b=0.05, mu=1.5)
    recs = [r for r in find_all_cycles(p) if r.zonal_type == "three_zonal"]
    assert recs, "expected at least one three-zonal cycle"
    cs = extract_crossings(p, recs[0].x0)
    assert cs is not None
    return p, recs[0], cs


class TestGAux:
    def test_zero_slope_collapses_to_offset(self):
        # the forcing term carries a factor s, so s = 0 leaves only b
        p = Params(a=-1, b=1, mu=2)
        for t in (0.0, 0.7, 2.5):
            assert g_aux(t, 0.0, p) == pytest.approx(p.b, abs=1e-14)

    def test_worked_value(self):
        p = Params(a=-1, b=1, mu=2)
        assert g_aux(0.0, 1.0, p) == pytest.approx(2.0, abs=1e-14)

    def test_periodic_in_t(self):
        p = Params(a=-0.3, b=0.8, mu=1.7)
        rng = np.random.default_rng(5)
        for t, s in rng.uniform(-3, 3, (20, 2)):
            assert g_aux(t + TWO_PI, s, p) == pytest.approx(g_aux(t, s, p), abs=1e-12)


class TestCrossingSequence:
    def test_ordering_enforced(self):
        with pytest.raises(ValueError):
            CrossingSequence(1.0, 0.5, 2.0, 3.0)
        with pytest.raises(ValueError):
            CrossingSequence(1.0, 2.0, 3.0, 1.0 + TWO_PI)
        with pytest.raises(ValueError):
            CrossingSequence(-0.1, 0.5, 2.0, 3.0)


class TestResiduals:
    def test_direct_residual_vanishes_on_extracted_cycle(self, three_zonal_case):
        p, _, cs = three_zonal_case
        assert np.max(np.abs(residual_direct(p, cs))) < 1e-8

    def test_rearranged_residual_vanishes_on_direct_solutions(self, three_zonal_case):
        # audit of the exponential form: each component is a nonzero multiple
        # of the corresponding direct transition equation, so it must vanish
        # wherever the direct system does
        p, _, cs = three_zonal_case
        assert np.max(np.abs(residual_3z(p, cs))) < 1e-6

    def test_solution_times_touch_the_boundaries(self, three_zonal_case):
        from satcycles import advance, sample

        p, rec, cs = three_zonal_case
        traj = advance(p, 0.0, rec.x0, 2 * TWO_PI)
        for t, level in ((cs.t1, 1.0), (cs.t2, -1.0), (cs.t3, -1.0), (cs.t4, 1.0)):
            assert sample(p, traj, [t])[0] == pytest.approx(level, abs=1e-8)

    def test_symmetric_solution_has_antiperiodic_times(self, three_zonal_case):
        p, rec, cs = three_zonal_case
        assert rec.symmetric
        assert cs.t3 - cs.t1 == pytest.approx(math.pi, abs=1e-8)
        assert cs.t4 - cs.t2 == pytest.approx(math.pi, abs=1e-8)

    def test_symmetric_times_pair_residual_magnitudes(self):
        # with t3 = t1 + pi and t4 = t2 + pi (and lam = 0), the inner legs are
        # mirror images: |r1| = |r3| and |r2| = |r4| even off a solution
        p = Params(a=-0.05, b=0.05, mu=1.5)
        t1, t2 = 0.9, 2.4
        r = _residual_direct_raw(p, t1, t2, t1 + math.pi, t2 + math.pi)
        assert abs(r[0]) == pytest.approx(abs(r[2]), abs=1e-12)
        assert abs(r[1]) == pytest.approx(abs(r[3]), abs=1e-12)

    def test_invalid_zone_pattern_gives_large_finite_residual(self):
        p = Params(a=-0.05, b=0.05, mu=0.3)
        r = residual_direct(p, CrossingSequence(0.5, 2.0, 3.5, 5.0))
        assert np.all(np.isfinite(r))
        assert np.max(np.abs(r)) > 1e-3

    def test_residuals_periodic_under_full_shift(self):
        p = Params(a=-0.05, b=0.05, mu=1.5)
        t = (0.9, 2.4, 4.1, 5.6)
        shifted = tuple(v + TWO_PI for v in t)
        assert _residual_direct_raw(p, *t) == pytest.approx(
            _residual_direct_raw(p, *shifted), abs=1e-10
        )

    def test_perturbing_one_time_moves_a_residual(self, three_zonal_case):
        p, _, cs = three_zonal_case
        bumped = CrossingSequence(cs.t1, cs.t2 + 1e-3, cs.t3, cs.t4, lam=cs.lam)
        assert np.max(np.abs(residual_direct(p, bumped))) > 1e-6


class TestSolver:
    def test_converges_quickly_from_extracted_seed(self, three_zonal_case):
        p, _, cs = three_zonal_case
        sol = solve_crossing_system(p, cs, max_iter=5)
        assert np.max(np.abs(residual_direct(p, sol))) < 1e-10

    def test_idempotent_on_its_own_output(self, three_zonal_case):
        p, _, cs = three_zonal_case
        sol = solve_crossing_system(p, cs)
        again = solve_crossing_system(p, sol)
        assert np.max(np.abs(sol.as_array() - again.as_array())) <= 1e-12

    def test_local_basin(self, three_zonal_case):
        p, _, cs = three_zonal_case
        sol = solve_crossing_system(p, cs)
        bumped = CrossingSequence(cs.t1 + 1e-2, cs.t2 - 1e-2, cs.t3 + 1e-2, cs.t4 - 1e-2)
        sol2 = solve_crossing_system(p, bumped)
        assert np.max(np.abs(sol.as_array() - sol2.as_array())) < 1e-9

    def test_infeasible_parameters_do_not_converge(self):
        p = Params(a=-0.05, b=0.05, mu=0.1)
        with pytest.raises(NoConvergenceError):
            solve_crossing_system(p, CrossingSequence(0.5, 2.0, 3.5, 5.0))


class TestLambdaOfX:
    def test_zero_on_existing_cycles(self):
        p = Params(a=-1, b=1, mu=1.2)
        for x0 in (-2.6, -0.6, 1.4):
            assert abs(lambda_of_x(p, x0)) < 1e-9

    def test_defining_property_in_the_linear_case(self):
        p = Params(a=-1, b=-1, mu=1)
        for x in (-1.5, 0.2, 2.0):
            lam = lambda_of_x(p, x)
            biased = dataclasses.replace(p, lam=lam)
            assert abs(displacement_d(biased, x)) < 1e-10

    def test_continuity_on_a_scan_grid(self):
        p = Params(a=-1, b=1, mu=1.3)
        for x in (-0.3, 0.4, 1.1):
            assert abs(lambda_of_x(p, x + 1e-6) - lambda_of_x(p, x)) < 1e-3

    def test_extremum_flags_a_fold(self):
        # ternary search for the interior minimum of lam(x); the biased
        # equation there must carry a nonhyperbolic cycle
        p = Params(a=-1, b=1, mu=1.3)
        lo, hi = -0.4, 0.4
        for _ in range(35):
            m1 = lo + (hi - lo) / 3.0
            m2 = hi - (hi - lo) / 3.0
            if lambda_of_x(p, m1) <= lambda_of_x(p, m2):
                hi = m2
            else:
                lo = m1
        x_star = 0.5 * (lo + hi)
        lam_star = lambda_of_x(p, x_star)
        biased = dataclasses.replace(p, lam=lam_star)
        assert abs(displacement_d(biased, x_star)) < 1e-9
        assert abs(dP(biased, x_star) - 1.0) < 1e-4
