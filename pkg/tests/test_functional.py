import math
import random
from fractions import Fraction

import pytest

from dg2.functional import (
    GridSpec,
    closed_form,
    critical_points_numeric,
    functional_direct,
    functional_transgression,
    gradient,
    grid_export,
    hessian_at,
    moduli_scan,
)
from dg2.instanton import ConnectionAnsatz, classify_deformed, deformed_residual
from dg2.models import sasakian_preset
from dg2.scalars import Poly

PAIRS = {1: ("eta2", "eta3"), 2: ("eta3", "eta1"), 3: ("eta1", "eta2")}


def target_poly(eps):
    x, y, t = Poly.var("a3"), Poly.var("a1"), Poly.var("t")
    s2 = x ** 2 + y ** 2
    return -(s2 * (2 * s2 - 1) + 2 * t ** 2 * (x ** 2 + eps * y ** 2))


class TestClosedForm:
    @pytest.mark.parametrize("eps", [1, -1])
    def test_matches_reduced_quartic(self, eps):
        cf = functional_direct(sasakian_preset(eps))
        assert cf.poly == target_poly(eps)

    def test_origin_value(self):
        cf = closed_form(1)
        assert cf.poly.substitute({"a1": 0, "a3": 0}).is_zero()

    def test_value_on_circle_of_maxima(self):
        # eps = -1, t = 1: at x = 0, y^2 = 3/4 the value is 9/8
        cf = closed_form(-1)
        p = cf.poly.reduce_square("t", 1).substitute({"a3": 0})
        value = p.reduce_square("a1", Fraction(3, 4))
        assert value == Poly.const(Fraction(9, 8))

    @pytest.mark.parametrize("eps", [1, -1])
    def test_rotational_invariance(self, eps):
        pre = functional_direct(sasakian_preset(eps)).pre_poly
        a1, a2 = Poly.var("a1"), Poly.var("a2")
        assert pre.substitute({"a1": a2, "a2": a1}) == pre
        assert pre.substitute({"a1": a2, "a2": -a1}) == pre

    def test_even_in_both_coordinates(self):
        cf = closed_form(1)
        a1, a3 = Poly.var("a1"), Poly.var("a3")
        assert cf.poly.substitute({"a1": -a1}) == cf.poly
        assert cf.poly.substitute({"a3": -a3}) == cf.poly

    def test_shape_at_transition_value(self):
        # at u = 1/2 the functional is -2(x^2+y^2)^2 + (1-eps) y^2
        x, y = Poly.var("a3"), Poly.var("a1")
        s2 = x ** 2 + y ** 2
        for eps in (1, -1):
            at_half = closed_form(eps).poly.reduce_square("t", Fraction(1, 2))
            assert at_half == -2 * s2 ** 2 + (1 - eps) * y ** 2
        # eps = +1: nonpositive with equality only at the origin, on a fine grid
        cf = closed_form(1)
        t = math.sqrt(0.5)
        for i in range(-20, 21):
            for j in range(-20, 21):
                v = cf.eval(i / 20, j / 20, t)
                if i == 0 and j == 0:
                    assert v == 0.0
                else:
                    assert v < 1e-15
        # eps = -1: along y = 0 a local max at 0, along x = 0 a local min at 0
        cfm = closed_form(-1)
        assert cfm.eval(0.1, 0.0, t) < cfm.eval(0.0, 0.0, t)
        assert cfm.eval(0.0, 0.1, t) > cfm.eval(0.0, 0.0, t)


class TestTransgression:
    @pytest.mark.parametrize("eps", [1, -1])
    def test_equals_direct_on_trivial_bundle(self, eps):
        preset = sasakian_preset(eps)
        ansatz = ConnectionAnsatz(preset)
        direct = functional_direct(preset)
        assert functional_transgression(0, ansatz) == direct.pre_poly

    def test_zero_at_base_connection(self):
        preset = sasakian_preset(1, with_asd=True)
        base = ConnectionAnsatz(preset, coeffs=(0, 0, 0), k=2)
        assert functional_transgression(2, base).is_zero()

    def test_bundle_mismatch(self):
        preset = sasakian_preset(1, with_asd=True)
        with pytest.raises(ValueError):
            functional_transgression(1, ConnectionAnsatz(preset, k=2))

    def test_axis_quartic_critical_points_charged(self):
        # k = 1, a = (0, 0, a3): stationary where a3^2 = (1 - 2u + 1)/4
        preset = sasakian_preset(1, with_asd=True)
        axis = ConnectionAnsatz(preset, coeffs=(0, 0, Poly.var("a3")), k=1)
        value = functional_transgression(1, axis)
        assert value.degree_in("a3") == 4
        deriv = value.differentiate("a3")
        constraint = (2 - 2 * Poly.var("t", 2)) * Fraction(1, 4)
        assert deriv.reduce_square("a3", constraint).is_zero()

    @pytest.mark.parametrize("eps", [1, -1])
    @pytest.mark.parametrize("k", [0, 1, 2])
    def test_gradient_is_minus_residual(self, eps, k):
        # the consistency oracle tying the functional to the instanton module
        preset = sasakian_preset(eps, with_asd=(k != 0))
        ansatz = ConnectionAnsatz(preset, k=k)
        value = functional_transgression(k, ansatz)
        res = deformed_residual(ansatz)
        for i in (1, 2, 3):
            lhs = value.differentiate(f"a{i}")
            rhs = -res.coefficient(PAIRS[i] + ("v",))
            assert lhs == rhs


class TestGradientHessian:
    @pytest.mark.parametrize("eps", [1, -1])
    def test_gradient_closed_form(self, eps):
        gx, gy = gradient(closed_form(eps))
        x, y, t = Poly.var("a3"), Poly.var("a1"), Poly.var("t")
        s2 = x ** 2 + y ** 2
        assert gx == -2 * x * (4 * s2 + 2 * t ** 2 - 1)
        assert gy == -2 * y * (4 * s2 + 2 * eps * t ** 2 - 1)

    def test_gradient_spot_values(self):
        gx, _ = gradient(closed_form(1))
        value = gx.reduce_square("t", Fraction(1, 2)).substitute(
            {"a3": Fraction(1, 2), "a1": 0}
        )
        assert value == Poly.const(-1)
        gx0, gy0 = gradient(closed_form(-1))
        origin = {"a3": 0, "a1": 0}
        assert gx0.substitute(origin).reduce_square("t", 1).is_zero()
        assert gy0.substitute(origin).reduce_square("t", 1).is_zero()

    def test_origin_eigenvalues_exact(self):
        for eps in (1, -1):
            cf = closed_form(eps)
            for u in (Fraction(1, 5), Fraction(1, 2), Fraction(1)):
                cp = hessian_at(cf, 0, 0, u)
                assert cp.exact
                want = sorted((2 * (1 - 2 * u), 2 * (1 - 2 * eps * u)))
                assert list(cp.eigenvalues) == want

    def test_origin_classification(self):
        table = {
            (1, Fraction(1, 5)): "min",
            (-1, Fraction(1, 5)): "min",
            (1, Fraction(1, 2)): "degenerate",
            (-1, Fraction(1, 2)): "degenerate",
            (1, Fraction(1)): "max",
            (-1, Fraction(1)): "saddle",
        }
        for (eps, u), kind in table.items():
            assert hessian_at(closed_form(eps), 0, 0, u).kind == kind

    def test_float_path_degeneracy_flag(self):
        u = 0.7071067812 ** 2
        cp = hessian_at(closed_form(1), 0.0, 0.0, u)
        assert cp.kind == "degenerate"
        assert cp.tolerance_based
        cp2 = hessian_at(closed_form(-1), 0.0, 0.0, 1.0)
        assert cp2.kind == "saddle"
        assert not cp2.tolerance_based

    def test_nonorigin_classification(self):
        # eps=-1, u=1: the points (0, ±sqrt(3)/2) are honest maxima
        cp = hessian_at(closed_form(-1), 0.0, math.sqrt(3) / 2, 1.0)
        assert cp.kind == "max"
        # eps=-1, u<1/2: axis pair are saddles
        cp = hessian_at(closed_form(-1), 0.5, 0.0, Fraction(0, 1) + Fraction(1, 8))
        assert cp.kind == "saddle"


class TestNumericSearch:
    def test_nearly_parallel_plus(self):
        search = critical_points_numeric(1, 1 / math.sqrt(5), seeds=60, rng_seed=7)
        assert search.points
        for p in search.points:
            assert p.grad_norm < 1e-10
            if p.matched_branch == "sphere":
                assert abs(p.x ** 2 + p.y ** 2 - 3 / 20) < 1e-9
            else:
                assert p.matched_branch == "trivial"

    def test_three_sasakian_minus(self):
        search = critical_points_numeric(-1, 1.0, seeds=60, rng_seed=3)
        branches = {p.matched_branch for p in search.points}
        assert branches <= {"trivial", "circle"}
        assert "circle" in branches
        for p in search.points:
            if p.matched_branch == "circle":
                assert abs(abs(p.y) - math.sqrt(3) / 2) < 1e-9
                assert abs(p.x) < 1e-9
                assert p.kind == "max"

    def test_only_origin_above_transition(self):
        search = critical_points_numeric(1, 1.0, seeds=60, rng_seed=5)
        assert {p.matched_branch for p in search.points} == {"trivial"}

    def test_deterministic(self):
        a = critical_points_numeric(1, 0.5, seeds=30, rng_seed=11)
        b = critical_points_numeric(1, 0.5, seeds=30, rng_seed=11)
        assert [(p.x, p.y) for p in a.points] == [(p.x, p.y) for p in b.points]

    def test_finite_difference_gradient(self):
        rng = random.Random(17)
        h = 1e-6
        for eps, t in ((1, 1 / math.sqrt(5)), (-1, 1.0), (1, 1.0)):
            cf = closed_form(eps)
            gx, gy = gradient(cf)
            for _ in range(100):
                x = rng.uniform(-1, 1)
                y = rng.uniform(-1, 1)
                fd_x = (cf.eval(x + h, y, t) - cf.eval(x - h, y, t)) / (2 * h)
                fd_y = (cf.eval(x, y + h, t) - cf.eval(x, y - h, t)) / (2 * h)
                b = {"a3": x, "a1": y, "t": t}
                assert abs(fd_x - gx.eval_float(b)) < 1e-6
                assert abs(fd_y - gy.eval_float(b)) < 1e-6

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            critical_points_numeric(1, 0.0, seeds=5)
        with pytest.raises(ValueError):
            critical_points_numeric(1, 0.5, seeds=0)


class TestExports:
    def test_grid_basic(self):
        rows = grid_export(1, 0.5, GridSpec(-1, 1, -1, 1, 3))
        assert len(rows) == 9
        # y-major ordering: y varies slowest
        assert [r[1] for r in rows[:3]] == [-1.0, -1.0, -1.0]
        at_origin = [r for r in rows if r[0] == 0.0 and r[1] == 0.0]
        assert at_origin[0][2] == 0.0

    def test_grid_symmetry(self):
        rows = grid_export(-1, 0.7, GridSpec(-1, 1, -1, 1, 5))
        values = {(x, y): v for x, y, v in rows}
        for (x, y), v in values.items():
            assert values[(-x, y)] == pytest.approx(v, abs=1e-14)
            assert values[(x, -y)] == pytest.approx(v, abs=1e-14)

    def test_value_at_critical_radius(self):
        # eps=+1, u=1/5: on the ring x^2+y^2 = 3/20 the value is exactly 9/200
        s = math.sqrt(3 / 20)
        t = math.sqrt(0.2)
        rows = grid_export(1, t, GridSpec(-s, s, -s, s, 3))
        ring_value = [v for x, y, v in rows if x == s and y == 0.0]
        assert abs(ring_value[0] - 9 / 200) < 1e-12

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            GridSpec(0, 1, 0, 1, 1)
        with pytest.raises(ValueError):
            GridSpec(1, 0, 0, 1, 5)
        with pytest.raises(ValueError):
            grid_export(1, -1.0, GridSpec(0, 1, 0, 1, 2))

    def test_scan_rows(self):
        rows = moduli_scan(1, 0, [0.25])
        assert len(rows) == 1
        t, branch, r = rows[0]
        assert branch == "sphere" and t == 0.5
        assert abs(r - math.sqrt(1 / 8)) < 1e-15

    def test_scan_point_pair_dies_at_half(self):
        rows = moduli_scan(-1, 0, [0.5])
        assert [b for _, b, _ in rows] == ["circle"]
        assert abs(rows[0][2] - math.sqrt(0.5)) < 1e-15

    def test_scan_circle_intercept(self):
        rows = moduli_scan(-1, 0, [1e-12])
        circle = [r for _, b, r in rows if b == "circle"]
        assert abs(circle[0] - 0.5) < 1e-9

    def test_scan_validation(self):
        with pytest.raises(ValueError):
            moduli_scan(1, 0, [0.0])


class TestCriticalLocusCaseAnalysis:
    def test_gradient_zeros_lie_on_branches(self):
        # case split mirroring the two bracket factors, for rational u
        for eps in (1, -1):
            for num in range(1, 9):
                u = Fraction(num, 4)
                expected = {("trivial", None)}
                pulled = Fraction(1 - 2 * u, 4)
                if eps == 1:
                    if pulled > 0:
                        expected.add(("sphere", pulled))
                else:
                    expected.add(("circle", Fraction(1 + 2 * u, 4)))
                    if pulled > 0:
                        expected.add(("point_pair", pulled))
                got = {("trivial", None)}
                sset = classify_deformed(eps, u, 0)
                for b in sset.branches:
                    if b.kind == "sphere":
                        got.add(("sphere", b.radius_sq))
                    elif b.kind == "circle":
                        got.add(("circle", b.radius_sq))
                    elif b.kind == "point_pair":
                        got.add(("point_pair", b.a3_sq))
                assert got == expected
                # and the gradient brackets vanish on each branch
                cf = closed_form(eps)
                gx, gy = gradient(cf)
                gx_u = gx.reduce_square("t", u)
                gy_u = gy.reduce_square("t", u)
                for kind, rad in got:
                    if kind == "trivial":
                        point = {"a3": 0, "a1": 0}
                        assert gx_u.substitute(point).is_zero()
                        assert gy_u.substitute(point).is_zero()
                    elif kind == "sphere":
                        rew = gx_u.reduce_square(
                            "a3", Poly.const(rad) - Poly.var("a1", 2)
                        )
                        assert rew.substitute({"a3": 0}).is_zero()
                    elif kind == "circle":
                        assert gy_u.substitute({"a3": 0}).reduce_square(
                            "a1", rad
                        ).is_zero()
                    elif kind == "point_pair":
                        assert gx_u.substitute({"a1": 0}).reduce_square(
                            "a3", rad
                        ).is_zero()
