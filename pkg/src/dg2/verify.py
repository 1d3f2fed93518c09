"""Named identity suites behind the `verify` command.

Each preset family gets presentation self-consistency checks plus the exact
identities it supports: closedness of the 4-forms, the nearly parallel locus,
residual bracket identities, the reduced functional and its derivatives, the
pullback lemmas, and the product Calabi-Yau condition.  Every check is exact
polynomial arithmetic unless its name says otherwise.
"""

from __future__ import annotations

import random
from fractions import Fraction

from . import functional as fn
from . import instanton as inst
from . import models
from .cdga import Report, validate_presentation
from .scalars import Poly, Scalar

PRESET_NAMES = ("sasakian", "sasakian-asd", "cy3", "hypersymplectic")

_PAIR_NAMES = {1: ("eta2", "eta3"), 2: ("eta3", "eta1"), 3: ("eta1", "eta2")}


def _residual_targets(epsilon: int, k_poly: Poly | None) -> list[Poly]:
    """The deformed residual coefficients built directly from the brackets."""
    a = [Poly.var("a1"), Poly.var("a2"), Poly.var("a3")]
    t2 = Poly.var("t", 2)
    r2 = a[0] ** 2 + a[1] ** 2 + a[2] ** 2
    k_sq = k_poly * k_poly if k_poly is not None else Poly.zero()
    out = []
    for i in (1, 2, 3):
        eps_i = epsilon if i in (1, 2) else 1
        bracket = r2 * 4 - k_sq - (Poly.const(1) - t2 * (2 * eps_i))
        out.append(a[i - 1] * bracket * 2)
    return out


def _functional_target(epsilon: int) -> Poly:
    x = Poly.var("a3")
    y = Poly.var("a1")
    t2 = Poly.var("t", 2)
    s2 = x ** 2 + y ** 2
    return -(s2 * (s2 * 2 - 1) + t2 * 2 * (x ** 2 + y ** 2 * epsilon))


def _gradient_targets(epsilon: int) -> tuple[Poly, Poly]:
    x = Poly.var("a3")
    y = Poly.var("a1")
    t2 = Poly.var("t", 2)
    s2 = x ** 2 + y ** 2
    gx = x * -2 * (s2 * 4 + t2 * 2 - 1)
    gy = y * -2 * (s2 * 4 + t2 * 2 * epsilon - 1)
    return gx, gy


def _sasakian_suite() -> Report:
    report = Report()
    for eps in (1, -1):
        tag = f"eps{eps:+d}"
        preset = models.sasakian_preset(eps)
        pres = preset.presentation
        phi = models.build_phi(preset)
        psi = models.build_psi(preset)

        report.add(f"dpsi-zero-{tag}", psi.d().is_zero(), str(psi.d()))
        t3 = Poly.var("t", 3)
        report.add(
            f"phi-top-coefficient-{tag}",
            phi.coefficient(("eta1", "eta2", "eta3")) == t3 * eps,
        )
        report.add(
            f"phi-eta3-omega3-coefficient-{tag}",
            phi.coefficient(("eta3", "omega3")) == Poly.var("t") * (-eps),
        )

        sols = models.solve_nearly_parallel(eps)
        if eps == 1:
            want_t = Scalar(0, Fraction(1, 5), 5)
            want_lam = Scalar(0, Fraction(12, 5), 5)
        else:
            want_t = Scalar(1)
            want_lam = Scalar(4)
        report.add(
            f"nearly-parallel-locus-{tag}",
            len(sols) == 1 and sols[0].t == want_t and sols[0].lam == want_lam,
            f"got {[(str(s.t), str(s.lam)) for s in sols]}",
        )

        ansatz = inst.ConnectionAnsatz(preset)
        g2res = inst.g2_residual(ansatz, psi)
        t2 = Poly.var("t", 2)
        ok = True
        for i in (1, 2, 3):
            eps_i = eps if i in (1, 2) else 1
            want = Poly.var(f"a{i}") * -2 * (Poly.const(1) - t2 * (2 * eps_i))
            ok = ok and g2res.coefficient(_PAIR_NAMES[i] + ("v",)) == want
        report.add(f"g2-residual-coefficients-{tag}", ok)

        at_half = [
            p.reduce_square("t", Fraction(1, 2))
            for p in g2res.coefficients.values()
        ]
        if eps == 1:
            report.add(
                "g2-all-connections-solve-at-u-half-eps+1",
                all(p.is_zero() for p in at_half),
            )
        else:
            axis = [
                p.reduce_square("t", Fraction(1, 2)).substitute({"a1": 0, "a2": 0})
                for p in g2res.coefficients.values()
            ]
            report.add(
                "g2-axis-solves-at-u-half-eps-1", all(p.is_zero() for p in axis)
            )

        dres = inst.deformed_residual(ansatz, psi)
        targets = _residual_targets(eps, None)
        ok = all(
            dres.coefficient(_PAIR_NAMES[i] + ("v",)) == targets[i - 1]
            for i in (1, 2, 3)
        )
        report.add(f"deformed-residual-brackets-{tag}", ok)

        f_form = inst.curvature(ansatz)
        cube = f_form.wedge(f_form).wedge(f_form)
        a = [Poly.var("a1"), Poly.var("a2"), Poly.var("a3")]
        r2 = a[0] ** 2 + a[1] ** 2 + a[2] ** 2
        want_cube = pres.zero_form()
        for i in (1, 2, 3):
            want_cube = want_cube + pres.wedge_of(
                _PAIR_NAMES[i] + ("v",), r2 * a[i - 1] * -48
            )
        report.add(f"curvature-cube-identity-{tag}", cube == want_cube)

        cf = fn.functional_direct(preset)
        report.add(
            f"functional-closed-form-{tag}",
            cf.poly == _functional_target(eps),
            f"{cf.poly} != {_functional_target(eps)}",
        )

        swap = cf.pre_poly.substitute({"a1": Poly.var("a2"), "a2": Poly.var("a1")})
        rot = cf.pre_poly.substitute({"a1": Poly.var("a2"), "a2": -Poly.var("a1")})
        report.add(
            f"functional-rotation-invariance-{tag}",
            swap == cf.pre_poly and rot == cf.pre_poly,
        )

        trans = fn.functional_transgression(0, ansatz)
        report.add(
            f"transgression-equals-direct-{tag}",
            trans == cf.pre_poly,
            f"{trans} != {cf.pre_poly}",
        )

        gx, gy = fn.gradient(cf)
        tx, ty = _gradient_targets(eps)
        report.add(f"gradient-identity-{tag}", gx == tx and gy == ty)

        grad_matches = True
        for i in (1, 2, 3):
            lhs = trans.differentiate(f"a{i}")
            rhs = -dres.coefficient(_PAIR_NAMES[i] + ("v",))
            grad_matches = grad_matches and lhs == rhs
        report.add(f"critical-locus-is-residual-locus-{tag}", grad_matches)

    # transition value u = 1/2: F collapses to -2(x^2+y^2)^2 + (1-eps) y^2
    special_ok = True
    x, y = Poly.var("a3"), Poly.var("a1")
    s2 = x ** 2 + y ** 2
    for eps in (1, -1):
        cf = fn.closed_form(eps)
        at_half = cf.poly.reduce_square("t", Fraction(1, 2))
        special_ok = special_ok and at_half == -2 * s2 ** 2 + (1 - eps) * y ** 2
    report.add("functional-shape-at-transition", special_ok)

    # origin Hessian data, both signs
    ok = True
    for eps in (1, -1):
        cf = fn.closed_form(eps)
        for u in (Fraction(1, 5), Fraction(1, 2), Fraction(1)):
            cp = fn.hessian_at(cf, 0, 0, u)
            want = sorted(
                (2 * (1 - 2 * u), 2 * (1 - 2 * eps * u))
            )
            ok = ok and list(cp.eigenvalues) == want
            if u < Fraction(1, 2):
                ok = ok and cp.kind == "min"
            elif u == Fraction(1, 2):
                ok = ok and cp.kind == "degenerate"
            else:
                ok = ok and cp.kind == ("max" if eps == 1 else "saddle")
    report.add("hessian-origin-eigenvalues-and-classes", ok)

    sphere = inst.classify_deformed(1, Fraction(1, 5), 0)
    report.add(
        "classification-sphere-radius-3-20",
        sphere.branch("sphere") is not None
        and sphere.branch("sphere").radius_sq == Fraction(3, 20),
    )
    circle = inst.classify_deformed(-1, Fraction(1), 0)
    report.add(
        "classification-circle-only-at-u-1",
        circle.branch("circle").radius_sq == Fraction(3, 4)
        and circle.branch("point_pair") is None,
    )
    table_ok = True
    for eps in (1, -1):
        for u in (Fraction(1, 4), Fraction(1)):
            table_ok = table_ok and inst.verify_solution_set(
                inst.classify_deformed(eps, u, 0), samples=5
            ).ok
    report.add("classification-spot-verification", table_ok)

    rows = fn.moduli_scan(1, 0, [0.25])
    ok = (
        len(rows) == 1
        and rows[0][1] == "sphere"
        and abs(rows[0][2] - 0.35355339059327373) < 1e-12
    )
    report.add("scan-sphere-radius-at-u-quarter", ok)
    return report


def _sasakian_asd_suite() -> Report:
    report = Report()
    for eps in (1, -1):
        preset = models.sasakian_preset(eps, with_asd=True)
        psi = models.build_psi(preset)
        report.add(f"dpsi-zero-eps{eps:+d}", psi.d().is_zero())
        report.extend(models.check_pullback_asd(preset))

        pres = preset.presentation
        pulled = inst.ConnectionAnsatz(preset, coeffs=(0, 0, 0), k=2)
        report.add(
            f"asd-pullback-residual-zero-eps{eps:+d}",
            inst.deformed_residual(pulled, psi).is_zero(),
        )

        f0 = pres.wedge_of(("alpha",), 2)
        minus_f0_sq = -(f0.wedge(f0))
        report.add(
            f"base-curvature-norm-eps{eps:+d}",
            minus_f0_sq == pres.wedge_of(("v",), 8),
        )

        a_form = inst.ConnectionAnsatz(preset).one_form()
        da = a_form.d()
        alpha = pres.wedge_of(("alpha",))
        report.add(
            f"da-squared-wedge-alpha-zero-eps{eps:+d}",
            da.wedge(da).wedge(alpha).is_zero(),
        )
        report.add(
            f"alpha-cubed-zero-eps{eps:+d}",
            alpha.wedge(alpha).wedge(alpha).is_zero(),
        )

        # symbolic bundle charge via the c symbol
        f_sym = da + pres.wedge_of(("alpha",), Poly.var("c"))
        dres = inst.deformed_residual_form(f_sym, psi)
        targets = _residual_targets(eps, Poly.var("c"))
        ok = all(
            dres.coefficient(_PAIR_NAMES[i] + ("v",)) == targets[i - 1]
            for i in (1, 2, 3)
        )
        report.add(f"deformed-residual-brackets-symbolic-k-eps{eps:+d}", ok)

    preset = models.sasakian_preset(1, with_asd=True)
    axis = inst.ConnectionAnsatz(preset, coeffs=(0, 0, Poly.var("a3")), k=1)
    value = fn.functional_transgression(1, axis)
    deriv = value.differentiate("a3")
    reduced = deriv.reduce_square(
        "a3", (Poly.const(2) - Poly.var("t", 2) * 2) * Fraction(1, 4)
    )
    report.add("transgression-k1-axis-critical-points-extension", reduced.is_zero())
    return report


def _cy3_suite() -> Report:
    report = Report()
    preset = models.cy3_preset()
    phi = models.build_phi(preset)
    psi = models.build_psi(preset)
    report.add("dphi-zero", phi.d().is_zero())
    report.add("dpsi-zero", psi.d().is_zero())
    report.extend(models.check_cy3_lemma(preset))
    return report


def _hypersymplectic_suite(q_matrix=None) -> Report:
    report = Report()
    if q_matrix is None:
        q_matrix = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    preset = models.hypersymplectic_preset(q_matrix)
    psi = models.build_psi(preset)
    report.add("dpsi-zero", psi.d().is_zero())
    report.extend(models.check_pullback_asd(preset))

    rng = random.Random(20260810)
    ok = True
    for _ in range(5):
        q = models.random_positive_definite_q(rng)
        sub = models.check_pullback_asd(models.hypersymplectic_preset(q))
        ok = ok and sub.ok
    report.add("random-positive-definite-Q-5-samples", ok)
    return report


def run_suite(
    preset_name: str,
    q_matrix=None,
    pairs: int = 200,
    triples: int = 500,
) -> Report:
    if preset_name not in PRESET_NAMES:
        raise ValueError(f"unknown preset {preset_name!r}")
    report = Report()
    if preset_name == "sasakian":
        pres = models.sasakian_preset(1).presentation
        report.extend(validate_presentation(pres, pairs, triples), prefix="presentation:")
        report.extend(_sasakian_suite())
    elif preset_name == "sasakian-asd":
        pres = models.sasakian_preset(1, with_asd=True).presentation
        report.extend(validate_presentation(pres, pairs, triples), prefix="presentation:")
        report.extend(_sasakian_asd_suite())
    elif preset_name == "cy3":
        pres = models.cy3_preset().presentation
        report.extend(validate_presentation(pres, pairs, triples), prefix="presentation:")
        report.extend(_cy3_suite())
    else:
        q = q_matrix if q_matrix is not None else [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
        pres = models.hypersymplectic_preset(q).presentation
        report.extend(validate_presentation(pres, pairs, triples), prefix="presentation:")
        report.extend(_hypersymplectic_suite(q_matrix))
    out = Report()
    out.extend(report, prefix=f"{preset_name}:")
    return out


def run_all(q_matrix=None, pairs: int = 200, triples: int = 500) -> Report:
    report = Report()
    for name in PRESET_NAMES:
        report.extend(run_suite(name, q_matrix, pairs, triples))
    return report
