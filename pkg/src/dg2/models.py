"""Concrete algebra presets for the three geometric settings.

The 3-Sasakian preset encodes the invariant forms on a 3-Sasakian 7-manifold
fibering over a 4-orbifold: connection 1-forms eta_i, the self-dual curvature
2-forms omega_i, the pulled-back base volume v, and (optionally) an extra
anti-self-dual 2-form alpha normalized so that alpha^2 = -2v.  The CY3 preset
models S^1 x (Calabi-Yau 3-fold) and the hypersymplectic preset a flat
T^3-bundle over a 4-manifold carrying a triple of closed 2-forms with
positive-definite Gram matrix Q.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cdga import Form, Generator, Presentation, Report
from .scalars import Poly, Scalar

_CYCLIC = ((1, 2, 3), (2, 3, 1), (3, 1, 2))


class EngineError(RuntimeError):
    """An internal inconsistency that should be impossible for valid presets."""


def _sasakian_presentation(with_asd: bool) -> Presentation:
    gens = [Generator(f"eta{i}", 1) for i in (1, 2, 3)]
    gens += [Generator(f"omega{i}", 2) for i in (1, 2, 3)]
    if with_asd:
        gens.append(Generator("alpha", 2))
    gens.append(Generator("v", 4))

    relations: dict[tuple[str, ...], list] = {}
    for i in (1, 2, 3):
        relations[(f"omega{i}", f"omega{i}")] = [(2, ("v",))]
        relations[(f"omega{i}", "v")] = []
        for j in range(i + 1, 4):
            relations[(f"omega{i}", f"omega{j}")] = []
    relations[("v", "v")] = []
    if with_asd:
        for i in (1, 2, 3):
            relations[("alpha", f"omega{i}")] = []
        relations[("alpha", "alpha")] = [(-2, ("v",))]
        relations[("alpha", "v")] = []

    differential: dict[str, list] = {"v": []}
    if with_asd:
        differential["alpha"] = []
    for i, j, k in _CYCLIC:
        differential[f"eta{i}"] = [(-2, (f"omega{i}",)), (-2, (f"eta{j}", f"eta{k}"))]
        differential[f"omega{i}"] = [
            (2, (f"omega{j}", f"eta{k}")),
            (-2, (f"eta{j}", f"omega{k}")),
        ]

    return Presentation(
        gens,
        relations,
        differential,
        top=("eta1", "eta2", "eta3", "v"),
        name="sasakian-asd" if with_asd else "sasakian",
    )


@dataclass(frozen=True)
class SasakianPreset:
    epsilon: int
    with_asd: bool
    presentation: Presentation


def sasakian_preset(epsilon: int, with_asd: bool = False) -> SasakianPreset:
    if epsilon not in (1, -1):
        raise ValueError("epsilon must be +1 or -1")
    return SasakianPreset(epsilon, with_asd, _sasakian_presentation(with_asd))


@dataclass(frozen=True)
class CY3Preset:
    presentation: Presentation


def cy3_preset() -> CY3Preset:
    gens = [
        Generator("eta", 1),
        Generator("omega", 2),
        Generator("rho", 3),
        Generator("sigma", 3),
        Generator("vol6", 6),
    ]
    # vol6 is normalized as omega^3/6; rho∧sigma = 4*vol6 matches a unit
    # holomorphic volume form.  Any positive constant gives the same
    # deformed solution set.
    relations = {
        ("omega", "rho"): [],
        ("omega", "sigma"): [],
        ("rho", "sigma"): [(4, ("vol6",))],
        ("omega", "omega", "omega"): [(6, ("vol6",))],
        ("omega", "vol6"): [],
        ("rho", "vol6"): [],
        ("sigma", "vol6"): [],
        ("vol6", "vol6"): [],
    }
    differential = {g.name: [] for g in gens}
    return CY3Preset(
        Presentation(gens, relations, differential, top=("eta", "vol6"), name="cy3")
    )


@dataclass(frozen=True)
class HypersymplecticPreset:
    q_matrix: tuple[tuple[Fraction, ...], ...]
    presentation: Presentation


def _leading_minors(q: Sequence[Sequence[Fraction]]) -> list[Fraction]:
    m1 = q[0][0]
    m2 = q[0][0] * q[1][1] - q[0][1] * q[1][0]
    m3 = (
        q[0][0] * (q[1][1] * q[2][2] - q[1][2] * q[2][1])
        - q[0][1] * (q[1][0] * q[2][2] - q[1][2] * q[2][0])
        + q[0][2] * (q[1][0] * q[2][1] - q[1][1] * q[2][0])
    )
    return [m1, m2, m3]


def hypersymplectic_preset(q_matrix: Sequence[Sequence[Fraction | int]]) -> HypersymplecticPreset:
    q = tuple(tuple(Fraction(x) for x in row) for row in q_matrix)
    if len(q) != 3 or any(len(row) != 3 for row in q):
        raise ValueError("Q must be a 3x3 matrix")
    for i in range(3):
        for j in range(3):
            if q[i][j] != q[j][i]:
                raise ValueError("Q must be symmetric")
    if any(m <= 0 for m in _leading_minors(q)):
        raise ValueError("Q must be positive definite")

    gens = [Generator(f"eta{i}", 1) for i in (1, 2, 3)]
    gens += [Generator(f"omega{i}", 2) for i in (1, 2, 3)]
    gens += [Generator("alpha", 2), Generator("v", 4)]

    relations: dict[tuple[str, ...], list] = {}
    for i in (1, 2, 3):
        for j in range(i, 4):
            relations[(f"omega{i}", f"omega{j}")] = [(2 * q[i - 1][j - 1], ("v",))]
        relations[(f"omega{i}", "alpha")] = []
        relations[(f"omega{i}", "v")] = []
    relations[("alpha", "alpha")] = [(-2, ("v",))]
    relations[("alpha", "v")] = []
    relations[("v", "v")] = []

    differential = {g.name: [] for g in gens}
    return HypersymplecticPreset(
        q,
        Presentation(
            gens, relations, differential, top=("eta1", "eta2", "eta3", "v"),
            name="hypersymplectic",
        ),
    )


Preset = SasakianPreset | CY3Preset | HypersymplecticPreset


# -- three-form / four-form builders ----------------------------------------


def build_phi(preset: Preset) -> Form:
    """The defining 3-form of the structure, with the fiber scale t symbolic."""
    t = Poly.var("t")
    if isinstance(preset, SasakianPreset):
        pres = preset.presentation
        eps = preset.epsilon
        phi = pres.wedge_of(("eta1", "eta2", "eta3"), t ** 3 * eps)
        phi = phi - pres.wedge_of(("eta1", "omega1"), t)
        phi = phi - pres.wedge_of(("eta2", "omega2"), t)
        phi = phi - pres.wedge_of(("eta3", "omega3"), t * eps)
        return phi
    if isinstance(preset, CY3Preset):
        pres = preset.presentation
        return pres.wedge_of(("eta", "omega")) + pres.wedge_of(("rho",))
    raise TypeError("no 3-form builder for this preset")


def build_psi(preset: Preset) -> Form:
    """The dual 4-form, closed for every t (checked by the validators)."""
    t2 = Poly.var("t", 2)
    if isinstance(preset, SasakianPreset):
        pres = preset.presentation
        eps = preset.epsilon
        psi = pres.wedge_of(("v",))
        psi = psi - pres.wedge_of(("eta2", "eta3", "omega1"), t2 * eps)
        psi = psi - pres.wedge_of(("eta3", "eta1", "omega2"), t2 * eps)
        psi = psi - pres.wedge_of(("eta1", "eta2", "omega3"), t2)
        return psi
    if isinstance(preset, HypersymplecticPreset):
        pres = preset.presentation
        psi = pres.wedge_of(("v",))
        psi = psi - pres.wedge_of(("eta2", "eta3", "omega1"), t2)
        psi = psi - pres.wedge_of(("eta3", "eta1", "omega2"), t2)
        psi = psi - pres.wedge_of(("eta1", "eta2", "omega3"), t2)
        return psi
    if isinstance(preset, CY3Preset):
        pres = preset.presentation
        return pres.wedge_of(("omega", "omega"), Fraction(1, 2)) - pres.wedge_of(
            ("eta", "sigma")
        )
    raise TypeError("no 4-form builder for this preset")


# -- nearly parallel locus ---------------------------------------------------


@dataclass(frozen=True)
class NearlyParallelSolution:
    u: Fraction
    t: Scalar
    epsilon: int
    lam: Scalar


def _positive_roots(poly_t: Poly) -> list[Scalar] | None:
    """Exact positive roots of a univariate polynomial in t.

    Returns None when the polynomial is identically zero (no constraint).
    After factoring out the lowest power of t the remaining exponents must be
    even, giving a polynomial of degree <= 2 in u = t^2 whose roots must be
    rational; that covers every constraint these presets produce.
    """
    if poly_t.is_zero():
        return None
    by_t = poly_t.decompose_by("t")
    coeffs: dict[int, Scalar] = {}
    for e, coeff_poly in by_t.items():
        if not coeff_poly.is_constant():
            raise EngineError("constraint involves symbols other than t")
        coeffs[e] = coeff_poly.constant_value()
    low = min(coeffs)
    shifted = {e - low: c for e, c in coeffs.items()}
    if any(e % 2 for e in shifted):
        raise EngineError("constraint has mixed parity in t")
    u_coeffs = {e // 2: c for e, c in shifted.items()}
    deg = max(u_coeffs)
    c0 = u_coeffs.get(0, Scalar(0))
    c1 = u_coeffs.get(1, Scalar(0))
    c2 = u_coeffs.get(2, Scalar(0))
    roots_u: list[Fraction] = []
    if deg == 0:
        pass  # nonzero constant: no roots
    elif deg == 1:
        roots_u.append((-c0 / c1).as_fraction())
    elif deg == 2:
        disc = c1 * c1 - 4 * c2 * c0
        if disc.sign() < 0:
            pass
        else:
            root = Scalar.sqrt_rational(disc.as_fraction())
            for sgn in (1, -1):
                r = (-c1 + root * sgn) / (c2 * 2)
                if r.is_rational:
                    roots_u.append(r.as_fraction())
                else:
                    raise EngineError("irrational squared fiber scale")
    else:
        raise EngineError(f"constraint of degree {deg} in t^2")
    out = [Scalar.sqrt_rational(u) for u in sorted(set(roots_u)) if u > 0]
    return out


def solve_nearly_parallel(epsilon: int) -> list[NearlyParallelSolution]:
    """All positive fiber scales t with d(phi) proportional to psi.

    The proportionality factor is solved from the v-coefficient, which is
    linear in lam; the remaining coefficients become exact univariate
    conditions in t whose common positive roots are returned.
    """
    preset = sasakian_preset(epsilon)
    pres = preset.presentation
    phi = build_phi(preset)
    psi = build_psi(preset)
    lam = Poly.var("lam")
    residual = phi.d() - psi * lam

    v_mono = (pres.index("v"),)
    v_coeff = residual.terms.get(v_mono, Poly.zero())
    by_lam = v_coeff.decompose_by("lam")
    if by_lam.get(1) is None or not by_lam[1].is_constant():
        raise EngineError("v-coefficient is not linear in lam")
    lam_expr = -by_lam.get(0, Poly.zero()) / by_lam[1].constant_value()

    constraints = []
    for mono, coeff in residual.terms.items():
        if mono == v_mono:
            continue
        constraints.append(coeff.substitute({"lam": lam_expr}))

    common: list[Scalar] | None = None
    for poly in constraints:
        roots = _positive_roots(poly)
        if roots is None:
            continue
        if common is None:
            common = roots
        else:
            common = [r for r in common if r in roots]
    if common is None:
        raise EngineError("system imposes no constraint on t")

    solutions = []
    for t_root in common:
        u = (t_root * t_root).as_fraction()
        lam_value = _eval_at_scalar(lam_expr, "t", t_root)
        check = residual.map_coefficients(
            lambda p: _poly_at_scalars(p, {"t": t_root, "lam": lam_value})
        )
        if not check.is_zero():
            raise EngineError("back-substitution left a nonzero residual")
        solutions.append(NearlyParallelSolution(u, t_root, epsilon, lam_value))
    if len(solutions) != 1:
        raise EngineError(f"expected exactly one solution, found {len(solutions)}")
    return solutions


def _eval_at_scalar(poly: Poly, name: str, value: Scalar) -> Scalar:
    return poly.substitute({name: value}).constant_value()


def _poly_at_scalars(poly: Poly, bindings: dict[str, Scalar]) -> Poly:
    return poly.substitute(dict(bindings))


# -- pullback checks -----------------------------------------------------------


def check_pullback_asd(preset: SasakianPreset | HypersymplecticPreset) -> Report:
    """Verify that anti-self-dual pullbacks solve both instanton equations."""
    report = Report()
    if isinstance(preset, SasakianPreset):
        if not preset.with_asd:
            raise ValueError("preset has no anti-self-dual generator")
        pres = preset.presentation
        psi = build_psi(preset)
        alpha = pres.wedge_of(("alpha",))
        report.add(
            f"alpha-wedge-psi-zero-eps{preset.epsilon:+d}",
            alpha.wedge(psi).is_zero(),
            str(alpha.wedge(psi)),
        )
        return report

    pres = preset.presentation
    psi = build_psi(preset)
    q = preset.q_matrix
    b = [Poly.var(f"b{i}") for i in (1, 2, 3)]
    f_form = pres.zero_form()
    for i in (1, 2, 3):
        f_form = f_form + pres.wedge_of((f"omega{i}",), b[i - 1])
    f_form = f_form + pres.wedge_of(("alpha",), Poly.var("c"))

    t2 = Poly.var("t", 2)
    residual = f_form.wedge(psi)
    pair_names = {1: ("eta2", "eta3"), 2: ("eta3", "eta1"), 3: ("eta1", "eta2")}
    identity_ok = True
    witness = None
    for j in (1, 2, 3):
        got = residual.coefficient(pair_names[j] + ("v",))
        qb = Poly.zero()
        for i in (1, 2, 3):
            qb = qb + b[i - 1] * q[j - 1][i - 1]
        expected = qb * t2 * Fraction(-2)
        if got != expected:
            identity_ok = False
            witness = f"component {j}: {got} != {expected}"
            break
    report.add("residual-equals-minus-2t2-Qb", identity_ok, witness)

    cube = f_form.wedge(f_form).wedge(f_form)
    report.add("curvature-cube-zero", cube.is_zero(), str(cube))

    det = _leading_minors(q)[2]
    report.add(
        "Qb-zero-only-at-b-zero",
        det != 0,
        f"det(Q) = {det}",
    )
    return report


def random_positive_definite_q(rng: random.Random) -> tuple[tuple[Fraction, ...], ...]:
    """Random symmetric positive-definite rational matrix via L L^T."""
    while True:
        low = [[Fraction(0)] * 3 for _ in range(3)]
        for i in range(3):
            for j in range(i):
                low[i][j] = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
            low[i][i] = Fraction(rng.randint(1, 4), rng.randint(1, 2))
        q = tuple(
            tuple(sum(low[i][k] * low[j][k] for k in range(3)) for j in range(3))
            for i in range(3)
        )
        if all(m > 0 for m in _leading_minors(q)):
            return q


# -- product Calabi-Yau check ---------------------------------------------------


def cy3_deformed_coefficient(preset: CY3Preset) -> Poly:
    """vol6-coefficient of F∧psi - F^3/6 for F = c*omega (real convention)."""
    pres = preset.presentation
    psi = build_psi(preset)
    f_form = pres.wedge_of(("omega",), Poly.var("c"))
    residual = f_form.wedge(psi) - f_form.wedge(f_form).wedge(f_form) * Fraction(1, 6)
    return residual.coefficient(("vol6",))


def cy3_solutions(preset: CY3Preset) -> list[Scalar]:
    """Exact values of c solving the deformed equation for F = c*omega."""
    coeff = cy3_deformed_coefficient(preset)
    by_c = coeff.decompose_by("c")
    consts: dict[int, Scalar] = {}
    for e, p in by_c.items():
        if not p.is_constant():
            raise EngineError("dHYM coefficient involves symbols other than c")
        consts[e] = p.constant_value()
    # expected shape: linear + cubic term, c*(k1 + k3 c^2)
    k1 = consts.get(1, Scalar(0))
    k3 = consts.get(3, Scalar(0))
    if set(consts) - {1, 3} or k3.is_zero():
        raise EngineError("unexpected dHYM coefficient shape")
    roots = [Scalar(0)]
    c_sq = (-k1 / k3).as_fraction()
    if c_sq > 0:
        root = Scalar.sqrt_rational(c_sq)
        roots += [root, -root]
    return roots


def check_cy3_lemma(preset: CY3Preset | None = None) -> Report:
    """Line-bundle check on S^1 x CY3: F∧ImOmega = 0 and the cubic condition."""
    preset = preset or cy3_preset()
    pres = preset.presentation
    report = Report()

    f_form = pres.wedge_of(("omega",), Poly.var("c"))
    sigma = pres.wedge_of(("sigma",))
    report.add(
        "curvature-wedge-imvol-zero",
        f_form.wedge(sigma).is_zero(),
        str(f_form.wedge(sigma)),
    )

    coeff = cy3_deformed_coefficient(preset)
    c = Poly.var("c")
    expected = c * 3 - c ** 3
    report.add(
        "deformed-residual-coefficient-3c-minus-c3",
        coeff == expected,
        f"{coeff} != {expected}",
    )

    roots = cy3_solutions(preset)
    sqrt3 = Scalar.sqrt_rational(3)
    report.add(
        "dHYM solutions c ∈ {0,±√3}",
        roots == [Scalar(0), sqrt3, -sqrt3],
        f"roots = {[str(r) for r in roots]}",
    )

    at_sqrt3 = coeff.substitute({"c": sqrt3})
    report.add("residual-zero-at-sqrt3", at_sqrt3.is_zero(), str(at_sqrt3))
    at_one = coeff.substitute({"c": 1})
    report.add("residual-nonzero-at-one", not at_one.is_zero(), str(at_one))
    return report
