"""Connection ansatz, curvature, instanton residuals, and solution sets.

Everything is phrased in the real-form dictionary: engine curvatures are the
u(1) curvatures divided by i, so coefficients stay in a real polynomial ring.
In this dictionary the plain instanton residual is F∧psi and the deformed
residual is F∧psi - F^3/6; a connection solves the corresponding equation
exactly when the residual vanishes.  Relative to the usual normalization of
the trivial-bundle bracket, these residual coefficients carry a documented
overall factor 2 which is asserted by tests rather than divided out.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cdga import Form, Report
from .models import SasakianPreset, build_psi, sasakian_preset
from .scalars import Poly, rational_str

_PAIR_NAMES = {1: ("eta2", "eta3"), 2: ("eta3", "eta1"), 3: ("eta1", "eta2")}
_CYCLIC = ((1, 2, 3), (2, 3, 1), (3, 1, 2))


@dataclass(frozen=True)
class ConnectionAnsatz:
    """Invariant connection a_i eta_i (+ k times the pulled-back ASD form)."""

    preset: SasakianPreset
    coeffs: tuple[Poly, Poly, Poly] = None  # type: ignore[assignment]
    k: int = 0

    def __post_init__(self):
        if self.coeffs is None:
            object.__setattr__(
                self, "coeffs", (Poly.var("a1"), Poly.var("a2"), Poly.var("a3"))
            )
        else:
            coeffs = tuple(
                c if isinstance(c, Poly) else Poly.const(c) for c in self.coeffs
            )
            object.__setattr__(self, "coeffs", coeffs)
        if self.k != 0 and not self.preset.with_asd:
            raise ValueError("nonzero k needs a preset with the ASD generator")

    def one_form(self) -> Form:
        pres = self.preset.presentation
        out = pres.zero_form()
        for i in (1, 2, 3):
            out = out + pres.wedge_of((f"eta{i}",), self.coeffs[i - 1])
        return out


def curvature(ansatz: ConnectionAnsatz) -> Form:
    """Real-convention curvature -2 sum a_i (omega_i + eta_j∧eta_k) + k*alpha."""
    pres = ansatz.preset.presentation
    out = pres.zero_form()
    for i, j, k in _CYCLIC:
        a = ansatz.coeffs[i - 1]
        out = out + pres.wedge_of((f"omega{i}",), a * -2)
        out = out + pres.wedge_of((f"eta{j}", f"eta{k}"), a * -2)
    if ansatz.k:
        out = out + pres.wedge_of(("alpha",), ansatz.k)
    return out


@dataclass
class Residual:
    """A degree-6 residual form plus its extracted coefficient map."""

    form: Form

    def __post_init__(self):
        deg = self.form.degree()
        if deg is not None and deg != 6:
            raise ValueError(f"residual must have degree 6, got {deg}")

    @property
    def coefficients(self) -> dict[tuple, Poly]:
        return dict(self.form.terms)

    def coefficient(self, names: Sequence[str]) -> Poly:
        return self.form.coefficient(names)

    def named_coefficients(self) -> dict[str, Poly]:
        pres = self.form.pres
        return {pres.monomial_name(m): p for m, p in self.form.sorted_terms()}

    def rebuild(self) -> Form:
        return Form(self.form.pres, self.coefficients)

    def is_zero(self) -> bool:
        return self.form.is_zero()


def g2_residual_form(f_form: Form, psi: Form) -> Residual:
    return Residual(f_form.wedge(psi))


def deformed_residual_form(f_form: Form, psi: Form) -> Residual:
    cube = f_form.wedge(f_form).wedge(f_form)
    return Residual(f_form.wedge(psi) - cube * Fraction(1, 6))


def g2_residual(ansatz: ConnectionAnsatz, psi: Form | None = None) -> Residual:
    psi = psi if psi is not None else build_psi(ansatz.preset)
    return g2_residual_form(curvature(ansatz), psi)


def deformed_residual(ansatz: ConnectionAnsatz, psi: Form | None = None) -> Residual:
    psi = psi if psi is not None else build_psi(ansatz.preset)
    return deformed_residual_form(curvature(ansatz), psi)


# -- solution sets ------------------------------------------------------------


@dataclass(frozen=True)
class Branch:
    kind: str  # trivial | sphere | circle | point_pair | all
    radius_sq: Fraction | None = None
    a3_sq: Fraction | None = None
    plane: str | None = None
    degenerate: bool = False
    line: bool = False

    def as_dict(self) -> dict:
        out: dict = {"type": self.kind}
        if self.kind == "sphere":
            out["radius_sq"] = rational_str(self.radius_sq)
            out["degenerate"] = self.degenerate
        elif self.kind == "circle":
            out["radius_sq"] = rational_str(self.radius_sq)
            out["plane"] = self.plane
            out["degenerate"] = self.degenerate
        elif self.kind == "point_pair":
            if self.line:
                out["line"] = True
            else:
                out["a3_sq"] = rational_str(self.a3_sq)
            out["degenerate"] = self.degenerate
        elif self.kind == "trivial" and self.degenerate:
            out["degenerate"] = True
        return out


@dataclass(frozen=True)
class SolutionSet:
    epsilon: int
    u: Fraction
    k: int
    equation: str  # "g2" | "deformed"
    branches: tuple[Branch, ...]

    def as_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "u": rational_str(self.u),
            "k": self.k,
            "branches": [b.as_dict() for b in self.branches],
        }

    def branch(self, kind: str) -> Branch | None:
        for b in self.branches:
            if b.kind == kind:
                return b
        return None


def _check_params(epsilon: int, u: Fraction):
    if epsilon not in (1, -1):
        raise ValueError("epsilon must be +1 or -1")
    if u <= 0:
        raise ValueError("u = t^2 must be positive")


def classify_g2(epsilon: int, u: Fraction) -> SolutionSet:
    """Invariant plain-instanton solutions on the trivial bundle."""
    u = Fraction(u)
    _check_params(epsilon, u)
    branches: list[Branch] = []
    if u == Fraction(1, 2) and epsilon == 1:
        branches.append(Branch("all"))
    elif u == Fraction(1, 2) and epsilon == -1:
        branches.append(Branch("point_pair", line=True))
    branches.append(Branch("trivial"))
    return SolutionSet(epsilon, u, 0, "g2", tuple(branches))


def classify_deformed(epsilon: int, u: Fraction, k: int = 0) -> SolutionSet:
    """Invariant deformed-instanton solutions; k activates the ASD summand."""
    u = Fraction(u)
    _check_params(epsilon, u)
    pulled = Fraction(1 - 2 * u + k * k, 4)
    branches: list[Branch] = []
    trivial_degenerate = False
    if epsilon == 1:
        if pulled > 0:
            branches.append(Branch("sphere", radius_sq=pulled))
        elif pulled == 0:
            trivial_degenerate = True
    else:
        circle = Fraction(1 + 2 * u + k * k, 4)
        branches.append(Branch("circle", radius_sq=circle, plane="a3=0"))
        if pulled > 0:
            branches.append(Branch("point_pair", a3_sq=pulled))
        elif pulled == 0:
            trivial_degenerate = True
    branches.append(Branch("trivial", degenerate=trivial_degenerate))
    return SolutionSet(epsilon, u, k, "deformed", tuple(branches))


# -- verification ---------------------------------------------------------------


def residual_coefficient_polys(
    epsilon: int, u: Fraction, k: int, equation: str
) -> list[Poly]:
    """The three residual coefficients as polynomials in a1, a2, a3 at t^2 = u."""
    preset = sasakian_preset(epsilon, with_asd=(k != 0))
    ansatz = ConnectionAnsatz(preset, k=k)
    res = deformed_residual(ansatz) if equation == "deformed" else g2_residual(ansatz)
    out = []
    for i in (1, 2, 3):
        coeff = res.coefficient(_PAIR_NAMES[i] + ("v",))
        reduced = coeff.reduce_square("t", u)
        if "t" in reduced.symbols():
            raise ValueError("residual has odd powers of t")
        out.append(reduced)
    return out


def _exact_sphere_points(r_sq: Fraction) -> list[tuple[Fraction, Fraction, Fraction]]:
    points = []
    s = _rational_sqrt(r_sq)
    if s is not None:
        points += [(s, 0, 0), (0, s, 0), (0, 0, s)]
        points.append((Fraction(3, 5) * s, Fraction(4, 5) * s, 0))
    half = _rational_sqrt(r_sq / 2)
    if half is not None:
        points.append((half, half, 0))
    return [tuple(Fraction(x) for x in p) for p in points]


def _rational_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    num = math.isqrt(x.numerator)
    den = math.isqrt(x.denominator)
    if num * num == x.numerator and den * den == x.denominator:
        return Fraction(num, den)
    return None


def verify_solution_set(
    solution_set: SolutionSet, samples: int = 20, rng_seed: int = 0
) -> Report:
    """Substitute each branch back into the residual, exactly and in floats.

    Exact checks impose the branch constraint as a polynomial rewrite (plus
    exact rational points whenever the branch radius squared is a rational
    square); float checks sample points on the branch at 1e-10 tolerance.
    """
    report = Report()
    eps, u, k = solution_set.epsilon, solution_set.u, solution_set.k
    polys = residual_coefficient_polys(eps, u, k, solution_set.equation)
    rng = random.Random(rng_seed)

    def exact_point_zero(point) -> bool:
        binding = {"a1": point[0], "a2": point[1], "a3": point[2]}
        return all(p.substitute(binding).is_zero() for p in polys)

    def float_points_zero(points) -> bool:
        for x1, x2, x3 in points:
            binding = {"a1": x1, "a2": x2, "a3": x3}
            if any(abs(p.eval_float(binding)) > 1e-10 for p in polys):
                return False
        return True

    for branch in solution_set.branches:
        tag = branch.kind
        if branch.kind == "trivial":
            report.add(f"{tag}-exact", exact_point_zero((0, 0, 0)))
            continue
        if branch.kind == "all":
            ok = all(p.is_zero() for p in polys)
            report.add(f"{tag}-identically-zero", ok)
            continue
        if branch.kind == "sphere":
            r = branch.radius_sq
            rewritten = [
                p.reduce_square(
                    "a3",
                    Poly.const(r) - Poly.var("a1", 2) - Poly.var("a2", 2),
                )
                for p in polys
            ]
            report.add(f"{tag}-constraint-rewrite", all(p.is_zero() for p in rewritten))
            exact_pts = _exact_sphere_points(r)
            if exact_pts:
                report.add(
                    f"{tag}-exact-points", all(exact_point_zero(p) for p in exact_pts)
                )
            pts = []
            for _ in range(samples):
                gx = [rng.gauss(0, 1) for _ in range(3)]
                norm = math.sqrt(sum(g * g for g in gx)) or 1.0
                scale = math.sqrt(float(r)) / norm
                pts.append(tuple(g * scale for g in gx))
            report.add(f"{tag}-float-samples", float_points_zero(pts))
            continue
        if branch.kind == "circle":
            r = branch.radius_sq
            rewritten = [
                p.substitute({"a3": 0}).reduce_square(
                    "a2", Poly.const(r) - Poly.var("a1", 2)
                )
                for p in polys
            ]
            report.add(f"{tag}-constraint-rewrite", all(p.is_zero() for p in rewritten))
            s = _rational_sqrt(r)
            if s is not None:
                ok = all(
                    exact_point_zero(p)
                    for p in [(s, 0, 0), (0, s, 0), (-s, 0, 0)]
                )
                report.add(f"{tag}-exact-points", ok)
            pts = []
            for _ in range(samples):
                theta = rng.uniform(0, 2 * math.pi)
                rad = math.sqrt(float(r))
                pts.append((rad * math.cos(theta), rad * math.sin(theta), 0.0))
            report.add(f"{tag}-float-samples", float_points_zero(pts))
            continue
        if branch.kind == "point_pair":
            if branch.line:
                restricted = [
                    p.substitute({"a1": 0, "a2": 0}) for p in polys
                ]
                report.add(
                    f"{tag}-line-identically-zero",
                    all(p.is_zero() for p in restricted),
                )
                continue
            a3_sq = branch.a3_sq
            rewritten = [
                p.substitute({"a1": 0, "a2": 0}).reduce_square("a3", a3_sq)
                for p in polys
            ]
            report.add(f"{tag}-constraint-rewrite", all(p.is_zero() for p in rewritten))
            s = _rational_sqrt(a3_sq)
            if s is not None:
                ok = exact_point_zero((0, 0, s)) and exact_point_zero((0, 0, -s))
                report.add(f"{tag}-exact-points", ok)
            rad = math.sqrt(float(a3_sq))
            report.add(
                f"{tag}-float-samples",
                float_points_zero([(0.0, 0.0, rad), (0.0, 0.0, -rad)]),
            )
            continue
        raise ValueError(f"unknown branch kind {branch.kind!r}")
    return report
