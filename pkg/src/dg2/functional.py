"""Chern-Simons-type functional on invariant connections.

The functional of a connection a_i eta_i on the trivial bundle reduces, after
the rotation (a1, a2) -> (y, 0) justified by a tested invariance, to an exact
quartic in x = a3 and y with parameter t.  The closed form is computed two
ways (directly from the top coefficient, and through transgression forms
integrated exactly in the interpolation parameter s) and the two must agree;
critical points of the reduced functional are exactly the invariant deformed
instantons.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from ._threads import parallel_map
from .instanton import ConnectionAnsatz, classify_deformed, curvature
from .models import SasakianPreset, build_psi, sasakian_preset
from .scalars import Poly


@dataclass(frozen=True)
class ClosedForm:
    """Reduced functional: poly in (x, y, t) with x = a3, y the radial a1."""

    epsilon: int
    poly: Poly      # symbols a3 (x), a1 (y), t
    pre_poly: Poly  # symbols a1, a2, a3, t, before the rotation a2 -> 0

    def eval(self, x: float, y: float, t: float) -> float:
        return self.poly.eval_float({"a3": x, "a1": y, "t": t})


def functional_direct(preset: SasakianPreset) -> ClosedForm:
    """-(1/2) top(a ∧ (da∧psi - (da)^3/12)) with symbolic coefficients."""
    if preset.with_asd:
        raise ValueError("direct functional is for the trivial bundle")
    ansatz = ConnectionAnsatz(preset)
    a_form = ansatz.one_form()
    f_form = a_form.d()
    psi = build_psi(preset)
    cube = f_form.wedge(f_form).wedge(f_form)
    integrand = a_form.wedge(f_form.wedge(psi) - cube * Fraction(1, 12))
    pre = integrand.top_coefficient() * Fraction(-1, 2)
    return ClosedForm(preset.epsilon, pre.substitute({"a2": 0}), pre)


def functional_transgression(k0: int, ansatz: ConnectionAnsatz) -> Poly:
    """(1/2)(top(cs2∧psi) + top(cs4)/12) with transgressions from the k0 base.

    The base connection is the pulled-back ASD one with curvature k0*alpha
    (the flat connection when k0 = 0); the comparison connection must live on
    the same bundle.  In the real dictionary cs2 picks up a factor -2 and cs4
    a factor +4 from the powers of i.
    """
    if ansatz.k != k0:
        raise ValueError("transgression needs both connections on one bundle")
    preset = ansatz.preset
    pres = preset.presentation
    a_form = ansatz.one_form()
    f_form = curvature(ansatz)
    if k0:
        f_base = pres.wedge_of(("alpha",), k0)
    else:
        f_base = pres.zero_form()
    s = Poly.var("s")
    f_s = f_base + (f_form - f_base) * s

    def integrate_s(form):
        return form.map_coefficients(lambda p: p.integrate_unit_interval("s"))

    cs2 = integrate_s(a_form.wedge(f_s)) * Fraction(-2)
    cs4 = integrate_s(a_form.wedge(f_s.wedge(f_s).wedge(f_s))) * 4
    psi = build_psi(preset)
    total = cs2.wedge(psi).top_coefficient() + cs4.top_coefficient() * Fraction(1, 12)
    return total * Fraction(1, 2)


@lru_cache(maxsize=None)
def closed_form(epsilon: int) -> ClosedForm:
    return functional_direct(sasakian_preset(epsilon))


def gradient(cf: ClosedForm) -> tuple[Poly, Poly]:
    """(d/dx, d/dy) of the reduced functional."""
    return cf.poly.differentiate("a3"), cf.poly.differentiate("a1")


def hessian_polys(cf: ClosedForm) -> tuple[Poly, Poly, Poly]:
    gx, gy = gradient(cf)
    return (
        gx.differentiate("a3"),
        gx.differentiate("a1"),
        gy.differentiate("a1"),
    )


DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class CriticalPoint:
    x: float | Fraction
    y: float | Fraction
    value: float | Fraction
    hessian: tuple  # ((fxx, fxy), (fxy, fyy))
    eigenvalues: tuple
    kind: str  # min | max | saddle | degenerate
    grad_norm: float | None = None
    exact: bool = False
    tolerance_based: bool = False
    matched_branch: str | None = None

    def as_dict(self) -> dict:
        return {
            "x": float(self.x),
            "y": float(self.y),
            "value": float(self.value),
            "class": self.kind,
            "grad_norm": self.grad_norm if self.grad_norm is not None else 0.0,
        }


def _classify_from_hessian(fxx, fxy, fyy, exact: bool) -> tuple[str, tuple, bool]:
    if exact:
        det = fxx * fyy - fxy * fxy
        tr = fxx + fyy
        if fxy == 0:
            eigs = tuple(sorted((fxx, fyy)))
        else:
            disc = math.sqrt(float(tr) * float(tr) - 4 * float(det))
            eigs = ((float(tr) - disc) / 2, (float(tr) + disc) / 2)
        if det == 0:
            return "degenerate", eigs, False
        if det > 0:
            return ("min" if tr > 0 else "max"), eigs, False
        return "saddle", eigs, False
    tr = fxx + fyy
    det = fxx * fyy - fxy * fxy
    disc = math.sqrt(max(tr * tr - 4 * det, 0.0))
    eigs = ((tr - disc) / 2, (tr + disc) / 2)
    if min(abs(e) for e in eigs) < DEGENERACY_TOL:
        return "degenerate", eigs, True
    if eigs[0] > 0:
        return "min", eigs, False
    if eigs[1] < 0:
        return "max", eigs, False
    return "saddle", eigs, False


def hessian_at(cf: ClosedForm, x, y, u) -> CriticalPoint:
    """Second-derivative data of the reduced functional at one point.

    Rational inputs take the exact path (degeneracy decided with no
    tolerance); float inputs evaluate in doubles and use the 1e-9 eigenvalue
    threshold, flagged as tolerance-based.
    """
    exact = all(isinstance(v, (int, Fraction)) for v in (x, y, u))
    fxx_p, fxy_p, fyy_p = hessian_polys(cf)
    if exact:
        x, y, u = Fraction(x), Fraction(y), Fraction(u)
        binding = {"a3": x, "a1": y}

        def at(p: Poly) -> Fraction:
            return p.reduce_square("t", u).substitute(binding).constant_value().as_fraction()

        fxx, fxy, fyy = at(fxx_p), at(fxy_p), at(fyy_p)
        value = at(cf.poly)
        kind, eigs, tol = _classify_from_hessian(fxx, fxy, fyy, exact=True)
        return CriticalPoint(
            x, y, value, ((fxx, fxy), (fxy, fyy)), eigs, kind,
            grad_norm=None, exact=True, tolerance_based=tol,
        )
    t = math.sqrt(float(u))
    binding = {"a3": float(x), "a1": float(y), "t": t}
    fxx = fxx_p.eval_float(binding)
    fxy = fxy_p.eval_float(binding)
    fyy = fyy_p.eval_float(binding)
    value = cf.poly.eval_float(binding)
    gx, gy = gradient(cf)
    gnorm = math.hypot(gx.eval_float(binding), gy.eval_float(binding))
    kind, eigs, tol = _classify_from_hessian(fxx, fxy, fyy, exact=False)
    return CriticalPoint(
        float(x), float(y), value, ((fxx, fxy), (fxy, fyy)), eigs, kind,
        grad_norm=gnorm, exact=False, tolerance_based=tol,
    )


# -- numeric search ------------------------------------------------------------


@dataclass
class NewtonSearch:
    points: list[CriticalPoint]
    seeds: int
    converged: int
    discarded: int


def _branch_match(x: float, y: float, epsilon: int, u: float, k: int) -> str | None:
    tol = 1e-9
    r = math.hypot(x, y)
    if r <= tol:
        return "trivial"
    pulled = (1 - 2 * u + k * k) / 4
    if epsilon == 1:
        if pulled > 0 and abs(r - math.sqrt(pulled)) <= tol:
            return "sphere"
        return None
    circle = (1 + 2 * u + k * k) / 4
    if abs(x) <= tol and abs(abs(y) - math.sqrt(circle)) <= tol:
        return "circle"
    if pulled > 0 and abs(y) <= tol and abs(abs(x) - math.sqrt(pulled)) <= tol:
        return "point_pair"
    return None


def critical_points_numeric(
    epsilon: int,
    t: float,
    seeds: int = 200,
    rng_seed: int = 0,
    max_iter: int = 100,
) -> NewtonSearch:
    """Damped Newton search on the gradient system from random starts.

    Converged points are deduplicated at 1e-7, classified through the float
    Hessian path, and must sit within 1e-9 of an analytic solution branch;
    a converged point matching no branch raises, since the zero locus of the
    gradient is known exactly.
    """
    if t <= 0 or seeds < 1:
        raise ValueError("need t > 0 and at least one seed")
    cf = closed_form(epsilon)
    gx, gy = gradient(cf)
    fxx_p, fxy_p, fyy_p = hessian_polys(cf)

    def grad_at(x: float, y: float) -> tuple[float, float]:
        b = {"a3": x, "a1": y, "t": t}
        return gx.eval_float(b), gy.eval_float(b)

    def newton(start: tuple[float, float]):
        x, y = start
        g1, g2 = grad_at(x, y)
        gn = math.hypot(g1, g2)
        for _ in range(max_iter):
            if gn < 1e-12:
                return x, y
            b = {"a3": x, "a1": y, "t": t}
            hxx = fxx_p.eval_float(b)
            hxy = fxy_p.eval_float(b)
            hyy = fyy_p.eval_float(b)
            det = hxx * hyy - hxy * hxy
            if det == 0:
                return None
            dx = -(hyy * g1 - hxy * g2) / det
            dy = -(-hxy * g1 + hxx * g2) / det
            scale = 1.0
            for _ in range(20):
                nx, ny = x + scale * dx, y + scale * dy
                n1, n2 = grad_at(nx, ny)
                nn = math.hypot(n1, n2)
                if nn < gn:
                    break
                scale /= 2
            x, y, g1, g2, gn = nx, ny, n1, n2, nn
        return (x, y) if gn < 1e-12 else None

    rng = random.Random(rng_seed)
    starts = [
        (rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2)) for _ in range(seeds)
    ]
    results = parallel_map(newton, starts)

    found: list[tuple[float, float]] = []
    discarded = 0
    for res in results:
        if res is None:
            discarded += 1
            continue
        if not any(math.hypot(res[0] - p[0], res[1] - p[1]) < 1e-7 for p in found):
            found.append(res)
    found.sort()

    u = t * t
    points = []
    for x, y in found:
        g1, g2 = grad_at(x, y)
        gn = math.hypot(g1, g2)
        if gn >= 1e-10:
            raise RuntimeError(f"converged point ({x}, {y}) has |grad| = {gn}")
        branch = _branch_match(x, y, epsilon, u, 0)
        if branch is None:
            raise RuntimeError(f"converged point ({x}, {y}) matches no branch")
        cp = hessian_at(cf, x, y, u)
        points.append(
            CriticalPoint(
                cp.x, cp.y, cp.value, cp.hessian, cp.eigenvalues, cp.kind,
                grad_norm=gn, exact=False, tolerance_based=cp.tolerance_based,
                matched_branch=branch,
            )
        )
    return NewtonSearch(points, seeds, len(results) - discarded, discarded)


# -- exports --------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("grid needs n >= 2")
        if self.x_min >= self.x_max or self.y_min >= self.y_max:
            raise ValueError("grid bounds must satisfy min < max")


def grid_export(
    epsilon: int, t: float, grid: GridSpec, volume: float = 1.0
) -> list[tuple[float, float, float]]:
    """Rows (x, y, F) over the grid in deterministic y-major order."""
    if t <= 0:
        raise ValueError("t must be positive")
    cf = closed_form(epsilon)
    xs = [grid.x_min + i * (grid.x_max - grid.x_min) / (grid.n - 1) for i in range(grid.n)]
    ys = [grid.y_min + i * (grid.y_max - grid.y_min) / (grid.n - 1) for i in range(grid.n)]

    def row_block(y: float):
        return [(x, y, volume * cf.eval(x, y, t)) for x in xs]

    blocks = parallel_map(row_block, ys)
    return [row for block in blocks for row in block]


def moduli_scan(
    epsilon: int, k: int, u_values: Sequence[float]
) -> list[tuple[float, str, float]]:
    """Rows (t, branch, r) for the nontrivial branches over a grid of u = t^2."""
    rows = []
    for u in u_values:
        if u <= 0:
            raise ValueError("u values must be positive")
        st = classify_deformed(epsilon, Fraction(u), k)
        t = math.sqrt(u)
        for branch in st.branches:
            if branch.kind == "sphere" and branch.radius_sq > 0:
                rows.append((t, "sphere", math.sqrt(float(branch.radius_sq))))
            elif branch.kind == "circle" and branch.radius_sq > 0:
                rows.append((t, "circle", math.sqrt(float(branch.radius_sq))))
            elif branch.kind == "point_pair" and not branch.line and branch.a3_sq > 0:
                rows.append((t, "point_pair", math.sqrt(float(branch.a3_sq))))
    return rows
