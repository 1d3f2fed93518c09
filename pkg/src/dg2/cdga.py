"""Finitely-presented graded-commutative differential algebras.

A Presentation fixes an ordered list of generators with degrees, a set of
rewrite relations oriented from product patterns to normal forms, a
differential on generators, and a designated top monomial.  Forms are
homogeneous linear combinations of normal-form monomials with Poly
coefficients.  Rewriting to normal form handles Koszul signs; relations are
applied to a fixpoint under an iteration budget.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .scalars import Poly, ScalarLike

#: Rewrite steps allowed per normalization; genuine reductions in the preset
#: algebras take under a dozen, and the cap must stay well below the Python
#: recursion limit so a looping relation raises RewriteBudgetError first.
REWRITE_BUDGET = 200


class RewriteBudgetError(RuntimeError):
    """Relation rewriting did not terminate within the budget."""


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("generator degree must be >= 1")


#: Relation / differential right-hand sides: rational combinations of raw
#: monomials given by generator-name tuples.
RationalTerms = Sequence[tuple[Fraction | int, tuple[str, ...]]]


def _koszul_sort(seq: Sequence[int], degrees: Sequence[int]) -> tuple[tuple, int]:
    """Sort generator indices, tracking the Koszul sign; 0 for odd repeats."""
    lst = list(seq)
    sign = 1
    for i in range(1, len(lst)):
        j = i
        while j > 0 and lst[j - 1] > lst[j]:
            if degrees[lst[j - 1]] % 2 and degrees[lst[j]] % 2:
                sign = -sign
            lst[j - 1], lst[j] = lst[j], lst[j - 1]
            j -= 1
    for k in range(1, len(lst)):
        if lst[k] == lst[k - 1] and degrees[lst[k]] % 2:
            return (), 0
    return tuple(lst), sign


class Presentation:
    """Immutable presentation of a graded-commutative differential algebra."""

    def __init__(
        self,
        generators: Sequence[Generator],
        relations: Mapping[tuple[str, ...], RationalTerms],
        differential: Mapping[str, RationalTerms],
        top: tuple[str, ...],
        name: str = "",
    ):
        self.name = name
        self.generators = tuple(generators)
        self._index = {g.name: i for i, g in enumerate(self.generators)}
        if len(self._index) != len(self.generators):
            raise ValueError("duplicate generator names")
        self.degrees = tuple(g.degree for g in self.generators)

        def mono(names: Iterable[str]) -> tuple[int, ...]:
            return tuple(self._index[n] for n in names)

        def terms(raw: RationalTerms) -> tuple[tuple[Fraction, tuple], ...]:
            return tuple((Fraction(c), mono(m)) for c, m in raw)

        self.relations: dict[tuple, tuple] = {}
        for pattern, rhs in relations.items():
            key = tuple(sorted(mono(pattern)))
            self.relations[key] = terms(rhs)
        self.differential: dict[int, tuple] = {
            self._index[g]: terms(rhs) for g, rhs in differential.items()
        }
        for i in range(len(self.generators)):
            self.differential.setdefault(i, ())
        self.top = tuple(sorted(mono(top)))
        self.top_degree = self.monomial_degree(self.top)

        self._reduce_cache: dict[tuple, dict[tuple, Fraction]] = {}
        self._product_cache: dict[tuple, dict[tuple, Fraction]] = {}
        self._diff_cache: dict[tuple, dict[tuple, Fraction]] = {}
        self._basis: tuple[tuple, ...] | None = None

    # -- basic queries ---------------------------------------------------

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown generator {name!r}") from None

    def monomial(self, names: Iterable[str]) -> tuple[int, ...]:
        return tuple(self.index(n) for n in names)

    def monomial_degree(self, mono: Sequence[int]) -> int:
        return sum(self.degrees[g] for g in mono)

    def monomial_name(self, mono: Sequence[int]) -> str:
        if not mono:
            return "1"
        return "∧".join(self.generators[g].name for g in mono)

    # -- rewriting ---------------------------------------------------------

    def _find_redex(self, mono: tuple) -> tuple[tuple, tuple] | None:
        for pattern, _ in self.relations.items():
            positions = self._match(mono, pattern)
            if positions is not None:
                return pattern, positions
        return None

    @staticmethod
    def _match(mono: tuple, pattern: tuple) -> tuple | None:
        # both sorted; greedy two-pointer sub-multiset match
        positions = []
        i = 0
        for want in pattern:
            while i < len(mono) and mono[i] < want:
                i += 1
            if i >= len(mono) or mono[i] != want:
                return None
            positions.append(i)
            i += 1
        return tuple(positions)

    def _extract(self, mono: tuple, positions: tuple) -> tuple[int, tuple]:
        """Pull matched factors to the front; return (sign, remaining)."""
        posset = set(positions)
        sign = 1
        unmatched_parity = 0
        remaining = []
        for i, g in enumerate(mono):
            if i in posset:
                if self.degrees[g] % 2 and unmatched_parity:
                    sign = -sign
            else:
                unmatched_parity ^= self.degrees[g] % 2
                remaining.append(g)
        return sign, tuple(remaining)

    def reduce_raw(
        self, seq: Sequence[int], fuel: list[int] | None = None
    ) -> dict[tuple, Fraction]:
        """Normalize a raw product of generator indices.

        Returns a map from normal-form monomials to rational multipliers.
        """
        if fuel is None:
            fuel = [REWRITE_BUDGET]
        sorted_mono, sign = _koszul_sort(seq, self.degrees)
        if sign == 0:
            return {}
        reduced = self._reduce_sorted(sorted_mono, fuel)
        if sign == 1:
            return reduced
        return {m: -c for m, c in reduced.items()}

    def _reduce_sorted(self, mono: tuple, fuel: list[int]) -> dict[tuple, Fraction]:
        cached = self._reduce_cache.get(mono)
        if cached is not None:
            return cached
        fuel[0] -= 1
        if fuel[0] < 0:
            raise RewriteBudgetError(
                f"rewrite budget exhausted on {self.monomial_name(mono)}"
            )
        if self.monomial_degree(mono) > self.top_degree:
            result: dict[tuple, Fraction] = {}
        else:
            redex = self._find_redex(mono)
            if redex is None:
                result = {mono: Fraction(1)}
            else:
                pattern, positions = redex
                ex_sign, remaining = self._extract(mono, positions)
                result = {}
                for coeff, rhs_mono in self.relations[pattern]:
                    sub = self.reduce_raw(rhs_mono + remaining, fuel)
                    for m, c in sub.items():
                        acc = result.get(m, Fraction(0)) + ex_sign * coeff * c
                        if acc:
                            result[m] = acc
                        else:
                            result.pop(m, None)
        self._reduce_cache[mono] = result
        return result

    def monomial_product(self, m1: tuple, m2: tuple) -> dict[tuple, Fraction]:
        key = (m1, m2)
        cached = self._product_cache.get(key)
        if cached is None:
            cached = self.reduce_raw(m1 + m2)
            self._product_cache[key] = cached
        return cached

    def monomial_differential(self, mono: tuple) -> dict[tuple, Fraction]:
        cached = self._diff_cache.get(mono)
        if cached is not None:
            return cached
        out: dict[tuple, Fraction] = {}
        prefix_parity = 0
        for i, g in enumerate(mono):
            sign = -1 if prefix_parity else 1
            for coeff, dmono in self.differential[g]:
                raw = mono[:i] + dmono + mono[i + 1 :]
                for m, c in self.reduce_raw(raw).items():
                    acc = out.get(m, Fraction(0)) + sign * coeff * c
                    if acc:
                        out[m] = acc
                    else:
                        out.pop(m, None)
            prefix_parity ^= self.degrees[g] % 2
        self._diff_cache[mono] = out
        return out

    # -- derived data -------------------------------------------------------

    def basis_monomials(self, degree: int | None = None) -> tuple[tuple, ...]:
        """All normal-form monomials (of one degree, if given)."""
        if self._basis is None:
            options: list[list[tuple[int, ...]]] = []
            for i, g in enumerate(self.generators):
                if g.degree % 2:
                    options.append([(), (i,)])
                else:
                    mx = self.top_degree // g.degree
                    options.append([(i,) * k for k in range(mx + 1)])
            basis = []
            stack: list[tuple[int, tuple]] = [(0, ())]
            while stack:
                depth, prefix = stack.pop()
                if self.monomial_degree(prefix) > self.top_degree:
                    continue
                if depth == len(options):
                    if self._find_redex(prefix) is None:
                        basis.append(prefix)
                    continue
                for choice in options[depth]:
                    stack.append((depth + 1, prefix + choice))
            self._basis = tuple(sorted(basis, key=lambda m: (self.monomial_degree(m), m)))
        if degree is None:
            return self._basis
        return tuple(m for m in self._basis if self.monomial_degree(m) == degree)

    def differential_form(self, name: str) -> "Form":
        out: dict[tuple, Poly] = {}
        for coeff, dmono in self.differential[self.index(name)]:
            for m, c in self.reduce_raw(dmono).items():
                cur = out.get(m, Poly.zero()) + Poly.const(coeff * c)
                if cur.is_zero():
                    out.pop(m, None)
                else:
                    out[m] = cur
        return Form(self, out)

    def generator_form(self, name: str, coeff: Poly | ScalarLike = 1) -> "Form":
        return self.wedge_of([name], coeff)

    def wedge_of(self, names: Iterable[str], coeff: Poly | ScalarLike = 1) -> "Form":
        """Normal form of a raw product of named generators times a coefficient."""
        poly = coeff if isinstance(coeff, Poly) else Poly.const(coeff)
        out: dict[tuple, Poly] = {}
        for m, c in self.reduce_raw(self.monomial(names)).items():
            p = poly * c
            if not p.is_zero():
                out[m] = p
        return Form(self, out)

    def zero_form(self) -> "Form":
        return Form(self, {})

    def __repr__(self) -> str:
        return f"Presentation({self.name or 'anonymous'}, {len(self.generators)} generators)"


class Form:
    """Homogeneous element: map from normal-form monomials to Poly coefficients."""

    __slots__ = ("pres", "terms")

    def __init__(self, pres: Presentation, terms: Mapping[tuple, Poly]):
        clean = {m: p for m, p in terms.items() if not p.is_zero()}
        degrees = {pres.monomial_degree(m) for m in clean}
        if len(degrees) > 1:
            raise ValueError(f"mixed-degree form: degrees {sorted(degrees)}")
        object.__setattr__(self, "pres", pres)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *_):
        raise AttributeError("Form is immutable")

    def degree(self) -> int | None:
        for m in self.terms:
            return self.pres.monomial_degree(m)
        return None

    def is_zero(self) -> bool:
        return not self.terms

    def _check_same(self, other: "Form"):
        if self.pres is not other.pres:
            raise ValueError("forms from different presentations")

    def __add__(self, other: "Form") -> "Form":
        self._check_same(other)
        da, db = self.degree(), other.degree()
        if da is not None and db is not None and da != db:
            raise ValueError(f"cannot add forms of degree {da} and {db}")
        out = dict(self.terms)
        for m, p in other.terms.items():
            acc = out.get(m, Poly.zero()) + p
            if acc.is_zero():
                out.pop(m, None)
            else:
                out[m] = acc
        return Form(self.pres, out)

    def __neg__(self) -> "Form":
        return Form(self.pres, {m: -p for m, p in self.terms.items()})

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __mul__(self, scalar) -> "Form":
        poly = scalar if isinstance(scalar, Poly) else Poly.const(scalar)
        return Form(self.pres, {m: p * poly for m, p in self.terms.items()})

    __rmul__ = __mul__

    def wedge(self, other: "Form") -> "Form":
        self._check_same(other)
        out: dict[tuple, Poly] = {}
        for m1, p1 in self.terms.items():
            for m2, p2 in other.terms.items():
                prod = self.pres.monomial_product(m1, m2)
                if not prod:
                    continue
                p12 = p1 * p2
                for m, c in prod.items():
                    acc = out.get(m, Poly.zero()) + p12 * c
                    if acc.is_zero():
                        out.pop(m, None)
                    else:
                        out[m] = acc
        return Form(self.pres, out)

    def d(self) -> "Form":
        out: dict[tuple, Poly] = {}
        for m, p in self.terms.items():
            for dm, c in self.pres.monomial_differential(m).items():
                acc = out.get(dm, Poly.zero()) + p * c
                if acc.is_zero():
                    out.pop(dm, None)
                else:
                    out[dm] = acc
        return Form(self.pres, out)

    def coefficient(self, names: Iterable[str]) -> Poly:
        """Coefficient with respect to the given generator product.

        The product is normalized first, so e.g. the eta3∧eta1 coefficient is
        minus the stored eta1∧eta3 one.  The request must normalize to a
        single monomial with multiplier ±1.
        """
        reduced = self.pres.reduce_raw(self.pres.monomial(names))
        if len(reduced) != 1:
            raise ValueError("coefficient lookup needs a basis monomial")
        (mono, mult), = reduced.items()
        if mult * mult != 1:
            raise ValueError("coefficient lookup needs a basis monomial")
        poly = self.terms.get(mono, Poly.zero())
        return poly if mult == 1 else -poly

    def top_coefficient(self) -> Poly:
        deg = self.degree()
        if deg is not None and deg != self.pres.top_degree:
            raise ValueError(
                f"form of degree {deg} has no top coefficient "
                f"(top degree is {self.pres.top_degree})"
            )
        return self.terms.get(self.pres.top, Poly.zero())

    def substitute_coefficients(self, bindings) -> "Form":
        return Form(self.pres, {m: p.substitute(bindings) for m, p in self.terms.items()})

    def map_coefficients(self, fn) -> "Form":
        return Form(self.pres, {m: fn(p) for m, p in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, Form):
            return NotImplemented
        return self.pres is other.pres and self.terms == other.terms

    def __hash__(self):
        return hash((id(self.pres), frozenset((m, hash(p)) for m, p in self.terms.items())))

    def sorted_terms(self) -> list[tuple[tuple, Poly]]:
        return sorted(self.terms.items(), key=lambda kv: (self.pres.monomial_degree(kv[0]), kv[0]))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, p in self.sorted_terms():
            parts.append(f"({p})·{self.pres.monomial_name(m)}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"Form({self})"


# -- module-level operation surface ---------------------------------------


def normalize(pres: Presentation, names: Iterable[str], coeff: Poly | ScalarLike = 1) -> Form:
    """Normal form of a raw generator product with a coefficient."""
    return pres.wedge_of(names, coeff)


def wedge(a: Form, b: Form) -> Form:
    return a.wedge(b)


def differential(a: Form) -> Form:
    return a.d()


def top_coefficient(a: Form) -> Poly:
    return a.top_coefficient()


# -- validation --------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: str | None = None

    def as_dict(self) -> dict:
        out = {"name": self.name, "status": "pass" if self.passed else "fail"}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class Report:
    checks: list[CheckResult] = field(default_factory=list)

    def add(self, name: str, passed: bool, witness: str | None = None):
        self.checks.append(CheckResult(name, passed, None if passed else witness))

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def extend(self, other: "Report", prefix: str = ""):
        for c in other.checks:
            self.checks.append(
                CheckResult(prefix + c.name if prefix else c.name, c.passed, c.witness)
            )

    def as_dict(self) -> dict:
        return {
            "checks": [c.as_dict() for c in self.checks],
            "total": len(self.checks),
            "failed": len(self.failures()),
        }


def _random_homogeneous_form(pres: Presentation, rng: random.Random) -> Form:
    basis = pres.basis_monomials()
    degrees = sorted({pres.monomial_degree(m) for m in basis if m})
    deg = rng.choice(degrees)
    monos = pres.basis_monomials(deg)
    picked = rng.sample(monos, k=min(len(monos), rng.randint(1, 3)))
    terms: dict[tuple, Poly] = {}
    for m in picked:
        coeff = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        if coeff == 0:
            continue
        poly = Poly.const(coeff) * Poly.var("t", rng.randint(0, 2))
        terms[m] = poly
    return Form(pres, terms)


def validate_presentation(
    pres: Presentation,
    pairs: int = 200,
    triples: int = 500,
    rng_seed: int = 20260810,
) -> Report:
    """Self-consistency checks: relation degrees, d^2 = 0, Leibniz, associativity."""
    report = Report()
    for pattern, rhs in pres.relations.items():
        lhs_deg = pres.monomial_degree(pattern)
        bad = [m for _, m in rhs if pres.monomial_degree(m) != lhs_deg]
        if bad:
            report.add(
                f"relation-degree:{pres.monomial_name(pattern)}",
                False,
                f"rhs monomial {pres.monomial_name(bad[0])} has wrong degree",
            )
    report.add("relation-degrees", not report.failures())

    dd_witness = None
    for g in pres.generators:
        dg = pres.differential_form(g.name)
        if not dg.is_zero() and dg.degree() != g.degree + 1:
            dd_witness = f"d({g.name}) has degree {dg.degree()} != {g.degree + 1}"
            break
        ddg = dg.d()
        if not ddg.is_zero():
            dd_witness = f"d(d({g.name})) = {ddg}"
            break
    report.add("d-squared-zero", dd_witness is None, dd_witness)

    rng = random.Random(rng_seed)
    leibniz_witness = None
    for _ in range(pairs):
        a = _random_homogeneous_form(pres, rng)
        b = _random_homogeneous_form(pres, rng)
        if a.is_zero():
            continue
        sign = -1 if (a.degree() or 0) % 2 else 1
        lhs = a.wedge(b).d()
        rhs = a.d().wedge(b) + (a.wedge(b.d()) * sign)
        if lhs != rhs:
            leibniz_witness = f"a = {a}; b = {b}"
            break
    report.add(f"leibniz-random-{pairs}", leibniz_witness is None, leibniz_witness)

    assoc_witness = None
    for _ in range(triples):
        a = _random_homogeneous_form(pres, rng)
        b = _random_homogeneous_form(pres, rng)
        c = _random_homogeneous_form(pres, rng)
        if a.wedge(b).wedge(c) != a.wedge(b.wedge(c)):
            assoc_witness = f"a = {a}; b = {b}; c = {c}"
            break
    report.add(f"associativity-random-{triples}", assoc_witness is None, assoc_witness)

    comm_witness = None
    for _ in range(min(pairs, 100)):
        a = _random_homogeneous_form(pres, rng)
        b = _random_homogeneous_form(pres, rng)
        if a.is_zero() or b.is_zero():
            continue
        sign = -1 if ((a.degree() or 0) % 2 and (b.degree() or 0) % 2) else 1
        if a.wedge(b) != b.wedge(a) * sign:
            comm_witness = f"a = {a}; b = {b}"
            break
    report.add("graded-commutativity-random", comm_witness is None, comm_witness)
    return report
