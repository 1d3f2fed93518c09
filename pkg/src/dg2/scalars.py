"""Exact scalar arithmetic and sparse multivariate polynomials.

Scalars live in Q or in a single real quadratic extension Q(sqrt(d)) with d
a fixed square-free integer; values of different nonzero d never combine
silently.  Polynomials are sparse maps from exponent vectors over a fixed,
ordered symbol table to nonzero Scalar coefficients, with the small calculus
helpers (formal derivative, integration of one symbol over [0,1]) needed by
the exterior-algebra layer.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Mapping, Union

#: Fixed ordered symbol table.  Unknown symbols are always an error.
SYMBOLS = ("t", "a1", "a2", "a3", "s", "lam", "c", "b1", "b2", "b3")
SYMBOL_INDEX = {name: i for i, name in enumerate(SYMBOLS)}
NSYMBOLS = len(SYMBOLS)

#: Exponents above this are treated as a hard error (everything in scope is
#: low degree; a runaway exponent means a bug, not a big computation).
MAX_EXPONENT = 64


class ExtensionMismatchError(ValueError):
    """Arithmetic attempted between Q(sqrt(d)) and Q(sqrt(d')) with d != d'."""


class UnknownSymbolError(ValueError):
    """A symbol name that is not in the fixed symbol table."""


class UnboundSymbolError(ValueError):
    """Float evaluation hit a symbol with no binding."""


class ExponentOverflowError(OverflowError):
    """An exponent exceeded MAX_EXPONENT."""


RationalLike = Union[int, Fraction]


def _as_fraction(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


def squarefree_decomposition(n: int) -> tuple[int, int]:
    """Write n = s^2 * d with d square-free; return (s, d).  Requires n >= 0."""
    if n < 0:
        raise ValueError("negative radicand")
    if n == 0:
        return 0, 0
    s, d, f = 1, 1, 2
    m = n
    while f * f <= m:
        if m % f == 0:
            e = 0
            while m % f == 0:
                m //= f
                e += 1
            s *= f ** (e // 2)
            if e % 2:
                d *= f
        f += 1
    d *= m
    return s, d


class Scalar:
    """An exact value p + q*sqrt(d) with p, q rational and d square-free.

    Canonical form: q == 0 forces d == 0, and d in {0, 1} forces q == 0
    (after folding q*sqrt(1) into p).  A non-square-free d supplied by the
    caller is normalized by extracting its square part.
    """

    __slots__ = ("p", "q", "d")

    def __init__(self, p: RationalLike = 0, q: RationalLike = 0, d: int = 0):
        p = _as_fraction(p)
        q = _as_fraction(q)
        d = int(d)
        if d < 0:
            raise ValueError("extension discriminant must be non-negative")
        if q != 0 and d > 1:
            s, d0 = squarefree_decomposition(d)
            q, d = q * s, d0
        if d == 1:
            p, q, d = p + q, Fraction(0), 0
        if d == 0 or q == 0:
            q, d = Fraction(0), 0
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "d", d)

    def __setattr__(self, *_):
        raise AttributeError("Scalar is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def from_rational(cls, x: RationalLike) -> "Scalar":
        return cls(_as_fraction(x))

    @classmethod
    def sqrt_rational(cls, x: RationalLike) -> "Scalar":
        """Exact square root of a non-negative rational, as p + q*sqrt(d)."""
        x = _as_fraction(x)
        if x < 0:
            raise ValueError("negative radicand")
        s, d = squarefree_decomposition(x.numerator * x.denominator)
        if d <= 1:
            return cls(Fraction(s, x.denominator))
        return cls(0, Fraction(s, x.denominator), d)

    # -- helpers ------------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.q == 0

    def is_zero(self) -> bool:
        return self.p == 0 and self.q == 0

    def _join(self, other: "Scalar") -> int:
        if self.d and other.d and self.d != other.d:
            raise ExtensionMismatchError(
                f"cannot combine sqrt({self.d}) with sqrt({other.d})"
            )
        return self.d or other.d

    @staticmethod
    def _coerce(x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        if isinstance(x, (int, Fraction)):
            return Scalar(x)
        return NotImplemented

    # -- ring operations ----------------------------------------------

    def __add__(self, other) -> "Scalar":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        d = self._join(other)
        return Scalar(self.p + other.p, self.q + other.q, d)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar(-self.p, -self.q, self.d)

    def __sub__(self, other) -> "Scalar":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Scalar":
        return (-self) + other

    def __mul__(self, other) -> "Scalar":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        d = self._join(other)
        return Scalar(
            self.p * other.p + self.q * other.q * d,
            self.p * other.q + self.q * other.p,
            d,
        )

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        n = self.p * self.p - self.q * self.q * self.d
        # n == 0 would force p = q = 0 since d is square-free (> 1).
        return Scalar(self.p / n, -self.q / n, self.d)

    def __truediv__(self, other) -> "Scalar":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> "Scalar":
        return self.inverse() * other

    def __pow__(self, n: int) -> "Scalar":
        if n < 0:
            return self.inverse() ** (-n)
        out = Scalar(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self) -> "Scalar":
        return Scalar(self.p, -self.q, self.d)

    def norm(self) -> Fraction:
        """The field norm p^2 - q^2 * d, always rational."""
        return self.p * self.p - self.q * self.q * self.d

    # -- comparisons ---------------------------------------------------

    def sign(self) -> int:
        if self.q == 0:
            return (self.p > 0) - (self.p < 0)
        if self.p == 0:
            return 1 if self.q > 0 else -1
        if self.p > 0 and self.q > 0:
            return 1
        if self.p < 0 and self.q < 0:
            return -1
        # opposite signs: compare p^2 with q^2 d
        lhs = self.p * self.p
        rhs = self.q * self.q * self.d
        if self.p > 0:
            return 1 if lhs > rhs else (-1 if lhs < rhs else 0)
        return -1 if lhs > rhs else (1 if lhs < rhs else 0)

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.p == other.p and self.q == other.q and self.d == other.d

    def __hash__(self):
        return hash((self.p, self.q, self.d))

    def __lt__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).sign() < 0

    def __le__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).sign() <= 0

    def __gt__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).sign() > 0

    def __ge__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).sign() >= 0

    # -- conversion / rendering ----------------------------------------

    def __float__(self) -> float:
        return float(self.p) + float(self.q) * math.sqrt(self.d)

    def as_fraction(self) -> Fraction:
        if self.q != 0:
            raise ValueError(f"{self} is not rational")
        return self.p

    def __str__(self) -> str:
        if self.q == 0:
            return str(self.p)
        root = f"sqrt({self.d})" if self.q == 1 else (
            f"-sqrt({self.d})" if self.q == -1 else f"{self.q}*sqrt({self.d})"
        )
        if self.p == 0:
            return root
        sep = "-" if root.startswith("-") else "+"
        return f"{self.p}{sep}{root.lstrip('-')}"

    def __repr__(self) -> str:
        return f"Scalar({self.p!r}, {self.q!r}, {self.d})"


ScalarLike = Union[Scalar, int, Fraction]


def _as_scalar(x: ScalarLike) -> Scalar:
    return x if isinstance(x, Scalar) else Scalar(_as_fraction(x))


def _symbol_index(name: str) -> int:
    try:
        return SYMBOL_INDEX[name]
    except KeyError:
        raise UnknownSymbolError(f"unknown symbol {name!r}") from None


_ZERO_EXP = (0,) * NSYMBOLS


class Poly:
    """Sparse multivariate polynomial over Scalar in the fixed symbol table.

    terms maps exponent vectors (length NSYMBOLS tuples) to nonzero Scalar
    coefficients.  Equality is structural equality of this canonical form.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple, Scalar] | None = None):
        clean: dict[tuple, Scalar] = {}
        if terms:
            for exps, coeff in terms.items():
                if len(exps) != NSYMBOLS:
                    raise ValueError("exponent vector has wrong length")
                if any(e < 0 for e in exps):
                    raise ValueError("negative exponent")
                if any(e > MAX_EXPONENT for e in exps):
                    raise ExponentOverflowError(f"exponent above {MAX_EXPONENT}")
                coeff = _as_scalar(coeff)
                if not coeff.is_zero():
                    clean[tuple(exps)] = coeff
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *_):
        raise AttributeError("Poly is immutable")

    # -- constructors --------------------------------------------------

    @classmethod
    def zero(cls) -> "Poly":
        return cls()

    @classmethod
    def const(cls, value: ScalarLike) -> "Poly":
        value = _as_scalar(value)
        if value.is_zero():
            return cls()
        return cls({_ZERO_EXP: value})

    @classmethod
    def var(cls, name: str, power: int = 1, coeff: ScalarLike = 1) -> "Poly":
        idx = _symbol_index(name)
        exps = list(_ZERO_EXP)
        exps[idx] = power
        return cls({tuple(exps): _as_scalar(coeff)})

    # -- basics ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and _ZERO_EXP in self.terms)

    def constant_value(self) -> Scalar:
        if self.is_zero():
            return Scalar(0)
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.terms[_ZERO_EXP]

    def symbols(self) -> set[str]:
        used: set[str] = set()
        for exps in self.terms:
            for i, e in enumerate(exps):
                if e:
                    used.add(SYMBOLS[i])
        return used

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def degree_in(self, name: str) -> int:
        idx = _symbol_index(name)
        return max((e[idx] for e in self.terms), default=0)

    def __eq__(self, other) -> bool:
        other = _as_poly_or_none(other)
        if other is None:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- ring operations -------------------------------------------------

    def __add__(self, other) -> "Poly":
        other = _as_poly_or_none(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for exps, coeff in other.terms.items():
            cur = out.get(exps)
            acc = coeff if cur is None else cur + coeff
            if acc.is_zero():
                out.pop(exps, None)
            else:
                out[exps] = acc
        return _raw_poly(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return _raw_poly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        other = _as_poly_or_none(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def __mul__(self, other) -> "Poly":
        other = _as_poly_or_none(other)
        if other is None:
            return NotImplemented
        out: dict[tuple, Scalar] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                if any(e > MAX_EXPONENT for e in exps):
                    raise ExponentOverflowError(f"exponent above {MAX_EXPONENT}")
                coeff = c1 * c2
                cur = out.get(exps)
                acc = coeff if cur is None else cur + coeff
                if acc.is_zero():
                    out.pop(exps, None)
                else:
                    out[exps] = acc
        return _raw_poly(out)

    __rmul__ = __mul__

    def __truediv__(self, other: ScalarLike) -> "Poly":
        scal = _as_scalar(other)
        inv = scal.inverse()
        return _raw_poly({e: c * inv for e, c in self.terms.items()})

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = Poly.const(1)
        for _ in range(n):
            out = out * self
        return out

    # -- calculus ----------------------------------------------------------

    def differentiate(self, name: str) -> "Poly":
        """Formal partial derivative with respect to one symbol."""
        idx = _symbol_index(name)
        out: dict[tuple, Scalar] = {}
        for exps, coeff in self.terms.items():
            e = exps[idx]
            if e == 0:
                continue
            new = list(exps)
            new[idx] = e - 1
            key = tuple(new)
            add = coeff * e
            cur = out.get(key)
            acc = add if cur is None else cur + add
            if acc.is_zero():
                out.pop(key, None)
            else:
                out[key] = acc
        return _raw_poly(out)

    def integrate_unit_interval(self, name: str) -> "Poly":
        """Integrate one symbol over [0, 1]: each sym^j becomes 1/(j+1)."""
        idx = _symbol_index(name)
        out: dict[tuple, Scalar] = {}
        for exps, coeff in self.terms.items():
            e = exps[idx]
            new = list(exps)
            new[idx] = 0
            key = tuple(new)
            add = coeff * Fraction(1, e + 1)
            cur = out.get(key)
            acc = add if cur is None else cur + add
            if acc.is_zero():
                out.pop(key, None)
            else:
                out[key] = acc
        return _raw_poly(out)

    # -- substitution / evaluation -------------------------------------------

    def substitute(self, bindings: Mapping[str, "Poly | ScalarLike"]) -> "Poly":
        """Simultaneous substitution of symbols, then canonicalization."""
        resolved: dict[int, Poly] = {}
        for name, value in bindings.items():
            idx = _symbol_index(name)
            resolved[idx] = value if isinstance(value, Poly) else Poly.const(value)
        out = Poly.zero()
        for exps, coeff in self.terms.items():
            term = Poly.const(coeff)
            for i, e in enumerate(exps):
                if not e:
                    continue
                if i in resolved:
                    term = term * resolved[i] ** e
                else:
                    term = term * Poly.var(SYMBOLS[i], e)
            out = out + term
        return out

    def reduce_square(self, name: str, value: "Poly | ScalarLike") -> "Poly":
        """Rewrite sym^e -> sym^(e mod 2) * value^(e div 2).

        This is remainder reduction modulo (sym^2 - value), used to impose
        quadratic constraints like t^2 = u or a3^2 = r2 exactly.
        """
        idx = _symbol_index(name)
        value = value if isinstance(value, Poly) else Poly.const(value)
        out = Poly.zero()
        for exps, coeff in self.terms.items():
            e = exps[idx]
            rest = list(exps)
            rest[idx] = e % 2
            term = _raw_poly({tuple(rest): coeff})
            if e >= 2:
                term = term * value ** (e // 2)
            out = out + term
        return out

    def eval_float(self, bindings: Mapping[str, float]) -> float:
        """Double-precision evaluation; every used symbol must be bound."""
        values = [None] * NSYMBOLS
        for name, v in bindings.items():
            values[_symbol_index(name)] = float(v)
        acc = 0.0
        for exps, coeff in self.terms.items():
            term = float(coeff)
            for i, e in enumerate(exps):
                if not e:
                    continue
                if values[i] is None:
                    raise UnboundSymbolError(f"symbol {SYMBOLS[i]!r} is unbound")
                term *= values[i] ** e
            acc += term
        return acc

    def decompose_by(self, name: str) -> dict[int, "Poly"]:
        """Split into coefficients of powers of one symbol."""
        idx = _symbol_index(name)
        buckets: dict[int, dict[tuple, Scalar]] = {}
        for exps, coeff in self.terms.items():
            e = exps[idx]
            rest = list(exps)
            rest[idx] = 0
            buckets.setdefault(e, {})[tuple(rest)] = coeff
        return {e: _raw_poly(terms) for e, terms in buckets.items()}

    def coefficient_of(self, name: str, power: int) -> "Poly":
        return self.decompose_by(name).get(power, Poly.zero())

    # -- rendering -----------------------------------------------------------

    def sorted_terms(self) -> list[tuple[tuple, Scalar]]:
        """Terms in descending graded-lex order on the fixed symbol order."""
        return sorted(
            self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]), reverse=True
        )

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exps, coeff in self.sorted_terms():
            mono = "*".join(
                SYMBOLS[i] if e == 1 else f"{SYMBOLS[i]}^{e}"
                for i, e in enumerate(exps)
                if e
            )
            if not mono:
                parts.append(str(coeff))
            elif coeff == Scalar(1):
                parts.append(mono)
            elif coeff == Scalar(-1):
                parts.append(f"-{mono}")
            elif coeff.is_rational or coeff.p == 0:
                parts.append(f"{coeff}*{mono}")
            else:
                parts.append(f"({coeff})*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"Poly({self})"


def _raw_poly(terms: dict[tuple, Scalar]) -> Poly:
    out = Poly.__new__(Poly)
    object.__setattr__(out, "terms", terms)
    return out


def _as_poly_or_none(x) -> Poly | None:
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction, Scalar)):
        return Poly.const(x)
    return None


def poly_arith(p: Poly, q: Poly, op: str) -> Poly:
    """Named dispatcher over the ring operations (add, sub, mul, neg)."""
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    if op == "neg":
        return -p
    raise ValueError(f"unknown operation {op!r}")


def substitute(p: Poly, bindings: Mapping[str, Poly | ScalarLike]) -> Poly:
    return p.substitute(bindings)


def differentiate(p: Poly, name: str) -> Poly:
    return p.differentiate(name)


def integrate_unit_interval(p: Poly, name: str) -> Poly:
    return p.integrate_unit_interval(name)


def eval_float(p: Poly, bindings: Mapping[str, float]) -> float:
    return p.eval_float(bindings)


def rational_str(x: Fraction) -> str:
    """Render a rational as 'p/q' with an explicit denominator."""
    x = _as_fraction(x)
    return f"{x.numerator}/{x.denominator}"
