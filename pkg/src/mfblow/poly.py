"""Sparse multivariate polynomials with exact rational coefficients.

A :class:`Ring` fixes an ordered list of variable names; a :class:`Polynomial`
is a map from exponent tuples to nonzero :class:`fractions.Fraction`
coefficients over that ring.  Both are immutable after construction.

The text format accepted by :func:`parse_poly` and produced by ``str(p)``::

    poly    := sum
    sum     := ["+" | "-"] product { ("+" | "-") product }
    product := power { ["*" | "/"] power }          (juxtaposition multiplies)
    power   := atom [ ("^" | "**") integer ]
    atom    := integer | identifier | "(" sum ")"

Division is only allowed by nonzero constants, so ``3/2*x`` is a term.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, Mapping, Tuple, Union

from .errors import ParseError, RingMismatchError

Monomial = Tuple[int, ...]
Coefficient = Union[int, Fraction]

_NAME_RE = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*\Z")


@dataclass(frozen=True)
class Ring:
    """Polynomial ring over the rationals in the variables ``vars``."""

    vars: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        if not self.vars:
            raise ValueError("a ring needs at least one variable")
        for v in self.vars:
            if not isinstance(v, str) or not _NAME_RE.match(v):
                raise ValueError(f"invalid variable name {v!r}")
        if len(set(self.vars)) != len(self.vars):
            raise ValueError(f"duplicate variable names in {self.vars}")

    @property
    def nvars(self) -> int:
        return len(self.vars)

    def index(self, var: str) -> int:
        try:
            return self.vars.index(var)
        except ValueError:
            raise KeyError(f"unknown variable {var!r} in ring {self.vars}") from None

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.const(1)

    def const(self, c: Coefficient) -> "Polynomial":
        c = Fraction(c)
        return Polynomial(self, {(0,) * self.nvars: c} if c else {})

    def var(self, name: str) -> "Polynomial":
        e = [0] * self.nvars
        e[self.index(name)] = 1
        return Polynomial(self, {tuple(e): Fraction(1)})

    def gens(self) -> Tuple["Polynomial", ...]:
        return tuple(self.var(v) for v in self.vars)

    def parse(self, text: str) -> "Polynomial":
        return parse_poly(text, self)

    def extend(self, names: Iterable[str]) -> "Ring":
        return Ring(self.vars + tuple(names))

    def drop(self, names: Iterable[str]) -> "Ring":
        names = set(names)
        return Ring(tuple(v for v in self.vars if v not in names))

    def fresh(self, stem: str) -> str:
        """Return a variable name starting with ``stem`` not used in the ring."""
        if stem not in self.vars:
            return stem
        i = 0
        while f"{stem}_{i}" in self.vars:
            i += 1
        return f"{stem}_{i}"

    def __str__(self):
        return "QQ[" + ",".join(self.vars) + "]"


def _degrevlex_key(m: Monomial):
    return (sum(m), tuple(-e for e in reversed(m)))


class Polynomial:
    """Immutable sparse polynomial; ``terms`` maps exponent tuples to coefficients."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring, terms: Mapping[Monomial, Coefficient] = None):
        self.ring = ring
        clean: Dict[Monomial, Fraction] = {}
        if terms:
            n = ring.nvars
            for m, c in terms.items():
                if c:
                    if len(m) != n:
                        raise ValueError(f"monomial {m} has wrong arity for {ring}")
                    clean[tuple(m)] = Fraction(c)
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ring: Ring, terms: Dict[Monomial, Fraction]) -> "Polynomial":
        # trusted constructor: terms already clean
        p = cls.__new__(cls)
        p.ring = ring
        p.terms = terms
        p._hash = None
        return p

    # -- inspection ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.ring.nvars, Fraction(0))

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=-1)

    def support_vars(self) -> Tuple[str, ...]:
        used = [False] * self.ring.nvars
        for m in self.terms:
            for i, e in enumerate(m):
                if e:
                    used[i] = True
        return tuple(v for v, u in zip(self.ring.vars, used) if u)

    def degree_in(self, var: str) -> int:
        i = self.ring.index(var)
        return max((m[i] for m in self.terms), default=-1)

    def sorted_terms(self):
        """Terms in canonical (degrevlex, descending) order."""
        return sorted(self.terms.items(), key=lambda t: _degrevlex_key(t[0]), reverse=True)

    def homogeneous_part(self, d: int) -> "Polynomial":
        return Polynomial._raw(self.ring, {m: c for m, c in self.terms.items() if sum(m) == d})

    def order(self) -> int:
        """Lowest total degree of a term; -1 for zero."""
        return min((sum(m) for m in self.terms), default=-1)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise RingMismatchError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Polynomial._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Polynomial._raw(self.ring, out)

    __rmul__ = __mul__

    def scale(self, c: Coefficient) -> "Polynomial":
        c = Fraction(c)
        if not c:
            return self.ring.zero()
        return Polynomial._raw(self.ring, {m: c * v for m, v in self.terms.items()})

    def mul_term(self, mono: Monomial, c: Fraction) -> "Polynomial":
        return Polynomial._raw(
            self.ring,
            {tuple(a + b for a, b in zip(m, mono)): c * v for m, v in self.terms.items()},
        )

    def __truediv__(self, other):
        if isinstance(other, Polynomial):
            if not other.is_constant() or other.is_zero():
                raise ZeroDivisionError("only division by nonzero constants is supported")
            other = other.constant_term()
        if not other:
            raise ZeroDivisionError("division by zero")
        return self.scale(1 / Fraction(other))

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def diff(self, var: str) -> "Polynomial":
        i = self.ring.index(var)
        out = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                out[m[:i] + (e - 1,) + m[i + 1:]] = c * e
        return Polynomial._raw(self.ring, out)

    def monic(self) -> "Polynomial":
        """Scale so that the canonical leading coefficient is 1."""
        if not self.terms:
            return self
        return self / self.sorted_terms()[0][1]

    # -- ring changes -------------------------------------------------------

    def to_ring(self, ring: Ring) -> "Polynomial":
        """Reinterpret in ``ring``; every variable actually used must exist there."""
        if ring == self.ring:
            return self
        used = self.support_vars()
        missing = [v for v in used if v not in ring.vars]
        if missing:
            raise RingMismatchError(f"variables {missing} do not exist in {ring}")
        pos = [self.ring.index(v) for v in ring.vars if v in self.ring.vars]
        target = [ring.index(v) for v in ring.vars if v in self.ring.vars]
        out = {}
        for m, c in self.terms.items():
            e = [0] * ring.nvars
            for s, t in zip(pos, target):
                e[t] = m[s]
            out[tuple(e)] = c
        return Polynomial._raw(ring, out)

    def evaluate(self, point: Mapping[str, Coefficient]) -> Fraction:
        vals = [Fraction(point[v]) for v in self.ring.vars]
        total = Fraction(0)
        for m, c in self.terms.items():
            t = c
            for x, e in zip(vals, m):
                if e:
                    t *= x ** e
            total += t
        return total

    # -- equality, hashing, printing ---------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.terms == self.ring.const(other).terms
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __iter__(self) -> Iterator[Tuple[Monomial, Fraction]]:
        return iter(self.sorted_terms())

    def __len__(self):
        return len(self.terms)

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Polynomial({format_poly(self)!r}, {self.ring.vars})"


def format_monomial(m: Monomial, names: Tuple[str, ...]) -> str:
    parts = []
    for v, e in zip(names, m):
        if e == 1:
            parts.append(v)
        elif e > 1:
            parts.append(f"{v}^{e}")
    return "*".join(parts)


def format_poly(p: Polynomial) -> str:
    """Canonical text: terms in descending degrevlex order."""
    if not p.terms:
        return "0"
    out = []
    for i, (m, c) in enumerate(p.sorted_terms()):
        mono = format_monomial(m, p.ring.vars)
        neg = c < 0
        a = -c if neg else c
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if i == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


# -- parsing -----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[a-zA-Z][a-zA-Z0-9_]*)|(?P<op>\*\*|[-+*/^()]))"
)


def _tokenize(text: str):
    pos = 0
    tokens = []
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, ring: Ring):
        self.text = text
        self.ring = ring
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value:
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    def parse(self) -> Polynomial:
        p = self.sum()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", pos)
        return p

    def sum(self) -> Polynomial:
        kind, val, pos = self.peek()
        sign = 1
        if val in ("+", "-"):
            self.take()
            sign = -1 if val == "-" else 1
        acc = self.product()
        if sign < 0:
            acc = -acc
        while True:
            kind, val, pos = self.peek()
            if val == "+":
                self.take()
                acc = acc + self.product()
            elif val == "-":
                self.take()
                acc = acc - self.product()
            else:
                return acc

    def _starts_atom(self, tok) -> bool:
        kind, val, _ = tok
        return kind in ("num", "name") or val == "("

    def product(self) -> Polynomial:
        acc = self.power()
        while True:
            tok = self.peek()
            kind, val, pos = tok
            if val == "*":
                self.take()
                acc = acc * self.power()
            elif val == "/":
                self.take()
                denom = self.power()
                if denom.is_zero():
                    raise ParseError("division by zero", pos)
                if not denom.is_constant():
                    raise ParseError("division only by constants", pos)
                acc = acc / denom
            elif self._starts_atom(tok):
                acc = acc * self.power()
            else:
                return acc

    def power(self) -> Polynomial:
        base = self.atom()
        kind, val, pos = self.peek()
        if val in ("^", "**"):
            self.take()
            kind, val, pos = self.take()
            if kind != "num":
                raise ParseError("exponent must be a non-negative integer", pos)
            base = base ** int(val)
        return base

    def atom(self) -> Polynomial:
        kind, val, pos = self.take()
        if kind == "num":
            return self.ring.const(int(val))
        if kind == "name":
            if val not in self.ring.vars:
                raise ParseError(f"unknown variable {val!r}", pos)
            return self.ring.var(val)
        if val == "(":
            inner = self.sum()
            self.expect(")")
            return inner
        if kind == "end":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected token {val!r}", pos)


def parse_poly(text: str, ring: Ring) -> Polynomial:
    """Parse ``text`` into a polynomial of ``ring``.

    Raises :class:`ParseError` (with a character offset) on bad syntax or
    unknown variable names.
    """
    if not isinstance(text, str):
        raise ParseError(f"expected a string, got {type(text).__name__}", 0)
    return _Parser(text, ring).parse()


# -- functional API ----------------------------------------------------------

def add(p: Polynomial, q: Polynomial) -> Polynomial:
    return p + q


def sub(p: Polynomial, q: Polynomial) -> Polynomial:
    return p - q


def mul(p: Polynomial, q: Polynomial) -> Polynomial:
    return p * q


def pow(p: Polynomial, k: int) -> Polynomial:  # noqa: A001 - mirrors the arithmetic API
    return p ** k


def partial_derivative(p: Polynomial, var: str) -> Polynomial:
    return p.diff(var)


def substitute(p: Polynomial, assignments: Mapping[str, Polynomial], ring: Ring = None) -> Polynomial:
    """Simultaneously replace variables by polynomials.

    The result lives in ``ring`` if given, otherwise in the common ring of the
    assigned values (or ``p.ring`` when nothing is assigned).  Unassigned
    variables of ``p`` must exist in the target ring.
    """
    if not assignments:
        return p if ring is None else p.to_ring(ring)
    if ring is None:
        rings = {q.ring for q in assignments.values()}
        if len(rings) != 1:
            raise RingMismatchError("assigned values live in different rings")
        ring = rings.pop()
    for name in assignments:
        p.ring.index(name)
    values = {}
    for name, q in assignments.items():
        if q.ring != ring:
            q = q.to_ring(ring)
        values[name] = q
    for v in p.support_vars():
        if v not in values and v not in ring.vars:
            raise RingMismatchError(f"unassigned variable {v!r} missing from {ring}")
    idx = {v: i for i, v in enumerate(p.ring.vars)}
    power_cache: Dict[Tuple[str, int], Polynomial] = {}

    def factor(v: str, e: int) -> Polynomial:
        key = (v, e)
        if key not in power_cache:
            base = values[v] if v in values else ring.var(v)
            power_cache[key] = base ** e
        return power_cache[key]

    total = ring.zero()
    for m, c in p.terms.items():
        term = ring.const(c)
        for v in p.ring.vars:
            e = m[idx[v]]
            if e:
                term = term * factor(v, e)
        total = total + term
    return total


def divide(p: Polynomial, q: Polynomial) -> Tuple[Polynomial, Polynomial]:
    """Multivariate division of ``p`` by the single polynomial ``q`` (degrevlex).

    Returns ``(quotient, remainder)`` with ``p = quotient*q + remainder``; the
    remainder is zero exactly when ``q`` divides ``p``.
    """
    if q.ring != p.ring:
        raise RingMismatchError(f"ring mismatch: {p.ring} vs {q.ring}")
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    lm, lc = q.sorted_terms()[0]
    quot: Dict[Monomial, Fraction] = {}
    rem: Dict[Monomial, Fraction] = {}
    work = dict(p.terms)
    while work:
        m = max(work, key=_degrevlex_key)
        c = work[m]
        if all(a >= b for a, b in zip(m, lm)):
            shift = tuple(a - b for a, b in zip(m, lm))
            k = c / lc
            quot[shift] = quot.get(shift, 0) + k
            for mq, cq in q.terms.items():
                mm = tuple(a + b for a, b in zip(mq, shift))
                s = work.get(mm, 0) - k * cq
                if s:
                    work[mm] = s
                else:
                    work.pop(mm, None)
        else:
            rem[m] = work.pop(m)
    return Polynomial(p.ring, quot), Polynomial._raw(p.ring, rem)


def exact_divide(p: Polynomial, q: Polynomial) -> Polynomial:
    """Return ``p / q``; raises ``ArithmeticError`` if ``q`` does not divide ``p``."""
    quot, rem = divide(p, q)
    if rem:
        raise ArithmeticError(f"{q} does not divide {p}")
    return quot
