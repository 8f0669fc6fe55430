"""Gröbner bases and the ideal operations built on them.

Buchberger's algorithm with the normal selection strategy and the
Gebauer-Möller installation of Buchberger's two criteria.  Internally
polynomials are plain ``{exponent tuple: Fraction}`` dicts; the public
functions take and return :class:`~mfblow.poly.Polynomial`.
"""

from __future__ import annotations

import itertools
import logging
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import DimensionError, NotZeroDimensional, RingMismatchError
from .poly import Monomial, Polynomial, Ring, exact_divide

log = logging.getLogger(__name__)

Terms = Dict[Monomial, Fraction]


@dataclass(frozen=True)
class MonomialOrder:
    """``lex``, ``degrevlex`` or ``block`` (degrevlex on ``elim`` then degrevlex on the rest).

    Variable precedence always follows the ring's variable order.
    """

    kind: str = "degrevlex"
    elim: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in ("lex", "degrevlex", "block"):
            raise ValueError(f"unknown monomial order {self.kind!r}")
        object.__setattr__(self, "elim", tuple(self.elim))
        if self.kind != "block" and self.elim:
            raise ValueError("only block orders take elimination variables")

    def key(self, ring: Ring) -> Callable[[Monomial], tuple]:
        """Sort key: larger key means larger monomial."""
        return _order_key(self, ring)

    def __str__(self):
        if self.kind == "block":
            return f"block({','.join(self.elim)};degrevlex)"
        return self.kind


LEX = MonomialOrder("lex")
DEGREVLEX = MonomialOrder("degrevlex")


def block_order(elim_vars: Iterable[str]) -> MonomialOrder:
    return MonomialOrder("block", tuple(elim_vars))


@lru_cache(maxsize=None)
def _order_key(order: MonomialOrder, ring: Ring):
    n = ring.nvars
    if order.kind == "lex":
        return lambda m: m
    if order.kind == "degrevlex":
        rev = tuple(range(n - 1, -1, -1))

        @lru_cache(maxsize=1 << 16)
        def key(m):
            return (sum(m),) + tuple(-m[i] for i in rev)

        return key
    for v in order.elim:
        if v not in ring.vars:
            raise ValueError(f"elimination variable {v!r} not in {ring}")
    first = [i for i, v in enumerate(ring.vars) if v in order.elim]
    rest = [i for i, v in enumerate(ring.vars) if v not in order.elim]
    first_rev = first[::-1]
    rest_rev = rest[::-1]

    @lru_cache(maxsize=1 << 16)
    def block_key(m):
        return (
            (sum(m[i] for i in first),)
            + tuple(-m[i] for i in first_rev)
            + (sum(m[i] for i in rest),)
            + tuple(-m[i] for i in rest_rev)
        )

    return block_key


# -- low level helpers on term dicts ---------------------------------------

def _divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x if x > y else y for x, y in zip(a, b))


def _coprime(a: Monomial, b: Monomial) -> bool:
    return all(not (x and y) for x, y in zip(a, b))


def _leading(terms: Terms, key) -> Monomial:
    return max(terms, key=key)


def _monic(terms: Terms, key) -> Terms:
    lc = terms[_leading(terms, key)]
    if lc == 1:
        return terms
    inv = 1 / lc
    return {m: c * inv for m, c in terms.items()}


def _sub_multiple(work: Terms, g: Terms, shift: Monomial, k: Fraction) -> None:
    # work -= k * x^shift * g, in place
    for mg, cg in g.items():
        mm = tuple(a + b for a, b in zip(mg, shift))
        s = work.get(mm, 0) - k * cg
        if s:
            work[mm] = s
        else:
            work.pop(mm, None)


def _reduce(terms: Terms, basis: Sequence[Tuple[Monomial, Terms]], key) -> Terms:
    """Full reduction of ``terms`` by monic ``basis`` given as (lm, terms) pairs."""
    work = dict(terms)
    rem: Terms = {}
    while work:
        m = max(work, key=key)
        c = work[m]
        for lm, g in basis:
            if _divides(lm, m):
                _sub_multiple(work, g, tuple(a - b for a, b in zip(m, lm)), c)
                break
        else:
            rem[m] = work.pop(m)
    return rem


def _spoly(f: Tuple[Monomial, Terms], g: Tuple[Monomial, Terms]) -> Terms:
    lf, tf = f
    lg, tg = g
    l = _lcm(lf, lg)
    out: Terms = {}
    _sub_multiple(out, tf, tuple(a - b for a, b in zip(l, lf)), Fraction(-1))
    _sub_multiple(out, tg, tuple(a - b for a, b in zip(l, lg)), Fraction(1))
    return out


def _groebner_terms(gens: List[Terms], key) -> List[Tuple[Monomial, Terms]]:
    """Reduced Gröbner basis as (lm, monic terms) pairs, sorted by descending lm."""
    polys: List[Tuple[Monomial, Terms]] = []
    active: List[int] = []
    pairs: List[Tuple[int, int, Monomial]] = []

    def basis():
        return [polys[i] for i in active]

    def install(h: Terms):
        nonlocal active, pairs
        h = _monic(h, key)
        lh = _leading(h, key)
        if not any(lh):
            polys.append((lh, h))
            active = [len(polys) - 1]
            pairs = []
            return True
        polys.append((lh, h))
        ih = len(polys) - 1
        # Gebauer-Möller update
        cand = [(ih, g, _lcm(lh, polys[g][0])) for g in active]
        keep = []
        for idx, (a, g1, l1) in enumerate(cand):
            if _coprime(lh, polys[g1][0]):
                keep.append((a, g1, l1))
                continue
            dominated = False
            for b, g2, l2 in cand[idx + 1:]:
                if _divides(l2, l1):
                    dominated = True
                    break
            if not dominated:
                for b, g2, l2 in keep:
                    if _divides(l2, l1):
                        dominated = True
                        break
            if not dominated:
                keep.append((a, g1, l1))
        new_pairs = [(a, g, l) for a, g, l in keep if not _coprime(lh, polys[g][0])]
        survivors = []
        for i, j, l in pairs:
            if (
                _divides(lh, l)
                and _lcm(polys[i][0], lh) != l
                and _lcm(polys[j][0], lh) != l
            ):
                continue
            survivors.append((i, j, l))
        pairs = survivors + new_pairs
        active = [g for g in active if not _divides(lh, polys[g][0])] + [ih]
        return False

    for t in gens:
        if not t:
            continue
        h = _reduce(t, basis(), key)
        if h and install(h):
            break

    steps = 0
    while pairs and not (len(active) == 1 and not any(polys[active[0]][0])):
        best = min(range(len(pairs)), key=lambda i: (sum(pairs[i][2]), key(pairs[i][2])))
        i, j, l = pairs.pop(best)
        s = _spoly(polys[i], polys[j])
        h = _reduce(s, basis(), key) if s else {}
        steps += 1
        if log.isEnabledFor(logging.DEBUG):
            log.debug(
                "pair (%d,%d) lcm=%s -> %s (basis %d, queue %d)",
                i, j, l, "0" if not h else f"new lm {_leading(h, key)}", len(active), len(pairs),
            )
        if h and install(h):
            break

    # interreduce
    gb = sorted(basis(), key=lambda p: key(p[0]), reverse=True)
    reduced = []
    for idx, (lm, g) in enumerate(gb):
        others = gb[:idx] + gb[idx + 1:]
        tail = {m: c for m, c in g.items() if m != lm}
        tail = _reduce(tail, others, key)
        tail[lm] = Fraction(1)
        reduced.append((lm, tail))
    log.debug("groebner basis: %d elements after %d S-pairs", len(reduced), steps)
    return reduced


# -- public API ---------------------------------------------------------------

def _check_ring(ring: Ring, polys: Iterable[Polynomial]) -> None:
    for p in polys:
        if p.ring != ring:
            raise RingMismatchError(f"ring mismatch: {p.ring} vs {ring}")


def buchberger(gens: Sequence[Polynomial], order: MonomialOrder = DEGREVLEX) -> List[Polynomial]:
    """Reduced Gröbner basis of the ideal generated by ``gens``.

    Elements are monic and sorted by decreasing leading monomial; the zero
    ideal gives ``[]``.
    """
    gens = list(gens)
    if not gens:
        return []
    ring = gens[0].ring
    _check_ring(ring, gens)
    key = order.key(ring)
    gb = _groebner_terms([dict(g.terms) for g in gens], key)
    return [Polynomial._raw(ring, t) for _, t in gb]


def leading_monomial(p: Polynomial, order: MonomialOrder = DEGREVLEX) -> Monomial:
    if p.is_zero():
        raise ValueError("zero polynomial has no leading monomial")
    return _leading(p.terms, order.key(p.ring))


def normal_form(p: Polynomial, basis: Sequence[Polynomial], order: MonomialOrder = DEGREVLEX) -> Polynomial:
    """Remainder of ``p`` under multivariate division by ``basis``.

    No monomial of the result is divisible by a leading monomial of the
    basis.  Only when ``basis`` is a Gröbner basis is the remainder canonical.
    """
    _check_ring(p.ring, basis)
    key = order.key(p.ring)
    pairs = []
    for g in basis:
        if g.is_zero():
            raise ValueError("basis elements must be nonzero")
        t = _monic(dict(g.terms), key)
        pairs.append((_leading(t, key), t))
    return Polynomial._raw(p.ring, _reduce(p.terms, pairs, key))


class Ideal:
    """Ideal of a polynomial ring given by generators.

    Reduced Gröbner bases are cached per monomial order.  The cache is
    write-once per key: concurrent readers may compute the same basis twice,
    which is harmless because reduced bases are unique.
    """

    def __init__(self, ring: Ring, generators: Iterable[Polynomial] = ()):
        gens = []
        for g in generators:
            if g.ring != ring:
                raise RingMismatchError(f"generator {g} not in {ring}")
            if not g.is_zero():
                gens.append(g)
        self.ring = ring
        self.generators: Tuple[Polynomial, ...] = tuple(gens)
        self._cache: Dict[MonomialOrder, Tuple[Polynomial, ...]] = {}
        self._lock = threading.Lock()

    @classmethod
    def parse(cls, ring: Ring, texts: Iterable[str]) -> "Ideal":
        return cls(ring, [ring.parse(t) for t in texts])

    def groebner_basis(self, order: MonomialOrder = DEGREVLEX) -> Tuple[Polynomial, ...]:
        gb = self._cache.get(order)
        if gb is None:
            gb = tuple(buchberger(self.generators, order))
            with self._lock:
                gb = self._cache.setdefault(order, gb)
        return gb

    def reduce(self, p: Polynomial, order: MonomialOrder = DEGREVLEX) -> Polynomial:
        gb = self.groebner_basis(order)
        if not gb:
            return p
        return normal_form(p, gb, order)

    def contains(self, p: Polynomial) -> bool:
        return self.reduce(p).is_zero()

    __contains__ = contains

    def is_unit(self) -> bool:
        gb = self.groebner_basis()
        return len(gb) == 1 and gb[0].is_constant()

    def is_zero(self) -> bool:
        return not self.generators

    def issubset(self, other: "Ideal") -> bool:
        if other.ring != self.ring:
            raise RingMismatchError("ideals live in different rings")
        return all(other.contains(g) for g in self.generators)

    def equals(self, other: "Ideal") -> bool:
        """Equality by double inclusion."""
        return self.issubset(other) and other.issubset(self)

    def __add__(self, other):
        if isinstance(other, Ideal):
            if other.ring != self.ring:
                raise RingMismatchError("ideals live in different rings")
            return Ideal(self.ring, self.generators + other.generators)
        return Ideal(self.ring, self.generators + tuple(other))

    def __mul__(self, other: "Ideal") -> "Ideal":
        return Ideal(self.ring, [a * b for a in self.generators for b in other.generators])

    def scale(self, h: Polynomial) -> "Ideal":
        return Ideal(self.ring, [h * g for g in self.generators])

    def to_ring(self, ring: Ring) -> "Ideal":
        return Ideal(ring, [g.to_ring(ring) for g in self.generators])

    def __iter__(self):
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)

    def __repr__(self):
        return "Ideal(" + ", ".join(str(g) for g in self.generators) + ")"


def minimal_generators(ideal: Ideal) -> Tuple[Polynomial, ...]:
    """An irredundant generating set picked greedily from the reduced basis, lowest degree first."""
    gb = sorted(ideal.groebner_basis(), key=lambda g: (g.total_degree(), len(g.terms)))
    chosen: List[Polynomial] = []
    for g in gb:
        if chosen and Ideal(ideal.ring, chosen).contains(g):
            continue
        chosen.append(g)
    # a later pick can make an earlier one redundant
    pruned = list(chosen)
    for g in list(chosen):
        rest = [h for h in pruned if h is not g]
        if rest and Ideal(ideal.ring, rest).contains(g):
            pruned = rest
    return tuple(pruned)


def ideal_member(p: Polynomial, ideal: Ideal) -> bool:
    if p.ring != ideal.ring:
        raise RingMismatchError("polynomial and ideal live in different rings")
    return ideal.contains(p)


def eliminate(ideal: Ideal, drop_vars: Iterable[str]) -> Ideal:
    """Generators of the elimination ideal ``I ∩ Q[remaining vars]``.

    The result lives in the ring without ``drop_vars``.
    """
    drop = [v for v in ideal.ring.vars if v in set(drop_vars)]
    unknown = set(drop_vars) - set(ideal.ring.vars)
    if unknown:
        raise ValueError(f"cannot eliminate unknown variables {sorted(unknown)}")
    if not drop:
        return ideal
    small = ideal.ring.drop(drop)
    gb = ideal.groebner_basis(block_order(drop))
    keep = [g for g in gb if not set(g.support_vars()) & set(drop)]
    return Ideal(small, [g.to_ring(small) for g in keep])


def saturate(ideal: Ideal, g: Polynomial) -> Ideal:
    """``I : g^∞`` via one elimination of an auxiliary variable ``u`` from ``I + (1 - u*g)``."""
    if g.is_zero():
        raise ValueError("cannot saturate by zero")
    if g.ring != ideal.ring:
        raise RingMismatchError("saturating polynomial lives in another ring")
    if g.is_constant():
        return ideal
    u = ideal.ring.fresh("u")
    big = ideal.ring.extend([u])
    gens = [h.to_ring(big) for h in ideal.generators]
    gens.append(big.one() - big.var(u) * g.to_ring(big))
    sat = eliminate(Ideal(big, gens), [u])
    return Ideal(ideal.ring, [h.to_ring(ideal.ring) for h in sat.generators])


def saturate_by_ideal(ideal: Ideal, other: Ideal) -> Ideal:
    """``I : J^∞`` as the intersection of the saturations by each generator of J."""
    gens = other.groebner_basis()
    if not gens:
        raise ValueError("cannot saturate by the zero ideal")
    result = None
    for g in gens:
        s = saturate(ideal, g)
        result = s if result is None else intersect(result, s)
    return result


def intersect(a: Ideal, b: Ideal) -> Ideal:
    """``I ∩ J`` by eliminating a tag variable from ``w*I + (1-w)*J``."""
    if a.ring != b.ring:
        raise RingMismatchError("ideals live in different rings")
    if a.is_zero() or b.is_zero():
        return Ideal(a.ring)
    w = a.ring.fresh("w")
    big = a.ring.extend([w])
    wv = big.var(w)
    gens = [wv * p.to_ring(big) for p in a.generators]
    gens += [(big.one() - wv) * p.to_ring(big) for p in b.generators]
    out = eliminate(Ideal(big, gens), [w])
    return Ideal(a.ring, [p.to_ring(a.ring) for p in out.generators])


def ideal_quotient(ideal: Ideal, g) -> Ideal:
    """``I : g`` via ``(I ∩ (g)) / g``; for an ideal ``J``, the intersection of ``I : g`` over its generators."""
    if isinstance(g, Ideal):
        if g.is_zero():
            raise ValueError("cannot take the quotient by the zero ideal")
        result = None
        for h in g.generators:
            q = ideal_quotient(ideal, h)
            result = q if result is None else intersect(result, q)
        return result
    if g.is_zero():
        raise ValueError("cannot take the quotient by zero")
    inter = intersect(ideal, Ideal(ideal.ring, [g]))
    return Ideal(ideal.ring, [exact_divide(p, g) for p in inter.generators])


def _independent_dimension(ring: Ring, lms: Sequence[Monomial]) -> int:
    masks = []
    for m in lms:
        mask = 0
        for i, e in enumerate(m):
            if e:
                mask |= 1 << i
        masks.append(mask)
    n = ring.nvars
    for size in range(n, -1, -1):
        for combo in itertools.combinations(range(n), size):
            s = 0
            for i in combo:
                s |= 1 << i
            if all(mask & ~s for mask in masks):
                return size
    return 0


def krull_dim(ideal: Ideal) -> int:
    """Dimension of the zero set of ``ideal`` over C; -1 for the unit ideal."""
    gb = ideal.groebner_basis()
    if not gb:
        return ideal.ring.nvars
    if ideal.is_unit():
        return -1
    key = DEGREVLEX.key(ideal.ring)
    return _independent_dimension(ideal.ring, [_leading(g.terms, key) for g in gb])


def standard_monomials(ideal: Ideal, order: MonomialOrder = DEGREVLEX) -> List[Monomial]:
    """Monomials outside the leading ideal; requires a zero-dimensional ideal."""
    gb = ideal.groebner_basis(order)
    n = ideal.ring.nvars
    if not gb:
        raise NotZeroDimensional("the zero ideal is not zero-dimensional")
    key = order.key(ideal.ring)
    lms = [_leading(g.terms, key) for g in gb]
    bounds = []
    for i in range(n):
        pure = [m[i] for m in lms if m[i] and all(e == 0 for j, e in enumerate(m) if j != i)]
        if not pure:
            raise NotZeroDimensional(f"ideal is not zero-dimensional (no pure power of {ideal.ring.vars[i]})")
        bounds.append(min(pure))
    out = []
    for m in itertools.product(*(range(b) for b in bounds)):
        if not any(_divides(lm, m) for lm in lms):
            out.append(m)
    return out


def vector_space_dim(ideal: Ideal) -> int:
    """``dim_Q Q[x]/I`` for a zero-dimensional ideal (0 for the unit ideal)."""
    if ideal.is_unit():
        return 0
    return len(standard_monomials(ideal))


@dataclass(frozen=True)
class PolyMatrix:
    """Dense matrix of polynomials stored row-major."""

    ring: Ring
    rows: int
    cols: int
    entries: Tuple[Polynomial, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if self.rows < 0 or self.cols < 0:
            raise DimensionError("matrix dimensions must be non-negative")
        if len(self.entries) != self.rows * self.cols:
            raise DimensionError(
                f"{len(self.entries)} entries for a {self.rows}x{self.cols} matrix"
            )
        _check_ring(self.ring, self.entries)

    @classmethod
    def from_rows(cls, ring: Ring, rows: Sequence[Sequence]) -> "PolyMatrix":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise DimensionError("ragged matrix rows")
        entries = []
        for r in rows:
            for e in r:
                if isinstance(e, str):
                    e = ring.parse(e)
                elif isinstance(e, (int, Fraction)):
                    e = ring.const(e)
                entries.append(e)
        return cls(ring, len(rows), ncols, entries)

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "PolyMatrix":
        return cls(ring, n, n, [ring.one() if i == j else ring.zero() for i in range(n) for j in range(n)])

    def __getitem__(self, ij) -> Polynomial:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> List[Polynomial]:
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def column(self, j: int) -> List[Polynomial]:
        return [self.entries[i * self.cols + j] for i in range(self.rows)]

    def tolist(self) -> List[List[Polynomial]]:
        return [self.row(i) for i in range(self.rows)]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "PolyMatrix":
        return PolyMatrix(self.ring, len(rows), len(cols), [self[i, j] for i in rows for j in cols])

    def select_columns(self, cols: Sequence[int]) -> "PolyMatrix":
        return self.submatrix(range(self.rows), cols)

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(self.ring, self.cols, self.rows, [self[i, j] for j in range(self.cols) for i in range(self.rows)])

    def map(self, fn: Callable[[Polynomial], Polynomial]) -> "PolyMatrix":
        return PolyMatrix(self.ring, self.rows, self.cols, [fn(e) for e in self.entries])

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        out = []
        for i in range(self.rows):
            for j in range(other.cols):
                acc = self.ring.zero()
                for k in range(self.cols):
                    a = self[i, k]
                    b = other[k, j]
                    if a and b:
                        acc = acc + a * b
                out.append(acc)
        return PolyMatrix(self.ring, self.rows, other.cols, out)

    def scaled(self, p: Polynomial) -> "PolyMatrix":
        return self.map(lambda e: e * p)

    def __str__(self):
        return "[" + "; ".join(", ".join(str(e) for e in self.row(i)) for i in range(self.rows)) + "]"


def det(matrix: PolyMatrix) -> Polynomial:
    """Determinant by Laplace expansion along rows, memoised on column subsets."""
    if matrix.rows != matrix.cols:
        raise DimensionError(f"determinant of a non-square {matrix.rows}x{matrix.cols} matrix")
    n = matrix.rows
    ring = matrix.ring
    if n == 0:
        return ring.one()
    memo: Dict[Tuple[int, ...], Polynomial] = {}

    def expand(i: int, cols: Tuple[int, ...]) -> Polynomial:
        if i == n:
            return ring.one()
        got = memo.get(cols)
        if got is not None:
            return got
        acc = ring.zero()
        for pos, j in enumerate(cols):
            a = matrix[i, j]
            if a.is_zero():
                continue
            sub = expand(i + 1, cols[:pos] + cols[pos + 1:])
            if sub.is_zero():
                continue
            term = a * sub
            acc = acc - term if pos % 2 else acc + term
        memo[cols] = acc
        return acc

    return expand(0, tuple(range(n)))


def minors(matrix: PolyMatrix, k: int) -> Ideal:
    """Ideal generated by all ``k``x``k`` minors (the unit ideal for ``k = 0``)."""
    if k < 0 or k > min(matrix.rows, matrix.cols):
        raise DimensionError(f"no {k}x{k} minors in a {matrix.rows}x{matrix.cols} matrix")
    if k == 0:
        return Ideal(matrix.ring, [matrix.ring.one()])
    gens = []
    for rows in itertools.combinations(range(matrix.rows), k):
        for cols in itertools.combinations(range(matrix.cols), k):
            d = det(matrix.submatrix(rows, cols))
            if d:
                gens.append(d)
    return Ideal(matrix.ring, gens)


def minor_list(matrix: PolyMatrix, k: int) -> List[Polynomial]:
    """All ``k``x``k`` minors in lexicographic (rows, cols) order, zeros included."""
    return [
        det(matrix.submatrix(rows, cols))
        for rows in itertools.combinations(range(matrix.rows), k)
        for cols in itertools.combinations(range(matrix.cols), k)
    ]
