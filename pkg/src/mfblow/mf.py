"""Matrix factorizations of hypersurface equations and their norm ideals."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .errors import (
    DegenerateChoice,
    DimensionError,
    NotAMatrixFactorization,
    NotPowerOfF,
)
from .groebner import DEGREVLEX, Ideal, PolyMatrix, det, ideal_quotient, minor_list, normal_form
from .poly import Polynomial, Ring, divide

XYZ = Ring(("x", "y", "z"))

GENERIC_COEFFICIENTS = (-3, -2, -1, 1, 2, 3)
MAX_RESEEDS = 8


@dataclass(frozen=True)
class MatrixFactorization:
    """A pair ``(phi, psi)`` of ``n``x``n`` matrices with ``phi*psi = psi*phi = f*Id``.

    Construction only checks shapes; call :func:`verify_mf` for the product
    identities.
    """

    f: Polynomial
    phi: PolyMatrix
    psi: PolyMatrix

    def __post_init__(self):
        if self.phi.rows != self.phi.cols or self.psi.rows != self.psi.cols:
            raise DimensionError("matrix factorization matrices must be square")
        if self.phi.rows != self.psi.rows:
            raise DimensionError(
                f"phi is {self.phi.rows}x{self.phi.cols} but psi is {self.psi.rows}x{self.psi.cols}"
            )
        if self.phi.ring != self.f.ring or self.psi.ring != self.f.ring:
            raise DimensionError("f, phi and psi must share one ring")
        if self.f.is_zero():
            raise NotAMatrixFactorization("the hypersurface equation must be nonzero")

    @property
    def ring(self) -> Ring:
        return self.f.ring

    @property
    def n(self) -> int:
        return self.phi.rows

    @property
    def r(self) -> int:
        return rank_of_coker(self)

    def swapped(self) -> "MatrixFactorization":
        return MatrixFactorization(self.f, self.psi, self.phi)

    @classmethod
    def from_strings(cls, ring: Ring, f: str, phi, psi) -> "MatrixFactorization":
        return cls(ring.parse(f), PolyMatrix.from_rows(ring, phi), PolyMatrix.from_rows(ring, psi))


@dataclass(frozen=True)
class NormChoice:
    """Which relations of ``phi`` span the norm computation.

    ``mode="columns"`` uses the 1-based column indices in ``columns``;
    ``mode="generic"`` takes seeded random integer combinations of all columns.
    """

    mode: str = "generic"
    columns: Tuple[int, ...] = ()
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("columns", "generic"):
            raise ValueError(f"unknown norm mode {self.mode!r}")
        object.__setattr__(self, "columns", tuple(self.columns))

    @classmethod
    def cols(cls, *columns: int) -> "NormChoice":
        return cls("columns", tuple(columns))


@dataclass
class VerifyReport:
    ok: bool
    is_reduced: bool
    phi_psi_ok: bool
    psi_phi_ok: bool

    def to_dict(self):
        return {
            "ok": self.ok,
            "is_reduced": self.is_reduced,
            "phi_psi_ok": self.phi_psi_ok,
            "psi_phi_ok": self.psi_phi_ok,
        }


def verify_mf(mf: MatrixFactorization) -> VerifyReport:
    """Check both products against ``f*Id`` exactly and test reducedness."""
    target = PolyMatrix.identity(mf.ring, mf.n).scaled(mf.f)
    a = (mf.phi @ mf.psi) == target
    b = (mf.psi @ mf.phi) == target
    reduced = all(e.constant_term() == 0 for e in mf.phi.entries + mf.psi.entries)
    return VerifyReport(ok=a and b, is_reduced=reduced, phi_psi_ok=a, psi_phi_ok=b)


def rank_of_coker(mf: MatrixFactorization) -> int:
    """Number of times ``f`` divides ``det(phi)`` leaving a nonzero constant."""
    d = det(mf.phi)
    if d.is_zero():
        raise NotPowerOfF("det(phi) vanishes; determinant is not a power of f")
    r = 0
    while not d.is_constant():
        q, rem = divide(d, mf.f)
        if rem:
            raise NotPowerOfF(f"determinant is not a power of f (leftover factor {d})")
        d = q
        r += 1
    return r


def reduce_mod(p: Polynomial, f: Polynomial) -> Polynomial:
    return normal_form(p, [f], DEGREVLEX)


def _section_matrix(mf: MatrixFactorization, choice: NormChoice, r: int, rng: random.Random) -> PolyMatrix:
    n = mf.n
    want = n - r
    if choice.mode == "columns":
        cols = choice.columns
        if len(cols) != want or len(set(cols)) != want or any(not 1 <= c <= n for c in cols):
            raise DegenerateChoice(
                f"need exactly {want} distinct column indices in 1..{n}, got {list(cols)}"
            )
        return mf.phi.select_columns([c - 1 for c in cols])
    coeffs = [[rng.choice(GENERIC_COEFFICIENTS) for _ in range(want)] for _ in range(n)]
    combo = PolyMatrix.from_rows(mf.ring, coeffs)
    return mf.phi @ combo


def _normalize_mod_f(gens: Sequence[Polynomial], f: Polynomial) -> Ideal:
    # The ideal of R = S/(f) is represented by its preimage I + (f): reduced GB
    # of the preimage with members of (f) removed.
    ring = f.ring
    reduced = [reduce_mod(g, f) for g in gens]
    reduced = [g for g in reduced if g]
    if not reduced:
        return Ideal(ring)
    gb = Ideal(ring, reduced + [f]).groebner_basis()
    kept = [g for g in gb if reduce_mod(g, f)]
    return Ideal(ring, kept)


def norm_ideal(mf: MatrixFactorization, choice: NormChoice = NormChoice(), full_minors: bool = False) -> Ideal:
    """A representative ideal of the norm class of ``coker(phi)`` over ``S/(f)``.

    Takes ``n - r`` relations (columns of ``phi`` or generic combinations of
    them) and returns their maximal minors modulo ``f``, normalized as the
    reduced Gröbner basis of ``minors + (f)`` without elements of ``(f)``.
    ``full_minors`` uses every ``(n-r)``-minor of ``phi`` instead; it is
    experimental.
    """
    r = rank_of_coker(mf)
    k = mf.n - r
    if k == 0:
        return Ideal(mf.ring, [mf.ring.one()])
    if full_minors:
        gens = minor_list(mf.phi, k)
        ideal = _normalize_mod_f(gens, mf.f)
        if ideal.is_zero():
            raise DegenerateChoice("all minors of phi vanish modulo f")
        return ideal
    attempts = MAX_RESEEDS if choice.mode == "generic" else 1
    for attempt in range(attempts):
        rng = random.Random(choice.seed + attempt)
        d = _section_matrix(mf, choice, r, rng)
        gens = minor_list(d, k)
        ideal = _normalize_mod_f(gens, mf.f)
        if not ideal.is_zero():
            return ideal
    raise DegenerateChoice(
        f"degenerate section choice: the chosen relations have rank < {k} modulo f"
    )


def section_matrix(mf: MatrixFactorization, choice: NormChoice) -> PolyMatrix:
    """The matrix whose maximal minors :func:`norm_ideal` uses (first successful seed)."""
    r = rank_of_coker(mf)
    k = mf.n - r
    attempts = MAX_RESEEDS if choice.mode == "generic" else 1
    for attempt in range(attempts):
        d = _section_matrix(mf, choice, r, random.Random(choice.seed + attempt))
        if any(reduce_mod(m, mf.f) for m in minor_list(d, k)):
            return d
    raise DegenerateChoice(f"degenerate section choice: rank < {k} modulo f")


def same_norm_class(a: Ideal, b: Ideal, f: Polynomial) -> Optional[Tuple[Polynomial, Polynomial]]:
    """A witness ``(p, q)`` with ``p*b = q*a`` modulo ``f``, or ``None`` if none was found.

    Such a pair shows ``b = (q/p) a`` as fractional ideals of ``S/(f)``, so
    the two ideals have isomorphic blow-ups.  Candidates ``q`` are taken from
    ``(p*b + (f)) : (a + (f))`` with ``p`` the last generator of ``a``.
    """
    gens_a = [g for g in a.generators if reduce_mod(g, f)]
    if not gens_a or not any(reduce_mod(g, f) for g in b.generators):
        return None
    p = gens_a[-1]
    target = Ideal(f.ring, [p * g for g in b.generators] + [f])
    quotient = ideal_quotient(target, a + [f])
    candidates = sorted(
        (q for q in quotient.groebner_basis() if reduce_mod(q, f)),
        key=lambda q: (q.total_degree(), len(q.terms)),
    )
    for q in candidates:
        if Ideal(f.ring, [q * g for g in a.generators] + [f]).equals(target):
            return p, q
    return None


@dataclass
class Presentation:
    """``coker(phi mod f)``: ``generators`` basis vectors modulo the listed relations."""

    generators: int
    relations: List[List[Polynomial]]

    def describe(self, names: Sequence[str] = None) -> List[str]:
        names = names or [f"e{i + 1}" for i in range(self.generators)]
        out = []
        for rel in self.relations:
            parts = [f"({c})*{e}" for c, e in zip(rel, names) if c]
            out.append(" + ".join(parts) if parts else "0")
        return out

    def to_dict(self):
        return {
            "generators": self.generators,
            "relations": [[str(c) for c in rel] for rel in self.relations],
        }


def presentation(mf: MatrixFactorization) -> Presentation:
    rels = [[reduce_mod(c, mf.f) for c in mf.phi.column(j)] for j in range(mf.n)]
    return Presentation(mf.n, rels)


# -- built-in factorizations ------------------------------------------------

def an_mf(n: int, k: int) -> MatrixFactorization:
    """``phi_k, psi_k`` for the A_n equation ``xy + z^(n+1)``, ``0 <= k <= n``."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if not 0 <= k <= n:
        raise ValueError(f"k must satisfy 0 <= k <= {n}, got {k}")
    R = XYZ
    x, y, z = R.gens()
    f = x * y + z ** (n + 1)
    phi = PolyMatrix.from_rows(R, [[y, -(z ** (n + 1 - k))], [z ** k, x]])
    psi = PolyMatrix.from_rows(R, [[x, z ** (n + 1 - k)], [-(z ** k), y]])
    return MatrixFactorization(f, phi, psi)


def fundamental_mf() -> MatrixFactorization:
    """The rank-2 fundamental module of ``x^3 + y^3 + z^3`` as a 4x4 factorization."""
    return MatrixFactorization.from_strings(
        XYZ,
        "x^3 + y^3 + z^3",
        [
            ["x^2", "-y", "-z", "0"],
            ["y^2", "x", "0", "-z"],
            ["z^2", "0", "x", "y"],
            ["0", "z^2", "-y^2", "x^2"],
        ],
        [
            ["x", "y", "z", "0"],
            ["-y^2", "x^2", "0", "z"],
            ["-z^2", "0", "x^2", "-y"],
            ["0", "-z^2", "y^2", "x"],
        ],
    )


def cubic_line_mf() -> MatrixFactorization:
    """Rank-one module of the line ``x + y = z = 0`` on ``x^3 + y^3 + z^3``.

    Its blow-up has a non-isolated singular locus.
    """
    return MatrixFactorization.from_strings(
        XYZ,
        "x^3 + y^3 + z^3",
        [["x + y", "-z^2"], ["z", "x^2 - x*y + y^2"]],
        [["x^2 - x*y + y^2", "z^2"], ["-z", "x + y"]],
    )


def trivial_mf(f: Polynomial, n: int = 1) -> MatrixFactorization:
    """``(Id, f*Id)``, whose cokernel is zero."""
    ident = PolyMatrix.identity(f.ring, n)
    return MatrixFactorization(f, ident, ident.scaled(f))


def permuted(mf: MatrixFactorization, rows: Sequence[int], cols: Sequence[int]) -> MatrixFactorization:
    """Permute rows/columns of ``phi`` and apply the inverse permutation to ``psi``.

    ``phi' = P phi Q`` and ``psi' = Q^-1 psi P^-1`` keep both products equal to ``f*Id``.
    """
    n = mf.n
    if sorted(rows) != list(range(n)) or sorted(cols) != list(range(n)):
        raise ValueError("rows and cols must be permutations of range(n)")
    phi = mf.phi.submatrix(rows, cols)
    psi = mf.psi.submatrix(cols, rows)
    return MatrixFactorization(mf.f, phi, psi)


BUILTINS = {
    "an": an_mf,
    "fundamental": fundamental_mf,
    "cubic_line": cubic_line_mf,
}
