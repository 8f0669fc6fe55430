"""Jacobian-criterion analysis of blow-up charts and the aggregate verdict.

Normality is only decided for charts presented as complete intersections
(hypersurfaces included): those are Cohen-Macaulay, so Serre's criterion
reduces to the codimension of the singular locus.
"""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .blowup import BlowupChart
from .errors import DomainError, NotZeroDimensional
from .groebner import (
    DEGREVLEX,
    Ideal,
    PolyMatrix,
    det,
    eliminate,
    intersect,
    krull_dim,
    minimal_generators,
    minor_list,
    normal_form,
    saturate,
    vector_space_dim,
)
from .poly import Polynomial, Ring, exact_divide

log = logging.getLogger(__name__)

SMOOTH = "smooth"
ISOLATED = "isolated_singular"
NON_ISOLATED = "non_isolated_singular"
INCONCLUSIVE = "inconclusive"

NORMAL = "normal"
NOT_NORMAL = "not_normal"
UNKNOWN = "unknown"

RESOLUTION = "resolution"
NORMAL_WITH_SINGULARITIES = "normal_with_singularities"

NOT_SPECIAL_NOTE = "module is NOT special"
CONSISTENT_NOTE = "consistent with special (not a proof)"

MINOR_BATCH = 24


def jacobian_matrix(ideal: Ideal) -> PolyMatrix:
    """Rows are the generators, columns the ring variables."""
    ring = ideal.ring
    rows = [[g.diff(v) for v in ring.vars] for g in ideal.generators]
    return PolyMatrix(ring, len(rows), ring.nvars, [e for r in rows for e in r])


def _jacobian_minors(gens: Sequence[Polynomial], ring: Ring, c: int) -> List[Polynomial]:
    jac = jacobian_matrix(Ideal(ring, gens))
    out = []
    for rows in itertools.combinations(range(jac.rows), c):
        for cols in itertools.combinations(range(jac.cols), c):
            d = det(jac.submatrix(rows, cols))
            if d:
                out.append(d)
    return out


def singular_locus(ideal: Ideal, stop_if_empty: bool = False,
                   gens: Sequence[Polynomial] = None) -> Ideal:
    """``I + (c x c minors of the Jacobian)`` with ``c`` the codimension of ``V(I)``.

    Cuts out the singular locus when ``V(I)`` is equidimensional.  The
    Jacobian is taken on ``gens`` (default: the reduced basis).  With
    ``stop_if_empty`` the minors are added lowest degree first and the unit
    ideal is returned as soon as it is reached; any other outcome still uses
    every minor.
    """
    if ideal.is_unit():
        raise DomainError("the unit ideal defines the empty set")
    ring = ideal.ring
    c = ring.nvars - krull_dim(ideal)
    if c == 0:
        # affine space is smooth
        return Ideal(ring, [ring.one()])
    gens = list(ideal.groebner_basis() if gens is None else gens)
    mins = _jacobian_minors(gens, ring, c)
    if not stop_if_empty:
        return Ideal(ring, gens) + mins
    mins.sort(key=lambda p: (p.total_degree(), len(p.terms)))
    for end in range(MINOR_BATCH, len(mins) + MINOR_BATCH, MINOR_BATCH):
        partial = Ideal(ring, gens) + mins[:end]
        if partial.is_unit():
            return partial
    return Ideal(ring, gens) + mins


def is_smooth(ideal: Ideal) -> bool:
    return singular_locus(ideal, stop_if_empty=True).is_unit()


def sing_dimension(ideal: Ideal) -> int:
    return krull_dim(singular_locus(ideal, stop_if_empty=True))


def tjurina_ideal(g: Polynomial) -> Ideal:
    return Ideal(g.ring, [g] + [g.diff(v) for v in g.ring.vars])


def tjurina_total(g: Polynomial) -> int:
    """``dim_Q Q[x]/(g, dg/dx_1, ...)``, the sum of Tjurina numbers over all singular points."""
    if g.is_zero():
        raise NotZeroDimensional("the zero polynomial has no isolated singularities")
    t = tjurina_ideal(g)
    if t.is_unit():
        return 0
    if krull_dim(t) > 0:
        raise NotZeroDimensional(f"singular locus of {g} is not zero-dimensional")
    return vector_space_dim(t)


def _t1_encoding(gens: Sequence[Polynomial]) -> Tuple[Ideal, List[str]]:
    # Q[x]^k / (Jacobian columns + I*Q[x]^k) as the e-degree-one part of an
    # ideal in Q[x, e_1..e_k]
    ring = gens[0].ring
    k = len(gens)
    enames = []
    r = ring
    for i in range(k):
        name = r.fresh(f"e{i}")
        enames.append(name)
        r = r.extend([name])
    big = r
    es = [big.var(n) for n in enames]
    lifted = [g.to_ring(big) for g in gens]
    out = []
    for v in ring.vars:
        out.append(sum((g.diff(v) * e for g, e in zip(lifted, es)), big.zero()))
    out += [g * e for g in lifted for e in es]
    out += [a * b for a, b in itertools.combinations_with_replacement(es, 2)]
    return Ideal(big, out), enames


def _degree_one_dim(enc: Ideal, enames: Sequence[str]) -> int:
    ring = enc.ring
    gb = enc.groebner_basis()
    if not gb:
        raise NotZeroDimensional("module is not of finite length")
    key = DEGREVLEX.key(ring)
    eidx = [ring.index(n) for n in enames]
    xidx = [i for i in range(ring.nvars) if i not in eidx]
    lms = [max(g.terms, key=key) for g in gb]
    if any(not any(m) for m in lms):
        return 0
    total = 0
    for i in eidx:
        local = []
        for m in lms:
            edeg = sum(m[j] for j in eidx)
            if edeg == 0 or (edeg == 1 and m[i] == 1):
                local.append(tuple(m[j] for j in xidx))
        if any(not any(m) for m in local):
            # e_i itself is a leading monomial: the slice is zero
            continue
        bounds = []
        for pos in range(len(xidx)):
            pure = [m[pos] for m in local if m[pos] and all(e == 0 for q, e in enumerate(m) if q != pos)]
            if not pure:
                raise NotZeroDimensional("module is not of finite length")
            bounds.append(min(pure))
        for mono in itertools.product(*(range(b) for b in bounds)):
            if not any(all(a <= b for a, b in zip(lm, mono)) for lm in local):
                total += 1
    return total


def tjurina_complete_intersection(gens: Sequence[Polynomial]) -> int:
    """Total ``dim T^1`` of the complete intersection ``V(gens)`` (``len(gens)`` = codimension).

    For a single equation this equals :func:`tjurina_total`.
    """
    enc, enames = _t1_encoding(gens)
    return _degree_one_dim(enc, enames)


def _t1_away_from(gens: Sequence[Polynomial], hs: Sequence[Polynomial]) -> int:
    # dim T^1 supported off V(hs): saturate the encoded module by each h and intersect
    enc, enames = _t1_encoding(gens)
    big = enc.ring
    parts = [saturate(enc, h.to_ring(big)) for h in hs]
    acc = parts[0]
    for p in parts[1:]:
        acc = intersect(acc, p)
    return _degree_one_dim(acc, enames)


def _squarefree(p: Polynomial) -> Polynomial:
    if p.is_constant():
        return p
    (v,) = p.support_vars()
    gcd = Ideal(p.ring, [p, p.diff(v)]).groebner_basis()[0]
    return exact_divide(p, gcd).monic()


def radical_zero_dim(ideal: Ideal) -> Ideal:
    """Radical of a zero-dimensional ideal: add the squarefree part of each eliminant."""
    if ideal.is_unit():
        return ideal
    if krull_dim(ideal) != 0:
        raise NotZeroDimensional("radical_zero_dim needs a zero-dimensional ideal")
    ring = ideal.ring
    extra = []
    for v in ring.vars:
        others = [w for w in ring.vars if w != v]
        if others:
            (p,) = eliminate(ideal, others).groebner_basis()
        else:
            (p,) = ideal.groebner_basis()
        extra.append(_squarefree(p).to_ring(ring))
    return ideal + extra


def count_points(ideal: Ideal) -> int:
    """Number of distinct complex points of a zero-dimensional ideal."""
    if ideal.is_unit():
        return 0
    return vector_space_dim(radical_zero_dim(ideal))


def hessian(g: Polynomial) -> PolyMatrix:
    vs = g.ring.vars
    return PolyMatrix(g.ring, len(vs), len(vs), [g.diff(a).diff(b) for a in vs for b in vs])


def all_points_corank_le_one(equations: Sequence[Polynomial], locus: Ideal) -> bool:
    """True when every point of ``V(locus)`` is a corank <= 1 point of ``V(equations)``.

    ``equations`` is a complete intersection of codimension ``c``.  At a point
    where the Jacobian ``J`` has rank ``c - 1``, take ``lam`` in its left
    kernel and ``H = sum lam_i Hess(g_i)``; the bordered matrix
    ``[[H, J^T], [J, 0]]`` then has rank ``rank(H on ker J) + 2(c - 1)``.  The
    surface is locally a hypersurface in a smooth 3-fold whose quadratic part
    has corank <= 1 exactly when that rank is at least ``2c``.  Suitable
    ``lam`` are the signed cofactors of ``c - 1`` columns of ``J``.
    """
    if locus.is_unit():
        return True
    ring = locus.ring
    eqs = [g.to_ring(ring) for g in equations]
    c, n = len(eqs), ring.nvars
    basis = locus.groebner_basis()

    def red(p: Polynomial) -> Polynomial:
        return normal_form(p, basis, DEGREVLEX)

    jac = [[red(g.diff(v)) for v in ring.vars] for g in eqs]
    hess = [[[red(g.diff(a).diff(b)) for b in ring.vars] for a in ring.vars] for g in eqs]
    acc = locus
    for cols in itertools.combinations(range(n), c - 1):
        lam = []
        for i in range(c):
            rows = [r for r in range(c) if r != i]
            sub = PolyMatrix(ring, c - 1, c - 1, [jac[r][k] for r in rows for k in cols])
            lam.append(red(det(sub).scale((-1) ** i)) if c > 1 else ring.one())
        if all(x.is_zero() for x in lam):
            continue
        size = n + c
        entries = []
        for a in range(size):
            for b in range(size):
                if a < n and b < n:
                    e = sum((l * h[a][b] for l, h in zip(lam, hess)), ring.zero())
                elif a < n:
                    e = jac[b - n][a]
                elif b < n:
                    e = jac[a - n][b]
                else:
                    e = ring.zero()
                entries.append(red(e))
        bordered = PolyMatrix(ring, size, size, entries)
        mins = [red(m) for m in minor_list(bordered, 2 * c)]
        acc = acc + [m for m in mins if m]
        if acc.is_unit():
            return True
    return False


def is_a1_equation(f: Polynomial) -> bool:
    """``f`` has an ordinary double point at the origin (nondegenerate quadratic part)."""
    if f.constant_term() != 0 or f.order() != 2:
        return False
    return not det(hessian(f.homogeneous_part(2))).is_zero()


@dataclass
class SingularityReport:
    chart_index: int
    status: str
    sing_locus_dim: int
    codim_of_sing_in_variety: int
    normality_verdict: str
    hypersurface_form: bool
    dimension: int
    complete_intersection: Optional[bool] = None
    tjurina_total: Optional[int] = None
    points: Optional[int] = None
    point_types: List[str] = field(default_factory=list)
    meets_exceptional: Optional[bool] = None
    sing_locus: Optional[Ideal] = field(default=None, repr=False)
    equations: Tuple[Polynomial, ...] = field(default=(), repr=False)
    notes: List[str] = field(default_factory=list)

    def to_dict(self):
        d = {
            "index": self.chart_index,
            "status": self.status,
            "sing_locus_dim": self.sing_locus_dim,
            "codim_of_sing_in_variety": self.codim_of_sing_in_variety,
            "normality_verdict": self.normality_verdict,
            "hypersurface_form": self.hypersurface_form,
            "complete_intersection": self.complete_intersection,
            "dimension": self.dimension,
        }
        if self.tjurina_total is not None:
            d["tjurina_total"] = self.tjurina_total
        if self.points is not None:
            d["singular_points"] = self.points
            d["point_types"] = list(self.point_types)
        if self.meets_exceptional is not None:
            d["sing_meets_exceptional"] = self.meets_exceptional
        if self.notes:
            d["notes"] = list(self.notes)
        return d


def analyze_ideal(ideal: Ideal, expected_dim: int = None, index: int = 0,
                  center: Polynomial = None) -> SingularityReport:
    """Analyze the variety ``V(ideal)``; ``center`` marks the exceptional divisor if given."""
    notes: List[str] = []
    dim = krull_dim(ideal)
    gb = ideal.groebner_basis()
    hyper = len(gb) <= 1
    expected = dim if expected_dim is None else expected_dim
    if dim != expected or dim < 0:
        notes.append(f"dimension {dim} differs from expected {expected}; equidimensionality unverified")
        return SingularityReport(
            chart_index=index, status=INCONCLUSIVE, sing_locus_dim=-1,
            codim_of_sing_in_variety=-1, normality_verdict=UNKNOWN,
            hypersurface_form=hyper, dimension=dim, notes=notes,
        )
    sing = singular_locus(ideal, stop_if_empty=True)
    sd = krull_dim(sing)
    # smooth implies normal, so the costly irredundant presentation is only
    # needed at singular charts
    if hyper:
        equations, ci = tuple(gb), True
    elif sd >= 0:
        equations = minimal_generators(ideal)
        ci = len(equations) == ideal.ring.nvars - dim
    else:
        equations, ci = tuple(gb), None
    if sd == -1:
        status = SMOOTH
    elif sd == 0:
        status = ISOLATED
    else:
        status = NON_ISOLATED
    if sd == -1:
        verdict = NORMAL
    elif ci:
        verdict = NORMAL if sd <= dim - 2 else NOT_NORMAL
    else:
        verdict = UNKNOWN
        notes.append("not a complete intersection presentation; normality not decided")
    report = SingularityReport(
        chart_index=index, status=status, sing_locus_dim=sd,
        codim_of_sing_in_variety=dim - sd, normality_verdict=verdict,
        hypersurface_form=hyper, complete_intersection=ci, dimension=dim,
        sing_locus=sing, equations=equations, notes=notes,
    )
    if sd == -1:
        report.points = 0
        report.tjurina_total = 0
    elif sd == 0:
        report.points = count_points(sing)
        if hyper:
            report.tjurina_total = tjurina_total(gb[0])
        elif ci:
            report.tjurina_total = tjurina_complete_intersection(equations)
        report.point_types = _types(report)
    if center is not None and sd >= 0:
        report.meets_exceptional = not (sing + [center]).is_unit()
    return report


def _label(points: int, tau: Optional[int], equations, locus: Ideal) -> List[str]:
    if points == 0:
        return []
    if tau is not None and tau == points:
        # every singular point contributes at least one, so all are ordinary double points
        return ["A1"] * points
    if points == 1 and tau is not None and equations and all_points_corank_le_one(equations, locus):
        return [f"A{tau}"]
    if points == 1 and tau is not None:
        return [f"tau={tau}"]
    return ["?"] * points


def _types(report: SingularityReport) -> List[str]:
    eqs = report.equations if report.complete_intersection else ()
    return _label(report.points, report.tjurina_total, eqs, report.sing_locus)


def analyze_chart(chart: BlowupChart) -> SingularityReport:
    """Singularity report of one chart, computed on its simplified presentation when present."""
    ideal = chart.working_ideal()
    center = chart.pull(chart.center_in_chart)
    return analyze_ideal(ideal, chart.expected_dimension, chart.index, center)


def analyze_charts(charts: Sequence[BlowupChart], workers: int = 0) -> List[SingularityReport]:
    if workers and workers > 0 and len(charts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(analyze_chart, charts))
    return [analyze_chart(c) for c in charts]


@dataclass
class PipelineVerdict:
    reports: List[SingularityReport]
    aggregate: str
    speciality_note: str = ""
    singular_points: Optional[int] = None
    tjurina_total: Optional[int] = None
    point_types: List[str] = field(default_factory=list)
    overlap: str = ""

    def signature(self):
        """Chart-independent summary used to compare different presentations."""
        return (self.aggregate, self.singular_points, self.tjurina_total, tuple(self.point_types))

    def to_dict(self):
        d = {
            "aggregate": self.aggregate,
            "speciality_note": self.speciality_note,
            "overlap": self.overlap,
        }
        if self.singular_points is not None:
            d["singular_points"] = self.singular_points
            d["tjurina_total"] = self.tjurina_total
            d["point_types"] = list(self.point_types)
        return d


def _aggregate(reports: Sequence[SingularityReport]) -> str:
    if reports and all(r.status == SMOOTH for r in reports):
        return RESOLUTION
    if any(r.normality_verdict == NOT_NORMAL for r in reports):
        return NOT_NORMAL
    if reports and all(r.normality_verdict == NORMAL for r in reports):
        return NORMAL_WITH_SINGULARITIES
    return INCONCLUSIVE


def _ratios(chart: BlowupChart, others: Sequence[int]) -> List[Polynomial]:
    return [chart.pull(chart.ratio(i)) for i in others]


def _meets_chart(chart: BlowupChart, report: SingularityReport, other_index: int) -> bool:
    """Certificate: some singular point of ``chart`` lies in chart ``other_index``."""
    (ratio,) = _ratios(chart, [other_index])
    ring = ratio.ring
    w = ring.fresh("w")
    big = ring.extend([w])
    test = Ideal(big, [g.to_ring(big) for g in report.sing_locus.generators])
    test = test + [big.one() - big.var(w) * ratio.to_ring(big)]
    return not test.is_unit()


def _new_points(chart: BlowupChart, report: SingularityReport, earlier: Sequence[int]):
    """(points, Tjurina, types) of the singular points of ``chart`` outside the ``earlier`` charts."""
    if not earlier:
        return report.points, report.tjurina_total, list(report.point_types)
    ratios = _ratios(chart, earlier)
    points = count_points(report.sing_locus + ratios)
    if points == report.points:
        return points, report.tjurina_total, list(report.point_types)
    tau = None
    if report.tjurina_total is not None and points:
        tau = report.tjurina_total - _t1_away_from(report.equations, ratios)
    elif not points:
        tau = 0
    eqs = report.equations if report.complete_intersection else ()
    types = _label(points, tau, eqs, report.sing_locus + ratios)
    return points, tau, types


def pipeline_verdict(reports: Sequence[SingularityReport], f: Polynomial = None,
                     charts: Sequence[BlowupChart] = None) -> PipelineVerdict:
    """Aggregate chart reports; ``charts`` enables deduplication of shared singular points."""
    reports = list(reports)
    aggregate = _aggregate(reports)
    note = ""
    if aggregate == RESOLUTION and (f is None or not is_a1_equation(f)):
        note = NOT_SPECIAL_NOTE
    elif aggregate == NORMAL_WITH_SINGULARITIES:
        note = CONSISTENT_NOTE
    verdict = PipelineVerdict(reports=reports, aggregate=aggregate, speciality_note=note)

    singular = [r for r in reports if r.status != SMOOTH]
    if not singular:
        verdict.singular_points, verdict.tjurina_total = 0, 0
        verdict.overlap = "no singular points"
        return verdict
    if not all(r.status == ISOLATED and r.points is not None for r in singular):
        verdict.overlap = "overlap not resolved"
        return verdict
    shared = False
    if len(singular) > 1 and charts is not None:
        by_index = {c.index: c for c in charts}
        shared = any(
            _meets_chart(by_index[r.chart_index], r, o.chart_index)
            for r in singular for o in singular if o is not r
        )
    if not shared:
        verdict.singular_points = sum(r.points for r in singular)
        taus = [r.tjurina_total for r in singular]
        verdict.tjurina_total = None if None in taus else sum(taus)
        verdict.point_types = sorted(t for r in singular for t in r.point_types)
        verdict.overlap = "no shared singular points" if len(singular) > 1 else "single singular chart"
        return verdict
    # hypersurface charts first so shared points get typed there
    ordered = sorted(singular, key=lambda r: (not r.hypersurface_form, r.complete_intersection is not True, r.chart_index))
    total_points, total_tau, types = 0, 0, []
    for pos, r in enumerate(ordered):
        earlier = [o.chart_index for o in ordered[:pos]]
        pts, tau, tps = _new_points(by_index[r.chart_index], r, earlier)
        total_points += pts
        total_tau = None if (tau is None or total_tau is None) else total_tau + tau
        types.extend(tps)
    verdict.singular_points = total_points
    verdict.tjurina_total = total_tau
    verdict.point_types = sorted(types)
    verdict.overlap = "shared singular points deduplicated"
    return verdict
