"""Affine charts of the blow-up of a hypersurface at an ideal.

For ``I = (g_0, ..., g_m)`` and the hypersurface ``V(f)``, chart ``j`` is the
spectrum of ``Q[x, t_i (i != j)] / ((f) + (g_i - t_i g_j)) : g_j^inf``.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import BlowupError, RingMismatchError
from .groebner import DEGREVLEX, Ideal, eliminate, krull_dim, normal_form, saturate
from .poly import Polynomial, Ring, substitute

log = logging.getLogger(__name__)


@dataclass
class SimplifiedChart:
    """An isomorphic presentation with some variables solved for and removed.

    ``eliminated`` lists ``(var, value)`` in the order the substitutions were
    made; each value lives in the ring current at that step.
    """

    ring: Ring
    ideal: Ideal
    eliminated: List[Tuple[str, Polynomial]] = field(default_factory=list)

    def pull(self, p: Polynomial) -> Polynomial:
        """Express a function given in the unsimplified ring in the simplified coordinates."""
        for var, value in self.eliminated:
            if var in p.ring.vars:
                p = substitute(p, {var: value}, value.ring)
        return p.to_ring(self.ring)

    @property
    def generators(self) -> Tuple[Polynomial, ...]:
        return self.ideal.groebner_basis()

    def is_hypersurface_form(self) -> bool:
        return len(self.generators) <= 1


@dataclass
class BlowupChart:
    index: int
    f: Polynomial
    generators: Tuple[Polynomial, ...]
    base_ring: Ring
    ambient_ring: Ring
    chart_vars: Dict[int, str]
    chart_ideal: Ideal
    simplified: Optional[SimplifiedChart] = None
    dimension: Optional[int] = None
    fiber_relations: Tuple[Polynomial, ...] = ()

    @property
    def center_generator(self) -> Polynomial:
        return self.generators[self.index]

    @property
    def center_in_chart(self) -> Polynomial:
        return self.center_generator.to_ring(self.ambient_ring)

    @property
    def exceptional_ideal(self) -> Ideal:
        return self.chart_ideal + [self.center_in_chart]

    @property
    def expected_dimension(self) -> int:
        return self.base_ring.nvars - 1

    def ratio(self, i: int) -> Polynomial:
        """The function ``g_i / g_j`` on this chart (1 for ``i == j``)."""
        if i == self.index:
            return self.ambient_ring.one()
        return self.ambient_ring.var(self.chart_vars[i])

    def working_ideal(self) -> Ideal:
        return self.simplified.ideal if self.simplified is not None else self.chart_ideal

    def pull(self, p: Polynomial) -> Polynomial:
        """Express ``p`` (in the ambient ring) in the working coordinates."""
        if p.ring != self.ambient_ring:
            p = p.to_ring(self.ambient_ring)
        if self.simplified is None:
            return p
        return self.simplified.pull(p)


def chart_variable_names(ring: Ring, count: int, stem: str = "t") -> List[str]:
    names = []
    taken = set(ring.vars)
    for i in range(count):
        name = f"{stem}{i}"
        while name in taken:
            name = name + "_"
        taken.add(name)
        names.append(name)
    return names


def _build_chart(f: Polynomial, gens: Sequence[Polynomial], j: int, names: Sequence[str],
                 check_fiber: bool, simplify: bool) -> BlowupChart:
    base = f.ring
    chart_vars = {i: names[i] for i in range(len(gens)) if i != j}
    ambient = base.extend(chart_vars[i] for i in sorted(chart_vars))
    gj = gens[j].to_ring(ambient)
    eqs = [f.to_ring(ambient)]
    for i in sorted(chart_vars):
        eqs.append(gens[i].to_ring(ambient) - ambient.var(chart_vars[i]) * gj)
    ideal = saturate(Ideal(ambient, eqs), gj)
    chart = BlowupChart(
        index=j,
        f=f,
        generators=tuple(gens),
        base_ring=base,
        ambient_ring=ambient,
        chart_vars=chart_vars,
        chart_ideal=ideal,
    )
    chart.dimension = krull_dim(ideal)
    if chart.dimension != chart.expected_dimension:
        log.warning(
            "chart %d has dimension %s, expected %s", j, chart.dimension, chart.expected_dimension
        )
    if check_fiber and chart_vars:
        fiber = eliminate(ideal, base.vars)
        chart.fiber_relations = tuple(fiber.groebner_basis())
    if simplify:
        chart = simplify_chart(chart)
    return chart


def blowup_charts(f: Polynomial, ideal: Ideal, workers: int = 0, check_fiber: bool = True,
                  simplify: bool = True) -> List[BlowupChart]:
    """One chart per generator of ``ideal`` that is nonzero modulo ``f``, in generator order.

    ``workers > 0`` computes charts on a thread pool of that size.
    """
    if f.is_zero():
        raise BlowupError("the hypersurface equation is zero")
    if ideal.ring != f.ring:
        raise RingMismatchError("ideal and hypersurface live in different rings")
    gens = [g for g in ideal.generators if normal_form(g, [f], DEGREVLEX)]
    if not gens:
        raise BlowupError("all generators of the center vanish modulo f")
    names = chart_variable_names(f.ring, len(gens))
    if workers and workers > 0 and len(gens) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_build_chart, f, gens, j, names, check_fiber, simplify) for j in range(len(gens))]
            return [fut.result() for fut in futures]
    return [_build_chart(f, gens, j, names, check_fiber, simplify) for j in range(len(gens))]


def _solvable_variable(g: Polynomial) -> Optional[Tuple[str, Polynomial]]:
    """Find ``v`` with ``g = c*v + h``, ``c`` a nonzero constant and ``v`` absent from ``h``."""
    ring = g.ring
    for i, v in enumerate(ring.vars):
        unit = tuple(1 if k == i else 0 for k in range(ring.nvars))
        c = g.terms.get(unit)
        if not c:
            continue
        if any(m[i] for m in g.terms if m != unit):
            continue
        rest = g - ring.const(c) * ring.var(v)
        return v, -rest / c
    return None


def simplify_ideal(ideal: Ideal) -> SimplifiedChart:
    """Repeatedly solve a generator ``v - h`` for ``v`` and substitute, to a fixed point."""
    ring = ideal.ring
    current = ideal
    eliminated: List[Tuple[str, Polynomial]] = []
    while True:
        gb = current.groebner_basis()
        found = None
        for g in gb:
            hit = _solvable_variable(g)
            if hit is not None:
                found = (g, hit)
                break
        # a ring keeps at least one variable
        if found is None or ring.nvars == 1:
            break
        g, (v, value) = found
        small = ring.drop([v])
        value_small = value.to_ring(small)
        new_gens = []
        for h in gb:
            if h is g:
                continue
            s = substitute(h, {v: value_small}, small)
            if s:
                new_gens.append(s)
        eliminated.append((v, value_small))
        ring = small
        current = Ideal(small, new_gens)
    return SimplifiedChart(ring=ring, ideal=current, eliminated=eliminated)


def simplify_chart(chart: BlowupChart) -> BlowupChart:
    """Copy of ``chart`` with the ``simplified`` presentation filled in."""
    return replace(chart, simplified=simplify_ideal(chart.chart_ideal))
