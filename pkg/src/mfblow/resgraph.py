"""Resolution dual graphs: intersection form, canonical cycle and contraction.

Vertices are exceptional curves ``E_i`` with self-intersection and genus;
an edge of multiplicity ``m`` between ``E_i`` and ``E_j`` means ``E_i.E_j = m``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import GraphError, NonContractible, NothingKept

Matrix = List[List[int]]


@dataclass(frozen=True)
class Vertex:
    name: str
    self_int: int
    genus: int = 0

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise GraphError(f"vertex name must be a non-empty string, got {self.name!r}")
        if not isinstance(self.self_int, int) or self.self_int > -1:
            raise GraphError(f"self-intersection of {self.name} must be an integer <= -1")
        if not isinstance(self.genus, int) or self.genus < 0:
            raise GraphError(f"genus of {self.name} must be a non-negative integer")


@dataclass(frozen=True)
class DualGraph:
    """Weighted graph of exceptional curves.  ``edges`` holds ``(a, b, multiplicity)``.

    Parallel edges given separately are merged by adding multiplicities.
    """

    vertices: Tuple[Vertex, ...]
    edges: Tuple[Tuple[str, str, int], ...] = ()
    check_connected: bool = field(default=True, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        if not self.vertices:
            raise GraphError("a dual graph needs at least one vertex")
        names = [v.name for v in self.vertices]
        if len(set(names)) != len(names):
            raise GraphError("vertex names must be unique")
        known = set(names)
        merged: Counter = Counter()
        for e in self.edges:
            if len(e) != 3:
                raise GraphError(f"edge {e!r} must be [a, b, multiplicity]")
            a, b, m = e
            if a not in known or b not in known:
                raise GraphError(f"edge {a}-{b} mentions an unknown vertex")
            if a == b:
                raise GraphError(f"loop at {a} is not allowed")
            if not isinstance(m, int) or m < 1:
                raise GraphError(f"edge {a}-{b} needs a positive integer multiplicity")
            key = (a, b) if names.index(a) < names.index(b) else (b, a)
            merged[key] += m
        order = {n: i for i, n in enumerate(names)}
        edges = sorted(((a, b, m) for (a, b), m in merged.items()), key=lambda e: (order[e[0]], order[e[1]]))
        object.__setattr__(self, "edges", tuple(edges))
        if self.check_connected and len(self.components(range(len(self.vertices)))) != 1:
            raise GraphError("dual graph must be connected")

    @property
    def names(self) -> List[str]:
        return [v.name for v in self.vertices]

    def __len__(self):
        return len(self.vertices)

    def index(self, name: str) -> int:
        for i, v in enumerate(self.vertices):
            if v.name == name:
                return i
        raise GraphError(f"unknown vertex {name!r}")

    def neighbours(self, i: int) -> Dict[int, int]:
        name = self.vertices[i].name
        out = {}
        for a, b, m in self.edges:
            if a == name:
                out[self.index(b)] = m
            elif b == name:
                out[self.index(a)] = m
        return out

    def components(self, subset) -> List[List[int]]:
        """Connected components of the induced subgraph on ``subset``, each sorted, in order of first vertex."""
        subset = sorted(set(subset))
        inside = set(subset)
        seen = set()
        comps = []
        for start in subset:
            if start in seen:
                continue
            stack, comp = [start], []
            seen.add(start)
            while stack:
                i = stack.pop()
                comp.append(i)
                for j in self.neighbours(i):
                    if j in inside and j not in seen:
                        seen.add(j)
                        stack.append(j)
            comps.append(sorted(comp))
        return comps

    def induced(self, subset: Sequence[int]) -> "DualGraph":
        subset = sorted(subset)
        names = {self.vertices[i].name for i in subset}
        edges = [e for e in self.edges if e[0] in names and e[1] in names]
        return DualGraph(tuple(self.vertices[i] for i in subset), tuple(edges), check_connected=False)

    def to_dict(self):
        return {
            "vertices": [{"name": v.name, "self_int": v.self_int, "genus": v.genus} for v in self.vertices],
            "edges": [[a, b, m] for a, b, m in self.edges],
        }

    @classmethod
    def from_dict(cls, data) -> "DualGraph":
        if not isinstance(data, Mapping) or "vertices" not in data:
            raise GraphError("graph must be an object with a 'vertices' list")
        verts = []
        for v in data["vertices"]:
            try:
                verts.append(Vertex(v["name"], v["self_int"], v.get("genus", 0)))
            except (KeyError, TypeError, AttributeError) as exc:
                raise GraphError(f"bad vertex entry {v!r}") from exc
        edges = []
        for e in data.get("edges", []):
            if not isinstance(e, (list, tuple)) or len(e) not in (2, 3):
                raise GraphError(f"bad edge entry {e!r}")
            # multiplicity defaults to one
            edges.append(tuple(e) if len(e) == 3 else (e[0], e[1], 1))
        return cls(tuple(verts), tuple(edges))


def intersection_matrix(g: DualGraph) -> Matrix:
    n = len(g)
    m = [[0] * n for _ in range(n)]
    for i, v in enumerate(g.vertices):
        m[i][i] = v.self_int
    for a, b, mult in g.edges:
        i, j = g.index(a), g.index(b)
        m[i][j] = m[j][i] = mult
    return m


def _det(m: Sequence[Sequence]) -> Fraction:
    # Gaussian elimination over Q
    a = [[Fraction(x) for x in row] for row in m]
    n = len(a)
    sign = 1
    out = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            sign = -sign
        out *= a[col][col]
        for r in range(col + 1, n):
            factor = a[r][col] / a[col][col]
            if factor:
                for c in range(col, n):
                    a[r][c] -= factor * a[col][c]
    return sign * out


def _check_symmetric(m: Sequence[Sequence]) -> None:
    n = len(m)
    if any(len(row) != n for row in m):
        raise GraphError("matrix must be square")
    for i in range(n):
        for j in range(i):
            if m[i][j] != m[j][i]:
                raise GraphError(f"matrix is not symmetric at ({i}, {j})")


def leading_minors(m: Sequence[Sequence]) -> List[Fraction]:
    return [_det([row[:k] for row in m[:k]]) for k in range(1, len(m) + 1)]


def is_negative_definite(m: Sequence[Sequence]) -> bool:
    """Sylvester's criterion: ``(-1)^k * minor_k > 0`` for every leading principal minor."""
    _check_symmetric(m)
    if not m:
        return True
    return all((-1) ** k * d > 0 for k, d in enumerate(leading_minors(m), start=1))


def solve(m: Sequence[Sequence], rhs: Sequence) -> List[Fraction]:
    """Exact solution of ``m x = rhs``; raises :class:`GraphError` if ``m`` is singular."""
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(m, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise GraphError("intersection matrix is singular")
        a[col], a[pivot] = a[pivot], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                factor = a[r][col]
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    return [row[n] for row in a]


@dataclass
class Cycle:
    """Rational combination ``sum c_i E_i`` of the vertices of ``graph``."""

    graph: DualGraph
    coefficients: List[Fraction]

    def __post_init__(self):
        if len(self.coefficients) != len(self.graph):
            raise GraphError("cycle length does not match the vertex count")

    @property
    def integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coefficients)

    @property
    def nonneg(self) -> bool:
        return all(c >= 0 for c in self.coefficients)

    def dot(self, i: int) -> Fraction:
        """Intersection number ``Z . E_i``."""
        m = intersection_matrix(self.graph)
        return sum((c * m[j][i] for j, c in enumerate(self.coefficients)), Fraction(0))

    def to_dict(self):
        return {
            "coefficients": {v.name: str(c) for v, c in zip(self.graph.vertices, self.coefficients)},
            "integral": self.integral,
            "nonneg": self.nonneg,
        }


def adjunction_rhs(g: DualGraph) -> List[int]:
    return [v.self_int + 2 - 2 * v.genus for v in g.vertices]


def canonical_cycle(g: DualGraph) -> Cycle:
    """The cycle ``Z`` with ``Z.E_i = E_i^2 + 2 - 2 g_i`` for all ``i``."""
    m = intersection_matrix(g)
    if not is_negative_definite(m):
        raise GraphError("canonical cycle needs a negative definite intersection matrix")
    return Cycle(g, solve(m, adjunction_rhs(g)))


def is_small_wrt_gorenstein(g: DualGraph) -> bool:
    return canonical_cycle(g).nonneg


# -- ADE recognition -----------------------------------------------------

def ade_type(g: DualGraph) -> Optional[str]:
    """``"A3"``, ``"D5"``, ``"E6"`` etc. for a rational double point graph, else ``None``."""
    if any(v.self_int != -2 or v.genus != 0 for v in g.vertices):
        return None
    if any(m != 1 for _, _, m in g.edges):
        return None
    n = len(g)
    if len(g.edges) != n - 1:
        return None
    degrees = [len(g.neighbours(i)) for i in range(n)]
    if max(degrees, default=0) <= 2:
        return f"A{n}"
    branches = [i for i, d in enumerate(degrees) if d >= 3]
    if len(branches) != 1 or degrees[branches[0]] != 3:
        return None
    centre = branches[0]
    arms = sorted(len(comp) for comp in g.components(i for i in range(n) if i != centre))
    if arms[0] == 1 and arms[1] == 1:
        return f"D{n}"
    if arms[0] == 1 and arms[1] == 2 and arms[2] in (2, 3, 4):
        return f"E{n}"
    return None


def _rdp(name_stem: str, n: int, edges: Sequence[Tuple[int, int]]) -> DualGraph:
    verts = tuple(Vertex(f"{name_stem}{i + 1}", -2, 0) for i in range(n))
    return DualGraph(verts, tuple((f"{name_stem}{a + 1}", f"{name_stem}{b + 1}", 1) for a, b in edges))


def a_chain(n: int, stem: str = "E") -> DualGraph:
    if n < 1:
        raise GraphError("A_n needs n >= 1")
    return _rdp(stem, n, [(i, i + 1) for i in range(n - 1)])


def d_graph(n: int, stem: str = "E") -> DualGraph:
    if n < 4:
        raise GraphError("D_n needs n >= 4")
    # chain E1..E(n-1) with En attached to E(n-2)
    return _rdp(stem, n, [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)])


def e_graph(n: int, stem: str = "E") -> DualGraph:
    if n not in (6, 7, 8):
        raise GraphError("E_n needs n in {6, 7, 8}")
    # chain E1..E(n-1) with En attached to E3
    return _rdp(stem, n, [(i, i + 1) for i in range(n - 2)] + [(2, n - 1)])


def ade_graph(label: str, stem: str = "E") -> DualGraph:
    kind, n = label[0].upper(), int(label[1:])
    builders = {"A": a_chain, "D": d_graph, "E": e_graph}
    if kind not in builders:
        raise GraphError(f"unknown ADE label {label!r}")
    return builders[kind](n, stem)


def all_ade_labels(max_rank: int = 8) -> List[str]:
    labels = [f"A{n}" for n in range(1, max_rank + 1)]
    labels += [f"D{n}" for n in range(4, max_rank + 1)]
    labels += [f"E{n}" for n in (6, 7, 8) if n <= max_rank]
    return labels


# -- contraction -------------------------------------------------------------

@dataclass
class SingularPoint:
    """Image of one connected component of contracted curves."""

    index: int
    vertices: List[str]
    subgraph: DualGraph
    leading_minors: List[Fraction]

    @property
    def ade_type(self) -> Optional[str]:
        return ade_type(self.subgraph)

    def to_dict(self):
        return {
            "index": self.index,
            "vertices": list(self.vertices),
            "subgraph": self.subgraph.to_dict(),
            "negative_definite_certificate": {"leading_minors": [str(d) for d in self.leading_minors]},
            "type": self.ade_type,
        }


@dataclass
class Contraction:
    kept: DualGraph
    singular_points: List[SingularPoint]
    adjacency: List[Tuple[str, int, int]]

    @property
    def point_types(self) -> List[Optional[str]]:
        return [p.ade_type for p in self.singular_points]

    def to_dict(self):
        return {
            "kept": self.kept.to_dict(),
            "singular_points": [p.to_dict() for p in self.singular_points],
            "adjacency": [[v, p, m] for v, p, m in self.adjacency],
        }


def chern_vector(g: DualGraph, chern) -> List[int]:
    """Accept a list in vertex order or a name -> integer map covering every vertex."""
    if isinstance(chern, Mapping):
        unknown = set(chern) - set(g.names)
        if unknown:
            raise GraphError(f"Chern vector mentions unknown vertices {sorted(unknown)}")
        missing = [n for n in g.names if n not in chern]
        if missing:
            raise GraphError(f"Chern vector misses vertices {missing}")
        values = [chern[n] for n in g.names]
    else:
        values = list(chern)
        if len(values) != len(g):
            raise GraphError("Chern vector length does not match the vertex count")
    if any(not isinstance(c, int) or isinstance(c, bool) or c < 0 for c in values):
        raise GraphError("Chern vector entries must be non-negative integers")
    return values


def contract(g: DualGraph, chern) -> Contraction:
    """Contract every vertex with ``c_j = 0``; each connected component becomes one point."""
    c = chern_vector(g, chern)
    keep = [i for i, v in enumerate(c) if v > 0]
    drop = [i for i, v in enumerate(c) if v == 0]
    if not keep:
        raise NothingKept("nothing kept: the Chern vector is identically zero")
    points = []
    owner = {}
    for comp in g.components(drop):
        sub = g.induced(comp)
        m = intersection_matrix(sub)
        if not is_negative_definite(m):
            raise NonContractible(
                f"non-contractible component: {[g.vertices[i].name for i in comp]} is not negative definite"
            )
        idx = len(points)
        points.append(SingularPoint(idx, [g.vertices[i].name for i in comp], sub, leading_minors(m)))
        for i in comp:
            owner[i] = idx
    kept_set = set(keep)
    kept = g.induced(keep)
    touching: Counter = Counter()
    for a, b, m in g.edges:
        i, j = g.index(a), g.index(b)
        if i in kept_set and j in owner:
            touching[(a, owner[j])] += m
        elif j in kept_set and i in owner:
            touching[(b, owner[i])] += m
    order = {n: k for k, n in enumerate(g.names)}
    adjacency = sorted(((v, p, m) for (v, p), m in touching.items()), key=lambda t: (order[t[0]], t[1]))
    return Contraction(kept, points, adjacency)
