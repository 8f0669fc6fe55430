import itertools
import random
from fractions import Fraction

import pytest

from mfblow.errors import GraphError, NonContractible, NothingKept
from mfblow.resgraph import (
    DualGraph,
    Vertex,
    _det,
    a_chain,
    ade_graph,
    ade_type,
    adjunction_rhs,
    all_ade_labels,
    canonical_cycle,
    chern_vector,
    contract,
    intersection_matrix,
    is_negative_definite,
    is_small_wrt_gorenstein,
    solve,
)


def single(self_int, genus=0):
    return DualGraph((Vertex("E", self_int, genus),))


def test_intersection_matrix_examples():
    assert intersection_matrix(a_chain(2)) == [[-2, 1], [1, -2]]
    assert intersection_matrix(single(-3)) == [[-3]]
    m = intersection_matrix(a_chain(5))
    for i in range(5):
        for j in range(5):
            assert m[i][j] == (-2 if i == j else 1 if abs(i - j) == 1 else 0)


def test_negative_definite_examples():
    assert all(is_negative_definite(intersection_matrix(a_chain(n))) for n in range(1, 9))
    assert not is_negative_definite([[0]])
    assert is_negative_definite([[-2, 1], [1, -1]])
    assert not is_negative_definite([[-1, 2], [2, -1]])
    with pytest.raises(GraphError):
        is_negative_definite([[-2, 1], [0, -2]])


def all_principal_minors_oracle(m):
    # negative definite iff every principal minor of size k has sign (-1)^k
    n = len(m)
    for k in range(1, n + 1):
        for idx in itertools.combinations(range(n), k):
            d = _det([[m[i][j] for j in idx] for i in idx])
            if (-1) ** k * d <= 0:
                return False
    return True


@pytest.mark.parametrize("seed", range(40))
def test_negative_definite_oracle(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    m = [[0] * n for _ in range(n)]
    for i in range(n):
        m[i][i] = rng.randint(-5, -1)
        for j in range(i):
            m[i][j] = m[j][i] = rng.choice([0, 0, 0, 1, 1, 2])
    assert is_negative_definite(m) == all_principal_minors_oracle(m)


@pytest.mark.parametrize("label", all_ade_labels())
def test_ade_canonical_cycle_is_zero(label):
    g = ade_graph(label)
    z = canonical_cycle(g)
    assert z.coefficients == [0] * len(g)
    assert is_small_wrt_gorenstein(g)
    assert ade_type(g) == label


def test_canonical_cycle_examples():
    z = canonical_cycle(single(-1, genus=1))
    assert z.coefficients == [1] and z.integral and z.nonneg
    assert is_small_wrt_gorenstein(single(-1, genus=1))
    z = canonical_cycle(single(-3))
    assert z.coefficients == [Fraction(1, 3)] and not z.integral


def test_not_small_examples():
    assert canonical_cycle(single(-1)).coefficients == [-1]
    assert not is_small_wrt_gorenstein(single(-1))
    # a (-1)-curve meeting a (-3)-curve: -a + b = 1, a - 3b = -1 gives (-1, 0)
    g = DualGraph((Vertex("A", -1), Vertex("B", -3)), (("A", "B", 1),))
    z = canonical_cycle(g)
    assert z.coefficients == [-1, 0] == solve(intersection_matrix(g), adjunction_rhs(g))
    assert not is_small_wrt_gorenstein(g)


def random_nd_graph(rng):
    n = rng.randint(1, 6)
    while True:
        verts = tuple(Vertex(f"E{i}", rng.randint(-5, -2), rng.randint(0, 2)) for i in range(n))
        edges = tuple((f"E{i}", f"E{rng.randrange(i)}", 1) for i in range(1, n))
        g = DualGraph(verts, edges)
        if is_negative_definite(intersection_matrix(g)):
            return g


@pytest.mark.parametrize("seed", range(15))
def test_canonical_cycle_residual(seed):
    g = random_nd_graph(random.Random(seed))
    z = canonical_cycle(g)
    for i, v in enumerate(g.vertices):
        assert z.dot(i) - (v.self_int + 2 - 2 * v.genus) == 0


def test_singular_matrix_rejected():
    g = DualGraph((Vertex("A", -1), Vertex("B", -1)), (("A", "B", 1),))
    with pytest.raises(GraphError):
        canonical_cycle(g)


def test_graph_validation():
    with pytest.raises(GraphError):
        DualGraph((Vertex("A", -2), Vertex("B", -2)))
    with pytest.raises(GraphError):
        DualGraph((Vertex("A", -2),), (("A", "A", 1),))
    with pytest.raises(GraphError):
        DualGraph((Vertex("A", -2),), (("A", "C", 1),))
    with pytest.raises(GraphError):
        Vertex("A", 0)
    with pytest.raises(GraphError):
        Vertex("A", -2, -1)
    g = DualGraph((Vertex("A", -2), Vertex("B", -2)), (("A", "B", 1), ("B", "A", 2)))
    assert g.edges == (("A", "B", 3),)


def test_dict_round_trip():
    g = ade_graph("D5")
    assert DualGraph.from_dict(g.to_dict()) == g
    h = DualGraph.from_dict({"vertices": [{"name": "a", "self_int": -2}, {"name": "b", "self_int": -3}],
                             "edges": [["a", "b"]]})
    assert h.edges == (("a", "b", 1),) and h.vertices[1].genus == 0
    with pytest.raises(GraphError):
        DualGraph.from_dict({"edges": []})
    with pytest.raises(GraphError):
        DualGraph.from_dict({"vertices": [{"self_int": -2}]})


@pytest.mark.parametrize("n,k", [(n, k) for n in range(1, 9) for k in range(1, n + 1)])
def test_chain_contraction(n, k):
    g = a_chain(n)
    c = [1 if i == k - 1 else 0 for i in range(n)]
    out = contract(g, c)
    assert out.kept.names == [f"E{k}"]
    sizes = sorted(len(p.vertices) for p in out.singular_points)
    assert sizes == sorted(m for m in (k - 1, n - k) if m)
    assert sorted(out.point_types) == sorted(f"A{m}" for m in (k - 1, n - k) if m)
    assert len(out.kept) + sum(sizes) == n
    assert [m for _, _, m in out.adjacency] == [1] * len(out.singular_points)


def test_contraction_examples():
    out = contract(a_chain(3), {"E1": 0, "E2": 1, "E3": 0})
    assert out.point_types == ["A1", "A1"]
    assert out.adjacency == [("E2", 0, 1), ("E2", 1, 1)]
    full = contract(a_chain(4), [1, 2, 1, 3])
    assert full.kept == a_chain(4) and full.singular_points == []
    with pytest.raises(NothingKept):
        contract(a_chain(3), [0, 0, 0])


def test_contraction_errors():
    g = DualGraph((Vertex("A", -1), Vertex("B", -1), Vertex("C", -2)), (("A", "B", 2), ("B", "C", 1)))
    with pytest.raises(NonContractible):
        contract(g, {"A": 0, "B": 0, "C": 1})
    with pytest.raises(GraphError):
        chern_vector(g, {"A": 1, "B": 0})
    with pytest.raises(GraphError):
        chern_vector(g, [1, -1, 0])
    with pytest.raises(GraphError):
        chern_vector(g, {"A": 1, "B": 0, "C": 0, "D": 1})


@pytest.mark.parametrize("label", all_ade_labels())
def test_ade_unit_contractions_give_ade(label):
    g = ade_graph(label)
    for k in range(len(g)):
        c = [1 if i == k else 0 for i in range(len(g))]
        out = contract(g, c)
        assert all(t is not None for t in out.point_types)
        assert len(out.kept) + sum(len(p.vertices) for p in out.singular_points) == len(g)
        for p in out.singular_points:
            assert all((-1) ** (i + 1) * d > 0 for i, d in enumerate(p.leading_minors))
