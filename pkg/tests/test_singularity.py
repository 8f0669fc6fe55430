import random

import pytest

from mfblow.blowup import blowup_charts
from mfblow.errors import DomainError, NotZeroDimensional
from mfblow.groebner import Ideal, krull_dim
from mfblow.mf import XYZ, NormChoice, an_mf, cubic_line_mf, fundamental_mf, norm_ideal
from mfblow.pipeline import analyze_blowup, run_pipeline
from mfblow.poly import Ring, substitute
from mfblow.singularity import (
    CONSISTENT_NOTE,
    INCONCLUSIVE,
    ISOLATED,
    NON_ISOLATED,
    NORMAL,
    NORMAL_WITH_SINGULARITIES,
    NOT_NORMAL,
    NOT_SPECIAL_NOTE,
    RESOLUTION,
    SMOOTH,
    UNKNOWN,
    all_points_corank_le_one,
    analyze_chart,
    analyze_ideal,
    count_points,
    is_a1_equation,
    is_smooth,
    jacobian_matrix,
    sing_dimension,
    singular_locus,
    tjurina_complete_intersection,
    tjurina_total,
)

x, y, z = XYZ.gens()
YZT = Ring(("y", "z", "t"))


def test_jacobian_examples():
    j = jacobian_matrix(Ideal.parse(XYZ, ["x^2+y^2+z^2-1"]))
    assert j.tolist() == [[2 * x, 2 * y, 2 * z]]
    j = jacobian_matrix(Ideal.parse(XYZ, ["x*y+z^5"]))
    assert j.tolist() == [[y, x, 5 * z ** 4]]
    assert jacobian_matrix(Ideal(XYZ)).rows == 0


def test_singular_locus_examples():
    assert singular_locus(Ideal.parse(XYZ, ["x^2+y^2+z^2-1"])).is_unit()
    assert singular_locus(Ideal.parse(XYZ, ["x*y+z^2"])).equals(Ideal(XYZ, [x, y, z]))
    loc = singular_locus(Ideal.parse(YZT, ["t*y - z^2"]))
    assert loc.equals(Ideal(YZT, YZT.gens())) and krull_dim(loc) == 0
    with pytest.raises(DomainError):
        singular_locus(Ideal(XYZ, [XYZ.one()]))


def test_smoothness_examples():
    assert not is_smooth(Ideal.parse(XYZ, ["x*y+z^2"]))
    assert is_smooth(Ideal(XYZ, [x]))
    assert sing_dimension(Ideal.parse(XYZ, ["x*y+z^2"])) == 0
    assert sing_dimension(Ideal(XYZ, [x])) == -1
    # a double line has a one-dimensional singular locus
    assert sing_dimension(Ideal.parse(XYZ, ["x^2*y + z^2"])) == 1


@pytest.mark.parametrize("text", ["x*y+z^2", "x", "x^2+y^2+z^2-1", "x^2*y+z^2", "x^3+y^3+z^3", "x*y*z"])
def test_smooth_iff_empty_locus(text):
    I = Ideal.parse(XYZ, [text])
    assert is_smooth(I) == (sing_dimension(I) == -1)


def test_tjurina_examples():
    for m in range(1, 7):
        assert tjurina_total(x * y + z ** (m + 1)) == m
    assert tjurina_total(x ** 2 + y ** 2 + z ** 2) == 1
    assert tjurina_total(x + y * z) == 0
    # two ordinary double points
    assert tjurina_total(x * y + z ** 2 * (z - 1) ** 2) == 2
    with pytest.raises(NotZeroDimensional):
        tjurina_total(x ** 2 * y + z ** 2)
    with pytest.raises(NotZeroDimensional):
        tjurina_total(XYZ.zero())


@pytest.mark.parametrize("seed", range(8))
def test_tjurina_linear_change_invariance(seed):
    rng = random.Random(seed)
    while True:
        m = [[rng.randint(-2, 2) for _ in range(3)] for _ in range(3)]
        d = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
             - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
             + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
        if d:
            break
    images = {v: sum((m[i][j] * XYZ.gens()[j] for j in range(3)), XYZ.zero()) for i, v in enumerate(XYZ.vars)}
    g = substitute(x * y + z ** 3, images)
    assert tjurina_total(g) == 2


def test_count_points():
    assert count_points(Ideal.parse(XYZ, ["x", "y", "z^3"])) == 1
    assert count_points(Ideal.parse(XYZ, ["x^2-1", "y", "z"])) == 2
    # points over the reals and complex conjugate pairs are both counted
    assert count_points(Ideal.parse(XYZ, ["x^2+1", "y", "z^2-z"])) == 4


def test_complete_intersection_tjurina():
    # a hypersurface is a complete intersection with one equation
    for g in [x * y + z ** 3, x ** 2 + y ** 2 + z ** 2, x * y + z ** 5]:
        assert tjurina_complete_intersection([g]) == tjurina_total(g)
    # A2 embedded in 4-space by a redundant linear equation
    W = Ring(("x", "y", "z", "w"))
    eqs = [W.parse("x*y + z^3"), W.parse("w - x")]
    assert tjurina_complete_intersection(eqs) == 2


def test_corank_test():
    assert all_points_corank_le_one([x * y + z ** 4], Ideal(XYZ, [x, y, z]))
    # D4 has a corank two Hessian
    assert not all_points_corank_le_one([x ** 2 + y ** 3 + y * z ** 2], Ideal(XYZ, [x, y, z]))
    W = Ring(("x", "y", "z", "w"))
    eqs = [W.parse("x*y + z^3"), W.parse("w - z^2 - x")]
    assert all_points_corank_le_one(eqs, Ideal(W, W.gens()))


def test_a1_equation():
    assert is_a1_equation(x * y + z ** 2)
    assert not is_a1_equation(x * y + z ** 3)
    assert not is_a1_equation(x ** 3 + y ** 3 + z ** 3)


def test_analyze_chart_example():
    f = x * y + z ** 4
    charts = blowup_charts(f, Ideal(XYZ, [y, z ** 2]))
    rep = analyze_chart(charts[0])
    assert rep.status == ISOLATED and rep.tjurina_total == 1 and rep.normality_verdict == NORMAL
    assert rep.hypersurface_form and rep.meets_exceptional


def test_fundamental_charts_are_smooth():
    res = run_pipeline(fundamental_mf(), NormChoice.cols(3, 4))
    assert len(res.reports) == 4
    assert all(r.status == SMOOTH and r.normality_verdict == NORMAL for r in res.reports)
    assert res.verdict.aggregate == RESOLUTION
    assert res.verdict.speciality_note == NOT_SPECIAL_NOTE


def test_cubic_line_is_not_normal():
    res = run_pipeline(cubic_line_mf(), NormChoice.cols(1))
    bad = [r for r in res.reports if r.sing_locus_dim >= 1]
    assert bad and all(r.status == NON_ISOLATED and r.normality_verdict == NOT_NORMAL for r in bad)
    assert res.verdict.aggregate == NOT_NORMAL
    assert res.verdict.speciality_note == ""


def test_a3_pipeline():
    res = run_pipeline(an_mf(3, 2), NormChoice.cols(1))
    assert res.verdict.aggregate == NORMAL_WITH_SINGULARITIES
    assert res.verdict.speciality_note == CONSISTENT_NOTE
    assert res.verdict.point_types == ["A1", "A1"]


def test_a1_resolution_has_no_note():
    res = analyze_blowup(x * y + z ** 2, Ideal(XYZ, [y, z]))
    assert res.verdict.aggregate == RESOLUTION and res.verdict.speciality_note == ""


def expected_types(n, k):
    return sorted(f"A{m}" for m in (k - 1, n - k) if m > 0)


@pytest.mark.parametrize("n,k", [(n, k) for n in range(1, 6) for k in range(1, n + 1)])
def test_an_family(n, k):
    v = run_pipeline(an_mf(n, k), NormChoice.cols(1)).verdict
    assert v.tjurina_total == n - 1
    assert sorted(v.point_types) == expected_types(n, k)
    assert v.singular_points <= 2


ACCEPTANCE_INPUTS = [(fundamental_mf(), NormChoice.cols(3, 4)), (cubic_line_mf(), NormChoice.cols(1))]
ACCEPTANCE_INPUTS += [(an_mf(n, k), NormChoice.cols(1)) for n in range(1, 6) for k in range(1, n + 1)]


@pytest.mark.parametrize("mf,choice", ACCEPTANCE_INPUTS, ids=lambda v: str(getattr(v, "f", v)))
def test_simplified_and_raw_charts_agree(mf, choice):
    center = norm_ideal(mf, choice)
    for chart in blowup_charts(mf.f, center):
        a = analyze_chart(chart)
        b = analyze_ideal(chart.chart_ideal, chart.expected_dimension, chart.index)
        assert krull_dim(chart.working_ideal()) == krull_dim(chart.chart_ideal)
        assert (a.status, a.sing_locus_dim) == (b.status, b.sing_locus_dim)
        assert (a.tjurina_total, a.points) == (b.tjurina_total, b.points)


def test_dimension_mismatch_is_inconclusive():
    rep = analyze_ideal(Ideal.parse(XYZ, ["x*y", "x*z"]), expected_dim=1)
    assert rep.status == INCONCLUSIVE and rep.normality_verdict == UNKNOWN


def test_non_complete_intersection_is_unknown():
    # the cone over the twisted cubic needs three equations in codimension two
    rep = analyze_ideal(Ideal.parse(XYZ.extend(["w"]), ["x*z - y^2", "x*w - y*z", "y*w - z^2"]))
    assert rep.status == ISOLATED and rep.complete_intersection is False
    assert rep.normality_verdict == UNKNOWN


REPORTS_MFS = [
    (fundamental_mf(), NormChoice.cols(3, 4)),
    (cubic_line_mf(), NormChoice.cols(1)),
    (an_mf(5, 2), NormChoice.cols(1)),
]


@pytest.mark.parametrize("mf,choice", REPORTS_MFS, ids=["fundamental", "cubic_line", "a52"])
def test_verdict_audit(mf, choice):
    for r in run_pipeline(mf, choice).reports:
        assert (r.status == SMOOTH) == (r.sing_locus_dim == -1)
        if r.normality_verdict in (NORMAL, NOT_NORMAL):
            assert r.status == SMOOTH or r.complete_intersection
        if r.normality_verdict == NOT_NORMAL:
            assert r.sing_locus_dim >= 1
