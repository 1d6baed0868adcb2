import math

import pytest
from hypothesis import given, settings, strategies as st

from lgwb import _exact
from lgwb.laurent import LaurentPoly, LaurentRational, rational_eq, substitute
from lgwb.superpotential import cp2_chekanov, cp2_clifford, p1p1_chekanov, p1p1_clifford
from lgwb.wallcross import (CHEKANOV, CLIFFORD, GluingError, PRESETS, SubstitutionMap, classical_neg_map,
                            classical_pos_map, identity_map, lost_values, monodromy, monomial_map, preset,
                            quantum_inverse_map, quantum_map, verify_chart_identity, wall_map)

from conftest import LN10

w, u = LaurentPoly.gens(2)
z1, z2 = LaurentPoly.gens(2)


def same_map(a: SubstitutionMap, b: SubstitutionMap) -> bool:
    return all(rational_eq(x, y) for x, y in zip(a.assignments, b.assignments))


def test_wall_map_quantum_correction():
    m = wall_map(1 + w, (0, 1), CHEKANOV)
    assert rational_eq(m.assignments[0], LaurentRational(w))
    assert rational_eq(m.assignments[1], LaurentRational(u * (1 + w)))


def test_wall_map_trivial_and_inverse_factor():
    assert same_map(wall_map(LaurentPoly.const(2, 1), (3, -2), CHEKANOV), identity_map(CHEKANOV))
    m = wall_map(1 + w, (0, -1), CHEKANOV)
    assert rational_eq(m.assignments[1], u / (1 + w))


def test_wall_map_rejects_bad_factor():
    with pytest.raises(GluingError):
        wall_map(2 + w, (0, 1), CHEKANOV)
    with pytest.raises(GluingError):
        wall_map(1 + w, (0, 1, 2), CHEKANOV)


def test_classical_then_wall_is_quantum():
    m = wall_map(1 + w, (0, 1), CHEKANOV).compose(classical_pos_map())
    assert same_map(m, quantum_map())


def test_quantum_map_round_trip():
    assert same_map(quantum_map().compose(quantum_inverse_map()), identity_map(CHEKANOV))
    assert same_map(quantum_inverse_map().compose(quantum_map()), identity_map(CLIFFORD))


@pytest.mark.parametrize("lam", [3 * LN10, 2, 5])
def test_cp2_identity(lam):
    v = verify_chart_identity(cp2_chekanov(lam), cp2_clifford(lam), quantum_map())
    assert v.identity_holds
    assert v.identity_holds == rational_eq(v.transformed, v.expected)


@pytest.mark.parametrize("lam", [3 * LN10, 2])
def test_cp2_identity_reversed(lam):
    v = verify_chart_identity(cp2_clifford(lam), cp2_chekanov(lam), quantum_inverse_map())
    assert v.identity_holds


@pytest.mark.parametrize("l1,l2", [(2 * LN10, 2 * LN10), (2, 3)])
def test_p1p1_identity(l1, l2):
    assert verify_chart_identity(p1p1_chekanov(l1, l2), p1p1_clifford(l1, l2), quantum_map()).identity_holds


@pytest.mark.parametrize("m", [classical_pos_map(), classical_neg_map()])
def test_classical_maps_break_identity(m):
    v = verify_chart_identity(cp2_chekanov(2), cp2_clifford(2), m)
    assert not v.identity_holds
    assert not rational_eq(v.transformed, v.expected)


def test_identity_rejects_mismatched_inputs():
    with pytest.raises(GluingError):
        verify_chart_identity(cp2_chekanov(2), cp2_clifford(3), quantum_map())
    with pytest.raises(GluingError):
        verify_chart_identity(cp2_clifford(2), cp2_clifford(2), quantum_map())
    with pytest.raises(GluingError):
        verify_chart_identity(cp2_chekanov(2).numeric(), cp2_clifford(2), quantum_map())


def test_monodromy_examples():
    assert monodromy(classical_pos_map(), classical_neg_map()) == [[1, 0], [1, 1]]
    assert monodromy(classical_neg_map(), classical_pos_map()) == [[1, 0], [-1, 1]]
    assert monodromy(classical_pos_map(), classical_pos_map()) == [[1, 0], [0, 1]]


def test_monodromy_acts_as_w_uw():
    # Going around the wall sends (w, u) to (w, u w) on the exponent lattice.
    mono = monodromy(classical_pos_map(), classical_neg_map())
    assert same_map(monomial_map(mono, CHEKANOV, CHEKANOV), SubstitutionMap((w, u * w), CHEKANOV, CHEKANOV))


def test_monodromy_errors():
    with pytest.raises(GluingError):
        monodromy(quantum_map(), classical_neg_map())
    with pytest.raises(GluingError):
        monodromy(monomial_map([[2, 0], [0, 1]], CHEKANOV, CLIFFORD), classical_neg_map())


def test_map_validation_and_text():
    with pytest.raises(GluingError):
        SubstitutionMap((w,), CHEKANOV, CLIFFORD)
    with pytest.raises(GluingError):
        SubstitutionMap((w, LaurentPoly.zero(2)), CHEKANOV, CLIFFORD)
    assert quantum_map().monomial_part is None
    assert classical_pos_map().monomial_part == [[1, -1], [0, 1]]
    assert set(quantum_map().to_text()) == {"w", "u"}
    with pytest.raises(GluingError):
        quantum_map().compose(quantum_map())


def test_numeric_evaluation():
    img = quantum_map()((2.0, 0.5))
    assert img == pytest.approx((4.0, 2.5))


@given(st.integers(-3, 3), st.integers(-3, 3))
def test_wall_maps_compose_additively(p1, p2):
    h = 1 + w + 2 * w ** 2
    lhs = wall_map(h, (0, p1), CHEKANOV).compose(wall_map(h, (0, p2), CHEKANOV))
    # The factor depends only on w, which every wall map here fixes.
    assert same_map(lhs, wall_map(h, (0, p1 + p2), CHEKANOV))


def _unimodular(steps):
    m = [[1, 0], [0, 1]]
    for kind, k in steps:
        e = [[1, k], [0, 1]] if kind else [[1, 0], [k, 1]]
        m = _exact.int_matmul(m, e)
    return m


# Products of elementary shears generate SL(2, Z).
unimodular = st.lists(st.tuples(st.booleans(), st.integers(-2, 2)), max_size=4).map(_unimodular)


@settings(max_examples=60)
@given(unimodular, unimodular)
def test_monomial_maps_compose_as_matrices(a, b):
    ma, mb = a, b
    comp = monomial_map(ma, CHEKANOV, CLIFFORD).compose(monomial_map(mb, CLIFFORD, CHEKANOV))
    assert comp.monomial_part == _exact.int_matmul(ma, mb)


@settings(max_examples=30)
@given(unimodular)
def test_monomial_substitution_matches_matrix(m):
    p = 3 * w + u ** -1 * w ** 2
    got = substitute(p, monomial_map(m, CHEKANOV, CLIFFORD))
    want = LaurentPoly.zero(2)
    for (exp, _), c in p.terms:
        e = tuple(sum(exp[i] * m[i][j] for i in range(2)) for j in range(2))
        want = want + c * LaurentPoly.monomial(e)
    assert rational_eq(got, want)


def test_lost_values_cp2_none_lost():
    lv = lost_values(cp2_chekanov(3 * LN10).numeric(), cp2_clifford(3 * LN10).numeric(), quantum_map())
    assert lv.match.ok
    assert lv.lost_on_src == () and lv.lost_on_dst == () and lv.unmappable == ()
    assert len(lv.src_values) == len(lv.dst_values) == 3


def test_lost_values_p1p1_loses_zero():
    lam = 2 * LN10
    lv = lost_values(p1p1_chekanov(lam, lam).numeric(), p1p1_clifford(lam, lam).numeric(), quantum_map())
    assert sorted(v.real for v in lv.dst_values) == pytest.approx([-0.4, 0, 0, 0.4], abs=1e-12)
    assert sorted(v.real for v in lv.src_values) == pytest.approx([-0.4, 0.4], abs=1e-12)
    assert lv.lost_on_dst == (0j, 0j) and lv.lost_on_src == ()
    # The lost points sit on z1 + z2 = 0, where u vanishes.
    assert len(lv.unmappable) == 2
    assert all(abs(p.z[0] + p.z[1]) < 1e-12 for p in lv.unmappable)


def test_lost_values_params_override():
    lv = lost_values(cp2_chekanov(2), cp2_clifford(2), quantum_map(), params={"q": math.exp(-3 * LN10)})
    assert lv.match.ok
    assert max(abs(v) for v in lv.dst_values) == pytest.approx(0.3, rel=1e-12)


def test_lost_values_identity():
    W = cp2_clifford(2).numeric()
    lv = lost_values(W, W, identity_map(CLIFFORD))
    assert lv.match.ok and lv.match.max_distance == 0


def test_presets():
    for name in PRESETS:
        p = preset(name)
        assert p.src.variable_names == CHEKANOV and p.dst.variable_names == CLIFFORD
    assert preset("cp2").gluing == quantum_map()
    assert preset("cp2", classical=True).gluing == classical_pos_map()
    assert preset("classical-neg").gluing == classical_neg_map()
    assert verify_chart_identity(preset("p1p1", 2, 3).src, preset("p1p1", 2, 3).dst, quantum_map()).identity_holds
    with pytest.raises(GluingError):
        preset("f3")
