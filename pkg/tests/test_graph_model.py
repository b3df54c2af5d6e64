import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import corpus, graph_m, graph_n, small_corpus
from hamgraph.graph_model import (
    Edge,
    ExtendedGraph,
    Extreme,
    GraphError,
    build_extended,
    canonicalize,
    decorated_from_obj,
    dull,
    dump_graph,
    enumerate_graphs,
    ephemeral_edges,
    extremal_self_intersections,
    fmt_rational,
    forget_trivial,
    graph_from_obj,
    graph_to_obj,
    isotropy_weights,
    make_graph,
    negate_weights,
    parse_graph,
    parse_rational,
    poincare_rank,
    validate,
)
from hamgraph.surgery import minimal_cp2, minimal_hirzebruch, minimal_ruled


def codes(g):
    return [v.code for v in validate(g)]


def test_parse_cp2_111():
    text = json.dumps({
        "genus": 0,
        "min": {"fat": False, "height": "0"},
        "max": {"fat": True, "height": "1", "area": "1"},
        "chains": [{"edges": [{"m": 1, "len": "1"}]}, {"edges": [{"m": 1, "len": "1"}]}],
    })
    g = parse_graph(text)
    assert g.genus == 0
    assert not g.min.fat and g.min.height == 0
    assert g.max.fat and g.max.height == 1 and g.max.area == 1
    assert [[(e.m, e.length) for e in ch] for ch in g.chains] == [[(1, 1)], [(1, 1)]]
    assert g == minimal_cp2(1, 1, 1)


def test_parse_zero_area():
    text = json.dumps({"genus": 0, "min": {"fat": True, "height": "0", "area": "0"},
                       "max": {"fat": False, "height": "1"}, "chains": []})
    with pytest.raises(GraphError, match="area must be positive") as exc:
        parse_graph(text)
    assert exc.value.code == "area_not_positive"


def test_parse_reduces_rationals():
    assert parse_rational("3/6") == Fraction(1, 2)
    assert fmt_rational(parse_rational("3/6")) == "1/2"


@pytest.mark.parametrize("bad", ["1.5", "1/0", "", "a/b", True, None])
def test_parse_rational_rejects(bad):
    with pytest.raises(GraphError) as exc:
        parse_rational(bad, "x")
    assert exc.value.code == "malformed_rational"


def test_parse_syntax_error_has_position():
    with pytest.raises(GraphError) as exc:
        parse_graph('{"genus": 0,')
    assert exc.value.code == "syntax"
    assert "line 1" in str(exc.value)


def test_parse_negative_length():
    obj = graph_to_obj(minimal_cp2(2, 1, 1))
    obj["chains"][0]["edges"][0]["len"] = "-2"
    with pytest.raises(GraphError) as exc:
        graph_from_obj(obj)
    assert exc.value.code == "length_not_positive"


def test_validate_cp2_111():
    g = minimal_cp2(1, 1, 1)
    assert validate(g) == []
    assert extremal_self_intersections(g) == (-1, 1)


def test_validate_adjacent_labels():
    g = ExtendedGraph(0, Extreme(False, Fraction(0)), Extreme(False, Fraction(6)),
                      ((Edge(2, Fraction(2)), Edge(4, Fraction(4))), (Edge(1, Fraction(6)),)))
    assert "labels_not_coprime" in codes(g)
    assert any("adjacent labels not coprime" in v.message for v in validate(g))


def test_validate_returns_all_violations():
    g = ExtendedGraph(1, Extreme(False, Fraction(1)), Extreme(False, Fraction(2)),
                      ((Edge(1, Fraction(1)),),))
    found = set(codes(g))
    assert {"min_height_nonzero", "genus_needs_two_fat", "k_lt_2"} <= found


def test_validate_cp2_211():
    g = minimal_cp2(2, 1, 1)
    assert [[e.m for e in ch] for ch in g.chains] == [[2], [1, 1]]
    assert validate(g) == []
    e_min, e_max = extremal_self_intersections(g)
    assert e_min == Fraction(-1, 2) == Fraction(-1, g.m(1, 1) * g.m(2, 1))
    # the isolated-max rule gives -1/(m_{1,l1} m_{2,l2}) = -1/2 as well
    assert e_max == Fraction(-1, g.m(1, 1) * g.m(2, 2)) == Fraction(-1, 2)


def test_hirzebruch_e_min():
    g = minimal_hirzebruch(1, 0, 1, 2, 1)
    assert (g.min.area, g.max.area) == (Fraction(5, 2), Fraction(3, 2))
    assert extremal_self_intersections(g) == (1, -1)


def test_ruled_equal_areas():
    assert extremal_self_intersections(minimal_ruled(1, 1, 2, 0)) == (0, 0)


def _decorated(**kw):
    base = {"genus": 0, "min": {"fat": False, "height": 0}, "max": {"fat": False, "height": 2}}
    base.update(kw)
    return decorated_from_obj(base)


def test_build_extended_cp2():
    d = _decorated(vertices=[{"id": "p", "height": 1}], edges=[{"from": "min", "to": "max", "m": 2}])
    g = build_extended(d)
    assert [[e.m for e in ch] for ch in g.chains] == [[2], [1, 1]]
    assert g == minimal_cp2(2, 1, 1)


def test_build_extended_ruled():
    d = decorated_from_obj({"genus": 0, "min": {"fat": True, "height": 0, "area": 2},
                            "max": {"fat": True, "height": 1, "area": 2}})
    g = build_extended(d)
    assert [[e.m for e in ch] for ch in g.chains] == [[1], [1]]
    assert validate(g) == []


def test_build_extended_single_free_chain_rejected():
    g = build_extended(_decorated(vertices=[{"id": "p", "height": 1}]))
    assert [[e.m for e in ch] for ch in g.chains] == [[1, 1]]
    assert "k_lt_2" in codes(g)


def test_forget_trivial_round_trip():
    for g in small_corpus():
        assert build_extended(forget_trivial(g)) == g


def test_dull_examples(m_graph):
    d = dull(minimal_cp2(2, 1, 1))
    assert (d.genus, d.min, d.max) == (0, ("iso",), ("iso",))
    assert ((2,), "both") in d.chains
    dm = dull(m_graph)
    assert dm.min[0] == dm.max[0] == "fat"
    assert [c for c in dm.chains] == [((2, 3), "free"), ((2, 3), "free")]
    dr = dull(minimal_ruled(1, 1, 2, 0))
    assert dr.chains == () and dr.min == ("fat", 0) and dr.max == ("fat", 0)


def test_dull_ignores_heights():
    g1 = make_graph(0, 7, 1, [[(1, 1), (3, 3), (2, 2), (1, 1)]] * 2)
    g2 = make_graph(0, 14, 2, [[(1, 2), (3, 6), (2, 4), (1, 2)]] * 2)
    assert dull(g1) == dull(g2)


def test_ephemeral_edges():
    # shape only: no valid graph with these bottom labels turned up on the corpus grid
    g = make_graph(0, None, 1, [[(3, 1)], [(2, 1)], [(1, Fraction(1, 2)), (1, Fraction(1, 2))]])
    assert (g.fat_count, g.k, g.m(2, 1)) == (1, 3, 2)
    assert ephemeral_edges(g) == {(3, 1)}
    assert ephemeral_edges(graph_m()) == frozenset()
    one_fat_trivial = [g for g in corpus(5, 3, 2) if g.fat_count == 1 and g.m(2, 1) == 1]
    assert one_fat_trivial
    assert all(ephemeral_edges(g) == frozenset() for g in one_fat_trivial)


def test_poincare_ranks():
    assert [poincare_rank(minimal_cp2(2, 1, 1), q) for q in range(7)] == [1, 0, 2, 0, 3, 0, 3]
    ruled = minimal_ruled(1, 1, 2, 0)
    assert [poincare_rank(ruled, q) for q in range(6)] == [1, 2, 3, 4, 4, 4]


@given(st.sampled_from(small_corpus()), st.integers(0, 20))
def test_odd_ranks_vanish_in_genus_zero(g, q):
    if g.genus == 0:
        assert poincare_rank(g, 2 * q + 1) == 0


def test_isotropy_weights(m_graph, n_graph):
    trip = [(-1, 3), (-3, 2), (-2, 1)]
    assert isotropy_weights(m_graph) == tuple(sorted(trip * 2))
    assert isotropy_weights(n_graph) == tuple(sorted([(-1, 2), (-2, 3), (-3, 1)] + trip))
    assert isotropy_weights(minimal_cp2(2, 1, 1)) == tuple(sorted([(1, 2), (-1, 1), (-2, -1)]))


def test_enumerate_small_cases():
    gs = list(enumerate_graphs(2, 1, 1))
    shapes = {(g.min.fat, g.max.fat) for g in gs if [[e.m for e in ch] for ch in g.chains] == [[1], [1]]}
    assert shapes == {(True, True), (False, True)}
    assert canonicalize(minimal_cp2(2, 1, 1)) in set(enumerate_graphs(3, 2, 2))


def test_enumerate_deterministic_and_valid():
    a = list(enumerate_graphs(4, 3, 2))
    assert a == list(enumerate_graphs(4, 3, 2))
    assert len(set(a)) == len(a)
    assert all(validate(g) == [] and canonicalize(g) == g for g in a)


@given(st.sampled_from(small_corpus()))
def test_file_round_trip(g):
    assert parse_graph(dump_graph(g)) == g


@given(st.sampled_from(small_corpus()))
def test_fat_extremes_have_integer_self_intersection(g):
    e_min, e_max = extremal_self_intersections(g)
    for ex, e in ((g.min, e_min), (g.max, e_max)):
        if ex.fat:
            assert e.denominator == 1


@given(st.sampled_from(small_corpus()))
def test_weights_signs(g):
    for a, b in isotropy_weights(g):
        assert a != 0 and b != 0
    assert negate_weights(negate_weights(isotropy_weights(g))) == isotropy_weights(g)


@given(st.sampled_from(small_corpus()), st.integers(1, 5), st.integers(1, 5))
def test_rescaling_keeps_validity(g, num, den):
    k = Fraction(num, den)
    chains = [[(e.m, e.length * k) for e in ch] for ch in g.chains]
    lo = g.min.area * k if g.min.fat else None
    hi = g.max.area * k if g.max.fat else None
    h = make_graph(g.genus, lo, hi, chains)
    assert validate(h) == []
    assert extremal_self_intersections(h) == extremal_self_intersections(g)
    assert dull(h) == dull(g)
