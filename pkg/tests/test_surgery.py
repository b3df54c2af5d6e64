from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import corpus, graph_m, graph_n, small_corpus
from hamgraph.classes import TAU0, TAUINF, TAUH, gen, sigma
from hamgraph.cohomology import chern_classes
from hamgraph.graph_model import canonicalize, extremal_self_intersections, validate
from hamgraph.surgery import (
    MinimalModelId,
    Site,
    SurgeryError,
    Target,
    blowdown,
    blowdown_targets,
    blowup,
    minimal_cp2,
    minimal_hirzebruch,
    minimal_ruled,
    parse_site,
    parse_target,
    recognize,
    reduce_to_minimal,
    replay,
    transport_generators,
)

LAMBDAS = (Fraction(1, 4), Fraction(1, 2), Fraction(1))


def candidate_sites(g):
    out = [Site("interior", i=i, j=j) for i, j in g.interior_vertices()]
    for end, ex in (("min", g.min), ("max", g.max)):
        if ex.fat:
            out += [Site("fat_to_edge", end=end), Site("fat_to_isolated", end=end)]
        else:
            out.append(Site("isolated_extreme", end=end))
    return out


def blowups_of(g):
    for site in candidate_sites(g):
        for lam in LAMBDAS:
            try:
                new, rec = blowup(g, site, lam)
            except SurgeryError:
                continue
            yield site, lam, new, rec


def euler(g):
    return chern_classes(g).euler


def labels(g):
    return [[e.m for e in ch] for ch in g.chains]


def test_minimal_cp2_examples():
    g = minimal_cp2(1, 1, 1)
    assert not g.min.fat and g.max.fat and g.max.area == 1 and g.max.height == 1
    assert labels(g) == [[1], [1]]
    g = minimal_cp2(2, 1, 1)
    assert not g.min.fat and not g.max.fat
    assert [[(e.m, e.length) for e in ch] for ch in g.chains] == [[(2, 2)], [(1, 1), (1, 1)]]
    g = minimal_cp2(3, 2, 1)
    assert [[(e.m, e.length) for e in ch] for ch in g.chains] == [[(3, 3)], [(2, 2), (1, 1)]]


def test_minimal_cp2_rejects_non_coprime():
    with pytest.raises(SurgeryError):
        minimal_cp2(2, 4, 1)


def test_minimal_hirzebruch_examples():
    g = minimal_hirzebruch(1, 0, 1, 2, 1)
    assert g.fat_count == 2 and labels(g) == [[1], [1]]
    assert (g.min.area, g.max.area) == (Fraction(5, 2), Fraction(3, 2))
    assert extremal_self_intersections(g)[0] == 1
    g = minimal_hirzebruch(1, -1, 0, 2, 1)
    assert g.fat_count == 1 and g.max.fat
    assert sorted(map(len, g.chains)) == [1, 2]
    g = minimal_hirzebruch(2, 1, 3, 4, 1)
    assert g.fat_count == 0
    # stabilizers |m|, |m|, |mN - n|, |n| = 1, 1, 1, 3 on two chains of two edges
    assert sorted(e.m for ch in g.chains for e in ch) == [1, 1, 1, 3]
    assert [len(ch) for ch in g.chains] == [2, 2]


def test_minimal_hirzebruch_rejects_degenerate_trapezoid():
    with pytest.raises(SurgeryError):
        minimal_hirzebruch(4, 0, 1, 2, 1)


def test_minimal_ruled_examples():
    g = minimal_ruled(1, 1, 2, 0)
    assert (g.genus, g.min.area, g.max.area) == (1, 2, 2)
    assert extremal_self_intersections(g)[0] == 0
    g = minimal_ruled(2, 1, 3, 1)
    assert (g.min.area, g.max.area) == (Fraction(7, 2), Fraction(5, 2))
    assert canonicalize(minimal_ruled(0, 1, 2, 1)) == canonicalize(minimal_hirzebruch(1, 0, 1, 2, 1))


def test_minimal_ruled_rejects_negative_area():
    with pytest.raises(SurgeryError):
        minimal_ruled(1, 2, 1, 2)


def test_cp2_blowup_is_f1():
    f1, rec = blowup(minimal_cp2(1, 1, 1), Site("isolated_extreme", end="min"), Fraction(1, 2))
    assert f1.fat_count == 2 and labels(f1) == [[1], [1]]
    model = recognize(f1)
    assert model.kind == MinimalModelId.HIRZEBRUCH and model.params[0] == 1
    back, _ = blowdown(f1, rec.exceptional_feature)
    assert back == minimal_cp2(1, 1, 1)


def test_type_at_fat_max_lowers_area_and_e():
    g = minimal_ruled(0, 2, 3, 0)
    lam = Fraction(1, 2)
    new, rec = blowup(g, Site("fat_to_edge", end="max"), lam)
    assert new.max.area == g.max.area - lam
    e_old, e_new = extremal_self_intersections(g), extremal_self_intersections(new)
    assert e_new[1] == e_old[1] - 1
    assert e_new[0] == e_old[0] and new.min.area == g.min.area


def test_blowup_too_big():
    with pytest.raises(SurgeryError, match="invalid λ-blowup") as exc:
        blowup(minimal_cp2(1, 1, 1), Site("isolated_extreme", end="min"), Fraction(2))
    assert exc.value.code == "invalid_lambda"


def test_blowup_site_mismatch():
    with pytest.raises(SurgeryError):
        blowup(minimal_cp2(2, 1, 1), Site("fat_to_edge", end="max"), Fraction(1, 4))
    with pytest.raises(SurgeryError):
        blowup(minimal_cp2(2, 1, 1), Site("interior", i=1, j=1), Fraction(1, 4))


def test_cp2_211_has_no_exceptional_feature():
    g = minimal_cp2(2, 1, 1)
    assert blowdown_targets(g) == []
    with pytest.raises(SurgeryError, match="not blowdownable"):
        blowdown(g, Target("edge", i=1, j=1))


def test_fat_minus_one_blows_down():
    g = minimal_ruled(0, 1, 3, 1)
    assert extremal_self_intersections(g)[1] == -1
    new, rec = blowdown(g, Target("fat_extreme", end="max"))
    assert new.fat_count == 1 and validate(new) == []
    again, _ = blowup(new, rec.site, rec.lam)
    assert again == g


def test_reduce_examples():
    assert reduce_to_minimal(minimal_cp2(3, 2, 1)) == (MinimalModelId("CP2", (3, 2, Fraction(1))), [])
    one, _ = blowup(minimal_cp2(3, 2, 1), Site("interior", i=2, j=1), Fraction(1, 4))
    model, hist = reduce_to_minimal(one)
    assert model.kind == MinimalModelId.CP2 and len(hist) == 1
    assert replay(model, hist) == one


def test_counterexample_is_sevenfold_blowup_of_cp2():
    for g in (graph_m(), graph_n()):
        model, hist = reduce_to_minimal(g)
        assert model.kind == MinimalModelId.CP2
        assert len(hist) == 7
        assert replay(model, hist) == g


def test_transport_type_interior():
    g = minimal_cp2(2, 1, 1)
    _, rec = blowup(g, Site("interior", i=2, j=1), Fraction(1, 4))
    assert rec.type == "I"
    images, exc = transport_generators(rec)
    assert exc == gen(sigma(2, 2))
    assert images[sigma(2, 2)] == gen(sigma(2, 3))
    assert images[sigma(2, 1)] == gen(sigma(2, 1))


def test_transport_isolated_extreme():
    g = minimal_cp2(2, 1, 1)
    _, rec = blowup(g, Site("isolated_extreme", end="min"), Fraction(1, 4))
    images, exc = transport_generators(rec)
    assert rec.type == "III"
    feat = rec.exceptional_feature
    assert feat.kind == "edge" and exc == gen(sigma(feat.i, feat.j))
    assert set(images) == {TAUH, sigma(1, 1), sigma(2, 1), sigma(2, 2)}


def test_transport_creating_a_surface():
    g = minimal_cp2(1, 1, 1)
    new, rec = blowup(g, Site("isolated_extreme", end="min"), Fraction(1, 2))
    images, exc = transport_generators(rec)
    assert rec.type == "IV"
    assert exc == gen(TAU0)
    assert images[TAUINF] == gen(TAUINF)


def test_parse_site_and_target():
    assert parse_site("interior(2, 3)") == Site("interior", i=2, j=3)
    assert parse_site("IsolatedExtreme(Min)") == Site("isolated_extreme", end="min")
    assert parse_target("edge(1,2)") == Target("edge", i=1, j=2)
    assert parse_target("fat_extreme(max)") == Target("fat_extreme", end="max")
    with pytest.raises(SurgeryError):
        parse_site("nowhere(1)")


@given(st.sampled_from(small_corpus()))
def test_blowup_round_trip_and_bookkeeping(g):
    for site, lam, new, rec in blowups_of(g):
        assert validate(new) == []
        assert euler(new) == euler(g) + 1
        back, _ = blowdown(new, rec.exceptional_feature)
        assert back == g


@given(st.sampled_from(corpus(5, 3, 2)))
def test_reduce_replays(g):
    model, hist = reduce_to_minimal(g)
    assert recognize(model.build()) is not None
    assert replay(model, hist) == g
