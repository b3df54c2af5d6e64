import pytest
from hypothesis import given, strategies as st

from conftest import corpus, graph_m, graph_n, small_corpus
from hamgraph.classes import TAU0, TAUH, TAUINF, gen, scale, sigma
from hamgraph.cohomology import normal_form
from hamgraph.graph_model import dull, isotropy_weights, make_graph, negate_weights
from hamgraph.localization import LocalizationError, class_label, generators, intersect, zero_length
from hamgraph.morphisms import (
    MorphismError,
    compose,
    diffeo_obstruction,
    dull_isomorphic,
    flippable,
    full_flip,
    partial_flip,
    symplectic_flip,
    weak_isomorphisms,
)
from hamgraph.surgery import minimal_cp2, minimal_ruled


def same(g, a, b):
    return normal_form(g, a) == normal_form(g, b)


def label_or_none(g, c):
    try:
        return class_label(g, c)
    except LocalizationError:
        return None


def produced_maps(g):
    yield full_flip(g)[1]
    yield symplectic_flip(g)[1]
    for i in range(1, g.k + 1):
        if flippable(g, i):
            yield partial_flip(g, i)[1]


def test_partial_flip_counterexample(m_graph, n_graph):
    out, f = partial_flip(m_graph, 2)
    assert out == n_graph
    assert f.name == "partial_flip(chain 2)" and f.eps == 1
    # the flipped chain is listed first after canonical ordering
    assert f(gen(sigma(2, 2))) == scale(gen(sigma(1, 3)), -1)
    assert f(gen(sigma(2, 3))) == scale(gen(sigma(1, 2)), -1)
    assert f.problems() == []


def test_partial_flip_involution(m_graph):
    mid, f = partial_flip(m_graph, 2)
    back, f2 = partial_flip(mid, 1)
    assert back == m_graph
    # the two equal chains of M come back swapped
    both = compose(f2, f)
    assert both(gen(sigma(1, 1))) == gen(sigma(2, 1))
    checked = 0
    for g in corpus(6, 3, 2):
        if len(set(g.labels())) != g.k:
            continue
        for i in range(1, g.k + 1):
            if not flippable(g, i):
                continue
            mid, f = partial_flip(g, i)
            j = next(n for n, lab in enumerate(mid.labels(), 1) if lab == tuple(reversed(g.labels()[i - 1])))
            back, f2 = partial_flip(mid, j)
            # areas may be adjusted to keep the graph valid, the skeleton is exact
            assert back.skeleton() == g.skeleton()
            both = compose(f2, f)
            assert all(same(g, both(gen(s)), gen(s)) for s in generators(g))
            checked += 1
    assert checked


def test_partial_flip_rejects_chain():
    g = minimal_cp2(2, 1, 1)
    assert not flippable(g, 1)
    with pytest.raises(MorphismError) as exc:
        partial_flip(g, 1)
    assert exc.value.code == "chain_not_flippable"


def test_full_flip_examples():
    g = minimal_cp2(2, 1, 1)
    h, f = full_flip(g)
    assert f(gen(sigma(2, 1))) == gen(sigma(2, 2))
    assert f.eps == -1
    h2, f2 = full_flip(h)
    assert h2 == g
    both = compose(f2, f)
    assert all(same(g, both(gen(s)), gen(s)) for s in generators(g))
    assert isotropy_weights(h) == negate_weights(isotropy_weights(g))


def test_symplectic_flip_composed_with_full_flip_is_minus_id():
    for g in small_corpus()[::5]:
        h, f = full_flip(g)
        _, s = symplectic_flip(h)
        both = compose(s, f)
        assert both.eps == -1
        for x in generators(g):
            assert same(g, both(gen(x)), scale(gen(x), -1))


def test_symplectic_flip_extremes():
    g = minimal_ruled(1, 1, 3, 1)
    _, f = symplectic_flip(g)
    assert f.eps == 1
    assert f(gen(TAU0)) == scale(gen(TAUINF), -1)
    assert f(gen(TAUINF)) == scale(gen(TAU0), -1)


def test_dull_iso_examples(m_graph, n_graph):
    assert dull_isomorphic(dull(m_graph), dull(n_graph)) is not None
    for g in small_corpus()[::3]:
        assert dull_isomorphic(dull(g), dull(full_flip(g)[0])) is not None
    assert dull_isomorphic(dull(minimal_cp2(2, 1, 1)), dull(minimal_cp2(3, 2, 1))) is None


def test_weak_iso_examples(m_graph, n_graph):
    v = weak_isomorphisms(m_graph, n_graph)
    assert v.isomorphic and [f.name for f in v.factors] == ["partial_flip(chain 2)"]
    assert v.format() == "isomorphic via: partial_flip(chain 2)"
    v = weak_isomorphisms(minimal_cp2(2, 1, 1), minimal_cp2(3, 2, 1))
    assert not v.isomorphic and v.witness == "label multiset"
    g1 = make_graph(0, 7, 1, [[(1, 1), (3, 3), (2, 2), (1, 1)]] * 2)
    g2 = make_graph(0, 14, 2, [[(1, 2), (3, 6), (2, 4), (1, 2)]] * 2)
    v = weak_isomorphisms(g1, g2)
    assert v.isomorphic and v.factors == () and v.format() == "isomorphic via: identity"
    assert not weak_isomorphisms(minimal_ruled(0, 1, 2, 0), minimal_ruled(1, 1, 2, 0)).isomorphic


def test_obstruction_examples(m_graph, n_graph):
    o = diffeo_obstruction(m_graph, n_graph)
    assert o.obstructed and o.reason == "weight multisets"
    for g in small_corpus()[::4]:
        assert not diffeo_obstruction(g, g).obstructed
        assert not diffeo_obstruction(g, full_flip(g)[0]).obstructed


@given(st.sampled_from(corpus(5, 3, 2)))
def test_flips_preserve_invariants(g):
    syms = generators(g)
    for f in produced_maps(g):
        assert f.problems() == []
        tgt = f.target
        for x in syms:
            c = gen(x)
            assert zero_length(tgt, f(c)) == zero_length(g, c)
            assert label_or_none(tgt, f(c)) == label_or_none(g, c)
        for n, x in enumerate(syms):
            for y in syms[n:]:
                assert intersect(tgt, f(gen(x)), f(gen(y))) == intersect(g, gen(x), gen(y))


def tau_triple(g):
    return [gen(s) if s in generators(g) else {} for s in (TAU0, TAUINF, TAUH)]


@given(st.sampled_from(corpus(5, 3, 2)))
def test_isomorphisms_fix_or_swap_taus(g):
    for f in produced_maps(g):
        if f.eps != 1:
            continue
        tgt = f.target
        t0, tinf, th = tau_triple(g)
        images = [f(c) for c in (t0, tinf, th)]
        u0, uinf, uh = tau_triple(tgt)
        straight = [u0, uinf, uh]
        swapped = [scale(uinf, -1), scale(u0, -1), scale(uh, -1)]
        ok = lambda want: all(same(tgt, a, b) for a, b in zip(images, want))
        assert ok(straight) or ok(swapped)


def test_weak_iso_agrees_with_dull_on_small_corpus():
    gs = small_corpus()
    for a in gs[::3]:
        for b in gs[::5]:
            v = weak_isomorphisms(a, b)
            d = dull_isomorphic(dull(a), dull(b)) is not None and a.genus == b.genus
            assert v.isomorphic == d
            if v.isomorphic:
                assert v.composite.problems() == []


def test_counterexample_weights(m_graph, n_graph):
    trip = [(-1, 3), (-3, 2), (-2, 1)]
    assert isotropy_weights(m_graph) == tuple(sorted(trip * 2))
    assert isotropy_weights(n_graph) != isotropy_weights(m_graph)
    assert isotropy_weights(n_graph) != negate_weights(isotropy_weights(m_graph))
    assert graph_m() == m_graph and graph_n() == n_graph
