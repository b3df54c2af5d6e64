"""Recover graphs from algebraic data.

The input is a set of opaque generator ids with an integer pairing, the
designated extremal elements and the genus.  ``recover_dull`` rebuilds the
chains and labels; ``recover_decorated`` also uses symplectic areas to
rebuild heights and fat areas.

Chains are rebuilt by walking down from the elements that meet the top
extreme.  Along a chain the labels satisfy

    m[j-1] = -m[j] * (x_j . x_j) - m[j+1]

with ``m[l+1] = 0`` below a fat maximum and ``m[l+1] = -m'`` below an
isolated one (``m'`` the top label of the other chain).  A walk stops when
the next label is not positive (a fat minimum gives 0, an isolated minimum
gives minus the partner's bottom label) or when no unplaced neighbour is
left, in which case the missing bottom edge is an omitted ephemeral class.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx

from .classes import TAU0, TAUINF, gen, sigma
from .graph_model import (DullGraph, ExtendedGraph, GraphError, canonical_dull, canonicalize, chain_core, fmt_rational,
                          make_graph, parse_rational, validate)
from .localization import integrate, intersect, omega_pairing, restrict

FORMAL = ("tau_min", "tau_max")


class ReconstructionError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def _key(a, b):
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class AlgebraicInput:
    generators: tuple
    tau_min: object  # id, or a pair of generator ids for an isolated extreme
    tau_max: object
    genus: int
    pairing: dict = field(hash=False)  # sorted id pair -> int; "tau_min"/"tau_max" for formal products
    omega: dict | None = field(default=None, hash=False)

    def pair(self, a, b) -> int:
        return self.pairing.get(_key(a, b), 0)

    def with_max(self, x) -> int:
        return self.pair(self.tau_max if isinstance(self.tau_max, str) else "tau_max", x)

    def to_obj(self) -> dict:
        d = {
            "generators": list(self.generators),
            "tau_min": self.tau_min if isinstance(self.tau_min, str) else list(self.tau_min),
            "tau_max": self.tau_max if isinstance(self.tau_max, str) else list(self.tau_max),
            "genus": self.genus,
            "pairing": [[a, b, v] for (a, b), v in sorted(self.pairing.items())],
        }
        if self.omega is not None:
            d["omega"] = [[x, fmt_rational(v)] for x, v in sorted(self.omega.items())]
        return d


def input_from_obj(obj: dict) -> AlgebraicInput:
    try:
        gens = tuple(obj["generators"])
        tmin = obj["tau_min"] if isinstance(obj["tau_min"], str) else tuple(obj["tau_min"])
        tmax = obj["tau_max"] if isinstance(obj["tau_max"], str) else tuple(obj["tau_max"])
        genus = int(obj["genus"])
        pairing = {}
        for a, b, v in obj["pairing"]:
            k = _key(a, b)
            if k in pairing and pairing[k] != v:
                raise ReconstructionError("asymmetric_pairing", f"conflicting pairing entries for {a}, {b}")
            if v:
                pairing[k] = int(v)
        omega = None
        if "omega" in obj:
            omega = {x: parse_rational(v, f"omega.{x}") for x, v in obj["omega"]}
    except (KeyError, TypeError, ValueError, GraphError) as exc:
        if isinstance(exc, ReconstructionError):
            raise
        raise ReconstructionError("malformed_input", f"malformed algebraic input: {exc}") from None
    return AlgebraicInput(gens, tmin, tmax, genus, pairing, omega)


def parse_input(text: str) -> AlgebraicInput:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ReconstructionError("syntax", f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return input_from_obj(obj)


def dump_input(inp: AlgebraicInput) -> str:
    return json.dumps(inp.to_obj(), indent=2)


# ------------------------------------------------------------ from a graph


def omitted(g: ExtendedGraph) -> set:
    """Classes left out of the generator set: bottom edges of chains i >= 3 below a lone fat maximum."""
    if g.fat_count == 1 and g.max.fat:
        return {sigma(i, 1) for i in range(3, g.k + 1)}
    return set()


def algebraic_input(g: ExtendedGraph, seed: int = 0, with_omega: bool = True) -> AlgebraicInput:
    """The algebraic data of a graph under shuffled opaque ids (the xi-image when ``with_omega``)."""
    g = canonicalize(g)
    if g.fat_count == 1 and g.min.fat:
        raise ReconstructionError("orientation", "a lone fat extreme must be the maximum")
    sk = g.skeleton()
    syms = [sigma(i, j) for i in range(1, g.k + 1) for j in range(1, g.ell(i) + 1)]
    syms = [s for s in syms if s not in omitted(g)]
    extra = ([TAU0] if g.min.fat else []) + ([TAUINF] if g.max.fat else [])
    rng = random.Random(seed)
    everything = syms + extra
    order = list(range(len(everything)))
    rng.shuffle(order)
    names = {}
    for n, pos in enumerate(order):
        names[everything[pos]] = f"g{n:02d}{rng.getrandbits(16):04x}"
    gens = tuple(sorted(names[s] for s in syms))
    pairing = {}
    for a in everything:
        for b in everything:
            v = int(intersect(sk, gen(a), gen(b)))
            if v:
                pairing[_key(names[a], names[b])] = v

    def formal(lo_sym, hi_sym, key):
        for x in syms:
            v = integrate(sk, restrict(sk, [gen(lo_sym), gen(hi_sym), gen(x)])).get(1, 0)
            if v:
                pairing[_key(key, names[x])] = int(v)
        return (names[lo_sym], names[hi_sym])

    tmin = names[TAU0] if g.min.fat else formal(sigma(1, 1), sigma(2, 1), "tau_min")
    tmax = names[TAUINF] if g.max.fat else formal(sigma(1, g.ell(1)), sigma(2, g.ell(2)), "tau_max")
    omega = None
    if with_omega:
        omega = {names[s]: omega_pairing(g, gen(s)) for s in everything}
    return AlgebraicInput(gens, tmin, tmax, g.genus, pairing, omega)


# ------------------------------------------------------------ recovery


@dataclass(frozen=True)
class RecoveredChain:
    ids: tuple  # generator ids bottom to top; None marks an omitted bottom edge
    labels: tuple


def _bad(msg):
    raise ReconstructionError("inconsistent_input", f"inconsistent input: {msg}")


def recover_chains(inp: AlgebraicInput) -> list:
    """Chains bottom to top, ordered by pairing with the top extreme, ties by labels."""
    fat_max = isinstance(inp.tau_max, str)
    fat_min = isinstance(inp.tau_min, str)
    gens = list(inp.generators)
    gset = set(gens)
    for x in ([] if fat_max else list(inp.tau_max)) + ([] if fat_min else list(inp.tau_min)):
        if x not in gset:
            _bad(f"formal extreme refers to unknown id {x}")
    adj = {x: [y for y in gens if y != x and inp.pair(x, y)] for x in gens}
    tops = sorted((x for x in gens if inp.with_max(x)), key=lambda x: (-inp.with_max(x), x))
    if not tops:
        _bad("nothing meets the top extreme")
    if fat_max:
        start = {x: (1, 0) for x in tops}
    else:
        if len(tops) != 2:
            _bad("an isolated maximum needs exactly two top edges")
        a, b = tops
        start = {a: (inp.with_max(b), -inp.with_max(a)), b: (inp.with_max(a), -inp.with_max(b))}
    tmin_ids = set() if fat_min else set(inp.tau_min)

    def walks(x, m, above, placed):
        """Every way to finish a chain whose current top-most unfinished edge is x."""
        nxt = -m * inp.pair(x, x) - above
        if nxt <= 0:
            if not fat_min or nxt == 0:
                yield [], nxt, placed
            return
        for y in sorted(y for y in adj[x] if y not in placed):
            for rest, cross, used in walks(y, nxt, m, placed | {y}):
                yield [(y, nxt)] + rest, cross, used
        if fat_max and not fat_min:
            yield [(None, nxt)], None, placed

    def closes(chains):
        reach = [(c, x) for c, x in chains if x is not None and x < 0]
        if len(reach) != 2:
            return False
        (c1, x1), (c2, x2) = reach
        return -x1 == c2.labels[0] and -x2 == c1.labels[0] and {c1.ids[0], c2.ids[0]} == tmin_ids

    def search(n, placed, done):
        if n == len(tops):
            if placed != gset or (not fat_min and not closes(done)):
                return None
            return [c for c, _ in done]
        top = tops[n]
        m, above = start[top]
        if m <= 0:
            return None
        for rest, cross, used in walks(top, m, above, placed):
            steps = [(top, m)] + rest
            chain = RecoveredChain(tuple(x for x, _ in reversed(steps)), tuple(v for _, v in reversed(steps)))
            found = search(n + 1, used, done + [(chain, cross)])
            if found is not None:
                return found
        return None

    chains = search(0, frozenset(tops), [])
    if chains is None:
        _bad("no consistent assignment of generators to chains")
    if not fat_max and set(inp.tau_max) != set(tops):
        _bad("tau_max does not match the top edges")
    if fat_max and any(inp.with_max(x) != 1 for x in tops):
        _bad("top edges must meet a fat maximum once")
    return sorted(chains, key=lambda c: (-inp.with_max(c.ids[-1]), tuple(-v for v in c.labels)))


def _extreme(inp, tau):
    if isinstance(tau, str):
        return ("fat", inp.pair(tau, tau))
    return ("iso",)


def recover_dull(inp: AlgebraicInput) -> DullGraph:
    chains = recover_chains(inp)
    comps = [chain_core(c.labels) for c in chains]
    return canonical_dull(inp.genus, _extreme(inp, inp.tau_min), _extreme(inp, inp.tau_max),
                          [c for c in comps if c is not None])


def recover_decorated(inp: AlgebraicInput, max_hidden: int = 64) -> ExtendedGraph:
    """The graph with heights and areas, from areas of all generators and fat extremes."""
    need = list(inp.generators) + [t for t in (inp.tau_min, inp.tau_max) if isinstance(t, str)]
    if inp.omega is None or any(x not in inp.omega for x in need):
        missing = [x for x in need if inp.omega is None or x not in inp.omega]
        raise ReconstructionError("missing_omega", f"missing symplectic area for {', '.join(missing)}")
    chains = recover_chains(inp)
    tops = set()
    for c in chains:
        if None not in c.ids:
            tops.add(sum((m * inp.omega[x] for x, m in zip(c.ids, c.labels)), Fraction(0)))
    if len(tops) != 1:
        _bad("chains have different heights")
    top = tops.pop()
    built = []
    for c in chains:
        known = sum((m * inp.omega[x] for x, m in zip(c.ids, c.labels) if x is not None), Fraction(0))
        built.append([(m, inp.omega[x] * m if x is not None else top - known) for x, m in zip(c.ids, c.labels)])
    lo = inp.omega[inp.tau_min] if isinstance(inp.tau_min, str) else None
    hi = inp.omega[inp.tau_max] if isinstance(inp.tau_max, str) else None
    e_max = inp.pair(inp.tau_max, inp.tau_max) if isinstance(inp.tau_max, str) else None
    # a lone fat maximum may hide label-1 chains made of a single omitted edge
    hidden_ok = hi is not None and lo is None
    for hidden in range(max_hidden + 1 if hidden_ok else 1):
        trial = built + [[(1, top)]] * hidden
        try:
            g = make_graph(inp.genus, lo, hi, trial)
        except GraphError:
            continue
        if validate(g):
            continue
        if e_max is not None and g.skeleton().e_max != e_max:
            continue
        return g
    raise ReconstructionError("invalid_graph", "the assembled graph does not validate")


# ------------------------------------------------------------ xi-images


def xi_graph(inp: AlgebraicInput) -> nx.Graph:
    """The xi-image as a weighted graph: nodes carry areas and extreme marks, edges carry pairings."""
    h = nx.Graph()
    for x in inp.generators:
        h.add_node(x, mark="gen", area=None if inp.omega is None else inp.omega.get(x), selfint=inp.pair(x, x))
    for name, tau in zip(FORMAL, (inp.tau_min, inp.tau_max)):
        if isinstance(tau, str):
            h.add_node(tau, mark=name, area=None if inp.omega is None else inp.omega.get(tau), selfint=inp.pair(tau, tau))
        else:
            h.add_node(name, mark=name, area=None, selfint=None)
    for (a, b), v in inp.pairing.items():
        if a != b:
            h.add_edge(a, b, w=v)
    return h


def same_xi_image(a: AlgebraicInput, b: AlgebraicInput) -> bool:
    """True when the two weighted pairing graphs are isomorphic."""
    node = nx.algorithms.isomorphism.categorical_node_match(["mark", "area", "selfint"], [None, None, None])
    edge = nx.algorithms.isomorphism.categorical_edge_match("w", 0)
    return a.genus == b.genus and nx.is_isomorphic(xi_graph(a), xi_graph(b), node_match=node, edge_match=edge)


def xi_hash(inp: AlgebraicInput) -> str:
    h = xi_graph(inp)
    for n, d in h.nodes(data=True):
        d["key"] = f"{d['mark']}|{d['area']}|{d['selfint']}"
    for _, _, d in h.edges(data=True):
        d["key"] = str(d["w"])
    return f"{inp.genus}:" + nx.weisfeiler_lehman_graph_hash(h, node_attr="key", edge_attr="key")
