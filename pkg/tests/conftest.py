"""Shared fixtures and independent brute-force oracles.

The oracles here deliberately avoid the library's own enumeration strategies:
automorphisms come from filtering all vertex bijections, partial automorphisms
from filtering all injective partial maps, and members from filtering raw
label assignments.  Tests compare library output against these.
"""

from __future__ import annotations

import itertools
import random

import pytest

from antipodal import (Automorphism, ClassDescriptor, EdgeLabelledGraph,
                       PartialMap, is_forbidden_triangle)


def graph(vertices, delta, edges=()):
    return EdgeLabelledGraph(vertices, delta, edges)


@pytest.fixture
def edge3():
    """A single pair at distance 3."""
    return graph("uv", 3, [("u", "v", 3)])


@pytest.fixture
def quadruple():
    """The four-point member of the diameter-3 antipodal family."""
    return graph("uvwx", 3, [("u", "v", 3), ("w", "x", 3),
                             ("u", "w", 1), ("v", "x", 1),
                             ("u", "x", 2), ("v", "w", 2)])


@pytest.fixture
def desc31():
    return ClassDescriptor(3, 1)


def brute_automorphisms(g: EdgeLabelledGraph) -> list[Automorphism]:
    """Oracle: filter all vertex bijections for label-pattern preservation."""
    out = []
    verts = g.vertices
    for images in itertools.permutations(verts):
        m = dict(zip(verts, images))
        if all(g.dist(u, v) == g.dist(m[u], m[v])
               for u, v in itertools.combinations(verts, 2)):
            out.append(Automorphism(frozenset(m.items())))
    return out


def brute_partial_automorphisms(g: EdgeLabelledGraph) -> set[PartialMap]:
    """Oracle: filter all injective partial maps for label-pattern preservation."""
    verts = g.vertices
    out = set()
    for k in range(len(verts) + 1):
        for dom in itertools.combinations(verts, k):
            for img in itertools.permutations(verts, k):
                m = dict(zip(dom, img))
                if all(g.dist(a, b) == g.dist(m[a], m[b])
                       for a, b in itertools.combinations(dom, 2)):
                    out.add(PartialMap(frozenset(m.items())))
    return out


def all_complete_graphs(vertices, delta):
    """Every complete labelling of the given vertices."""
    verts = tuple(vertices)
    pairs = list(itertools.combinations(verts, 2))
    for labels in itertools.product(range(1, delta + 1), repeat=len(pairs)):
        yield EdgeLabelledGraph(
            verts, delta, [(u, v, l) for (u, v), l in zip(pairs, labels)])


def brute_is_member(g: EdgeLabelledGraph, desc) -> bool:
    """Oracle membership: scan all triples with the triangle predicate."""
    for a, b, c in itertools.combinations(g.vertices, 3):
        if is_forbidden_triangle(g.dist(a, b), g.dist(a, c), g.dist(b, c), desc):
            return False
    return True


def perfect_matchings(items):
    """All pairings of an even-sized sequence."""
    items = list(items)
    if not items:
        yield []
        return
    first = items[0]
    for i in range(1, len(items)):
        rest = items[1:i] + items[i + 1:]
        for sub in perfect_matchings(rest):
            yield [(first, items[i])] + sub


def matched_members(vertices, desc: ClassDescriptor):
    """All members on the given vertices whose long edges match perfectly.

    Built from the antipodal correspondence: a matching plus the distances
    between canonical representatives determine the whole space.  Everything
    constructed is filtered through the brute-force membership oracle, so this
    is an independent enumeration.
    """
    verts = tuple(vertices)
    delta = desc.delta
    if len(verts) % 2:
        return
    for matching in perfect_matchings(verts):
        m = len(matching)
        cross = list(itertools.combinations(range(m), 2))
        for bs in itertools.product(range(1, delta), repeat=len(cross)):
            edges = [(x, y, delta) for x, y in matching]
            for (i, j), b in zip(cross, bs):
                xi, yi = matching[i]
                xj, yj = matching[j]
                edges += [(xi, xj, b), (yi, yj, b),
                          (xi, yj, delta - b), (yi, xj, delta - b)]
            g = EdgeLabelledGraph(verts, delta, edges)
            if brute_is_member(g, desc):
                yield g


def brute_completions(g: EdgeLabelledGraph, desc, limit=None):
    """All complete members extending ``g``, by depth-first label assignment.

    Independent of the folded completion path: it works directly on raw pairs
    with triangle pruning only.
    """
    holes = g.undefined_pairs()
    out = []

    def ok(filled, u, v, label):
        for w in g.vertices:
            if w in (u, v):
                continue
            a = filled.get(frozenset((u, w)))
            b = filled.get(frozenset((v, w)))
            if a is not None and b is not None and is_forbidden_triangle(label, a, b, desc):
                return False
        return True

    filled = {frozenset((u, v)): l for u, v, l in g.edges()}

    def rec(pos):
        if limit is not None and len(out) > limit:
            return
        if pos == len(holes):
            out.append(dict(filled))
            return
        u, v = holes[pos]
        for label in range(1, desc.delta + 1):
            if ok(filled, u, v, label):
                filled[frozenset((u, v))] = label
                rec(pos + 1)
                del filled[frozenset((u, v))]

    rec(0)
    return out


def random_connected_partial(rng: random.Random, n: int, max_label: int,
                             extra_prob: float = 0.35) -> EdgeLabelledGraph:
    """Random connected partial graph: a random spanning tree plus extras."""
    verts = tuple(f"v{i}" for i in range(n))
    edges = {}
    order = list(range(1, n))
    rng.shuffle(order)
    connected = [0]
    for i in order:
        j = rng.choice(connected)
        edges[frozenset((verts[i], verts[j]))] = rng.randint(1, max_label)
        connected.append(i)
    for a, b in itertools.combinations(range(n), 2):
        key = frozenset((verts[a], verts[b]))
        if key not in edges and rng.random() < extra_prob:
            edges[key] = rng.randint(1, max_label)
    return EdgeLabelledGraph(
        verts, max_label, [(min(k, key=str), max(k, key=str), l)
                           for k, l in sorted(edges.items(), key=lambda e: sorted(map(str, e[0])))])
