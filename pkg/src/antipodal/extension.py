"""Partial-automorphism extension recipe, witness verification, and search.

A witness for a structure is a superstructure in which every partial
automorphism of the structure extends to a full automorphism.  Verification
here is exhaustive and desk-scale: it enumerates every partial automorphism
and hunts for the lexicographically least extension, so reports are
reproducible.  For marked structures a partial automorphism carries a whole
language permutation next to the partial vertex map, and an extension must
keep that language part exactly.

The extension recipe turns a plain partial automorphism of a perfectly
matched member into a verified marked-structure partial automorphism of its
suitable expansion: close the domain under mates, extend the index action
order-preservingly, and flip exactly the index pairs where the image's
valuations disagree with the source's.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator

from .completion import OrientationSet, _orientation_args
from .errors import InputError, SizeLimitError
from .membership import (ClassDescriptor, Variant, antipodal_closure,
                         delta_matching, is_forbidden_triangle, is_member,
                         parity_parts)
from .structures import (Automorphism, EdgeLabelledGraph, PartialMap,
                         automorphisms, partial_automorphisms)
from .valuations import (FlipSet, GammaLStructure, IndexPermutation,
                         LanguagePermutation, ValuationFunction,
                         build_suitable_expansion, flip_permute,
                         is_suitable_expansion, pad_bipartition)

FREE_FLIP_BOUND = 20  # free index-pair count above which enumeration refuses


@dataclass(frozen=True)
class GammaPartialAutomorphism:
    """A language permutation paired with a partial vertex map."""

    lang: LanguagePermutation
    vmap: PartialMap

    def __repr__(self):
        return f"({self.lang}, {self.vmap!r})"


@dataclass
class WitnessReport:
    """Outcome of a witness audit over every partial automorphism."""

    ok: bool
    mode: str
    checked: int
    counterexample: object = None
    extension_table: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.ok != (self.counterexample is None):
            raise InputError("report is ok exactly when there is no counterexample")


def _check_substructure(small: EdgeLabelledGraph, big: EdgeLabelledGraph):
    if small.delta != big.delta:
        raise InputError("structures use different diameter bounds")
    for v in small.vertices:
        if v not in big:
            raise InputError(f"vertex {v!r} of the substructure is missing")
    for u, v in small.pairs():
        if small.dist(u, v) != big.dist(u, v):
            raise InputError(
                f"pair ({u!r}, {v!r}) differs between structure and superstructure")


def _check_gamma_substructure(small: GammaLStructure, big: GammaLStructure):
    _check_substructure(small.base, big.base)
    for v in small.vertices:
        if small.mate(v) != big.mate(v):
            raise InputError(f"mate of {v!r} differs between structure and superstructure")
        if small.mark(v) != big.mark(v):
            raise InputError(f"mark of {v!r} differs between structure and superstructure")
    if small.mark_size is not None and big.mark_size is not None and \
            small.mark_size != big.mark_size:
        raise InputError("structures use different valuation sizes")


def _least_plain_extension(big: EdgeLabelledGraph, seed: PartialMap):
    """Lexicographically least automorphism of ``big`` extending ``seed``."""
    verts = big.vertices
    assigned = dict(seed.pairs)
    used = set(assigned.values())
    todo = [v for v in verts if v not in assigned]

    def consistent(v, t):
        return all(big.dist(v, s) == big.dist(t, ft) for s, ft in assigned.items())

    def rec(k: int):
        if k == len(todo):
            return Automorphism(frozenset(assigned.items()))
        v = todo[k]
        for t in verts:
            if t in used or not consistent(v, t):
                continue
            assigned[v] = t
            used.add(t)
            out = rec(k + 1)
            if out is not None:
                return out
            del assigned[v]
            used.remove(t)
        return None

    return rec(0)


def _least_gamma_extension(big: GammaLStructure, lang: LanguagePermutation,
                           seed: PartialMap):
    """Least total vertex map of ``big`` that, with ``lang``, is an automorphism."""
    verts = big.vertices
    base = big.base
    assigned = dict(seed.pairs)
    used = set(assigned.values())
    todo = [v for v in verts if v not in assigned]

    def mark_ok(v, t):
        mv, mt = big.mark(v), big.mark(t)
        if (mv is None) != (mt is None):
            return False
        return mv is None or lang.act(mv) == mt

    def consistent(v, t):
        if not mark_ok(v, t):
            return False
        mate = big.mate(v)
        if (mate is None) != (big.mate(t) is None):
            return False
        if mate is not None and mate in assigned and assigned[mate] != big.mate(t):
            return False
        for s, ft in assigned.items():
            if base.dist(v, s) != base.dist(t, ft):
                return False
            if big.mate(s) == v and big.mate(ft) != t:
                return False
        return True

    def rec(k: int):
        if k == len(todo):
            return Automorphism(frozenset(assigned.items()))
        v = todo[k]
        for t in verts:
            if t in used or not consistent(v, t):
                continue
            assigned[v] = t
            used.add(t)
            out = rec(k + 1)
            if out is not None:
                return out
            del assigned[v]
            used.remove(t)
        return None

    for s, t in list(seed.pairs):
        if not mark_ok(s, t):
            return None
    return rec(0)


def _gamma_vertex_maps(structure: GammaLStructure, *, partial: bool) -> Iterator[PartialMap]:
    """Vertex maps preserving distances, mates, and the mark pattern.

    Domains are closed under the mate map.  The mark pattern constraint is
    necessary only (marked goes to marked, shared indices stay shared); the
    caller pairs each map with its compatible language permutations.
    """
    verts = structure.vertices
    base = structure.base
    n = len(verts)

    def consistent(pairs: list, v, t):
        mv, mt = structure.mark(v), structure.mark(t)
        if (mv is None) != (mt is None):
            return False
        mate = structure.mate(v)
        if (mate is None) != (structure.mate(t) is None):
            return False
        for s, ft in pairs:
            if base.dist(v, s) != base.dist(t, ft):
                return False
            ms = structure.mark(s)
            if mv is not None and ms is not None:
                if (mv[0] == ms[0]) != (mt[0] == structure.mark(ft)[0]):
                    return False
            if mate is not None and s == mate and ft != structure.mate(t):
                return False
            if structure.mate(s) == v and structure.mate(ft) != t:
                return False
        return True

    def rec(k: int, pairs: list, used: set, dropped: set) -> Iterator[PartialMap]:
        if k == n:
            yield PartialMap(frozenset(pairs))
            return
        v = verts[k]
        if partial and all(structure.mate(s) != v for s, _ in pairs):
            dropped.add(v)
            yield from rec(k + 1, pairs, used, dropped)
            dropped.remove(v)
        mate = structure.mate(v)
        if mate is not None and mate in dropped:
            return
        for t in verts:
            if t in used or not consistent(pairs, v, t):
                continue
            pairs.append((v, t))
            used.add(t)
            yield from rec(k + 1, pairs, used, dropped)
            pairs.pop()
            used.remove(t)

    yield from rec(0, [], set(), set())


def compatible_language_parts(structure: GammaLStructure, vmap: PartialMap,
                              lang_partition: tuple[frozenset, frozenset] | None = None
                              ) -> list[LanguagePermutation]:
    """All language permutations under which ``vmap`` transports the marks.

    Index rows touched by the domain are forced; the index action is completed
    by every permutation of the untouched indices (partition-preserving ones
    only, when an index bipartition is given), and index pairs with both ends
    untouched are free flip choices.
    """
    m = structure.mark_size or 0
    if m == 0:
        return [LanguagePermutation.identity(0)]
    index_map: dict[int, int] = {}
    for s, t in vmap.pairs:
        ms, mt = structure.mark(s), structure.mark(t)
        if (ms is None) != (mt is None):
            return []
        if ms is None:
            continue
        if index_map.setdefault(ms[0], mt[0]) != mt[0]:
            return []
    if len(set(index_map.values())) != len(index_map):
        return []
    sources = [i for i in range(1, m + 1) if i not in index_map]
    target_pool = [i for i in range(1, m + 1) if i not in set(index_map.values())]
    out: list[LanguagePermutation] = []
    for perm in itertools.permutations(target_pool):
        mapping = dict(index_map)
        mapping.update(zip(sources, perm))
        psi = IndexPermutation.from_mapping(m, mapping)
        if lang_partition is not None and psi.partition_action(*lang_partition) is None:
            continue
        rows: dict[int, frozenset] = {}
        good = True
        for s, t in vmap.pairs:
            ms = structure.mark(s)
            if ms is None:
                continue
            i, chi = ms
            tchi = structure.mark(t)[1]
            row = frozenset(j for j in range(1, m + 1) if tchi(psi(j)) != chi(j))
            if rows.setdefault(i, row) != row:
                good = False
                break
        if good:
            for i in rows:
                for j in rows:
                    if (j in rows[i]) != (i in rows[j]):
                        good = False
        if not good:
            continue
        forced = set()
        for i, row in rows.items():
            for j in row:
                forced.add((i, j))
                forced.add((j, i))
        free_indices = [j for j in range(1, m + 1) if j not in rows]
        free_pairs = [(a, b) for ai, a in enumerate(free_indices)
                      for b in free_indices[ai:]]
        if len(free_pairs) > FREE_FLIP_BOUND:
            raise SizeLimitError(
                f"too many free flip pairs ({len(free_pairs)}) to enumerate",
                FREE_FLIP_BOUND)
        for picks in itertools.product((False, True), repeat=len(free_pairs)):
            chosen = set(forced)
            for pick, (a, b) in zip(picks, free_pairs):
                if pick:
                    chosen.add((a, b))
                    chosen.add((b, a))
            out.append(LanguagePermutation(psi, FlipSet(frozenset(chosen))))
    out.sort(key=lambda g: (g.psi.images, g.flips.sorted_pairs()))
    return out


def gamma_automorphisms(structure: GammaLStructure, *, max_vertices: int = 12,
                        lang_partition: tuple[frozenset, frozenset] | None = None
                        ) -> list[GammaPartialAutomorphism]:
    """All automorphisms of a marked structure, as (language, vertex map) pairs."""
    if len(structure) > max_vertices:
        raise SizeLimitError(
            f"automorphism enumeration is bounded at {max_vertices} vertices",
            max_vertices)
    out = []
    for vmap in _gamma_vertex_maps(structure, partial=False):
        for lang in compatible_language_parts(structure, vmap, lang_partition):
            out.append(GammaPartialAutomorphism(lang, Automorphism(vmap.pairs)))
    return out


def gamma_partial_automorphisms(structure: GammaLStructure,
                                lang_partition: tuple[frozenset, frozenset] | None = None
                                ) -> Iterator[GammaPartialAutomorphism]:
    """Every partial automorphism of a marked structure, lazily."""
    for vmap in _gamma_vertex_maps(structure, partial=True):
        for lang in compatible_language_parts(structure, vmap, lang_partition):
            yield GammaPartialAutomorphism(lang, vmap)


def _canonical_layout(expansion: GammaLStructure, desc: ClassDescriptor):
    """Matching of the base, verified against the expansion's mark indices."""
    matching = delta_matching(expansion.base, desc, require_perfect=True)
    for i, (x, y) in enumerate(matching.edges, start=1):
        if expansion.mark_index(x) != i or expansion.mark_index(y) != i:
            raise InputError(
                "expansion does not use the canonical matching enumeration; "
                "build it with build_suitable_expansion")
    return matching


def extend_partial_automorphism(expansion: GammaLStructure, phi,
                                desc: ClassDescriptor,
                                orientation: OrientationSet | None = None
                                ) -> GammaPartialAutomorphism:
    """Lift a plain partial automorphism to the suitable expansion.

    The domain is first closed under mates (the lift of a mate is forced).
    The index action of the closed map is extended to a full index permutation
    order-preservingly; in the bipartite case within each part, swapping the
    parts only when the map itself does.  A pair ``(i, j)`` is flipped exactly
    when the image of edge ``i``'s representative disagrees with its source on
    the reindexed bit ``j``.  The pair is audited against the marked structure
    before it is returned; an audit failure is a hard error, never a silent
    result.
    """
    _orientation_args(desc, orientation)
    graph = expansion.reduct()
    matching = _canonical_layout(expansion, desc)
    if not isinstance(phi, PartialMap):
        phi = PartialMap.of(phi)
    for v in phi.domain | phi.image:
        if v not in graph:
            raise InputError(f"map uses unknown vertex {v!r}")
    if not phi.preserves_labels(graph):
        raise InputError("the map is not a partial automorphism (labels break)")
    closed = phi.mapping()
    for u in list(closed):
        mate = matching.mate(u)
        forced = matching.mate(closed[u])
        if closed.setdefault(mate, forced) != forced:
            raise InputError("the map tears a mated pair apart")
    closed_map = PartialMap.of(closed)
    if not closed_map.preserves_labels(graph):
        raise RuntimeError("internal: mate closure broke label preservation")

    m = matching.m
    index_map: dict[int, int] = {}
    for i, (x, _) in enumerate(matching.edges, start=1):
        if x in closed:
            index_map[i] = matching.index_of(closed[x])
    if len(set(index_map.values())) != len(index_map):
        raise RuntimeError("internal: index action of an injective map collided")
    if desc.variant is Variant.EVEN_BIPARTITE:
        d_one, d_two = matching.part_one, matching.part_two
        swap = None
        for i, ti in index_map.items():
            crosses = (i in d_one) != (ti in d_one)
            if swap is None:
                swap = crosses
            elif swap != crosses:
                raise RuntimeError("internal: inconsistent part action")
        swap = bool(swap)
        mapping = dict(index_map)
        for src_part, tgt_part in ((d_one, d_two if swap else d_one),
                                   (d_two, d_one if swap else d_two)):
            srcs = sorted(i for i in src_part if i not in index_map)
            tgts = sorted(t for t in tgt_part if t not in set(index_map.values()))
            if len(srcs) != len(tgts):
                raise InputError("index parts cannot be matched; pad the bipartition")
            mapping.update(zip(srcs, tgts))
    else:
        mapping = dict(index_map)
        srcs = sorted(i for i in range(1, m + 1) if i not in index_map)
        tgts = sorted(t for t in range(1, m + 1) if t not in set(index_map.values()))
        mapping.update(zip(srcs, tgts))
    psi = IndexPermutation.from_mapping(m, mapping)

    pairs = set()
    for i, (x, _) in enumerate(matching.edges, start=1):
        if x not in closed:
            continue
        chi = expansion.valuation(x)
        target_chi = expansion.valuation(closed[x])
        for j in range(1, m + 1):
            if target_chi(psi(j)) != chi(j):
                pairs.add((i, j))
                pairs.add((j, i))
    flips = FlipSet(frozenset(pairs))
    lang = LanguagePermutation(psi, flips)

    for v, fv in closed.items():
        if expansion.mark_index(fv) != psi(expansion.mark_index(v)):
            raise RuntimeError("internal: index transport failed the audit")
        expected = flip_permute(expansion.valuation(v),
                                flips.row(expansion.mark_index(v)), psi)
        if expansion.valuation(fv) != expected:
            raise RuntimeError("internal: valuation transport failed the audit")
        if closed.get(matching.mate(v)) != matching.mate(fv):
            raise RuntimeError("internal: mate transport failed the audit")
    return GammaPartialAutomorphism(lang, closed_map)


def verify_eppa_witness(small, big, mode: str = "plain", *,
                        max_domain: int = 6, max_witness: int = 12,
                        lang_partition: tuple[frozenset, frozenset] | None = None
                        ) -> WitnessReport:
    """Audit the extension property of ``big`` over ``small`` exhaustively.

    Plain mode checks every label-preserving partial map; marked mode checks
    every (language permutation, partial map) pair and demands an extension
    with exactly the same language part.  The first failing partial
    automorphism in canonical order becomes the counterexample; on success the
    table records the least extension of each.
    """
    if mode not in ("plain", "gamma"):
        raise InputError(f"unknown mode {mode!r}")
    if len(small) > max_domain:
        raise SizeLimitError(
            f"witness audit enumerates at most {max_domain} structure vertices",
            max_domain)
    if len(big) > max_witness:
        raise SizeLimitError(
            f"witness audit enumerates at most {max_witness} witness vertices",
            max_witness)
    table: dict = {}
    checked = 0
    if mode == "plain":
        if not isinstance(small, EdgeLabelledGraph) or not isinstance(big, EdgeLabelledGraph):
            raise InputError("plain mode works on edge-labelled graphs")
        _check_substructure(small, big)
        for pm in partial_automorphisms(small):
            checked += 1
            ext = _least_plain_extension(big, pm)
            if ext is None:
                return WitnessReport(False, mode, checked, counterexample=pm)
            table[pm] = ext
        return WitnessReport(True, mode, checked, extension_table=table)
    if not isinstance(small, GammaLStructure) or not isinstance(big, GammaLStructure):
        raise InputError("gamma mode works on marked structures")
    _check_gamma_substructure(small, big)
    for gpa in gamma_partial_automorphisms(small, lang_partition):
        checked += 1
        ext = _least_gamma_extension(big, gpa.lang, gpa.vmap)
        if ext is None:
            return WitnessReport(False, mode, checked, counterexample=gpa)
        table[gpa] = GammaPartialAutomorphism(gpa.lang, ext)
    return WitnessReport(True, mode, checked, extension_table=table)


def verify_irreducible_faithful(small: EdgeLabelledGraph, big: EdgeLabelledGraph,
                                *, max_witness: int = 12) -> bool:
    """Every complete induced substructure of ``big`` maps into ``small``
    under some automorphism of ``big``."""
    _check_substructure(small, big)
    if len(big) > max_witness:
        raise SizeLimitError(
            f"faithfulness audit enumerates at most {max_witness} vertices", max_witness)
    auts = automorphisms(big, max_vertices=max_witness)
    small_set = set(small.vertices)
    verts = big.vertices
    for r in range(1, len(verts) + 1):
        for combo in itertools.combinations(verts, r):
            if not big.induced(combo).is_complete():
                continue
            if not any(all(g[c] in small_set for c in combo) for g in auts):
                return False
    return True


def _fresh_names(prefix: str, count: int, taken: set) -> list[str]:
    out = []
    i = 1
    while len(out) < count:
        name = f"{prefix}{i}"
        while name in taken:
            name += "+"
        taken.add(name)
        out.append(name)
        i += 1
    return out


def witness_candidates(graph: EdgeLabelledGraph, desc: ClassDescriptor,
                       max_vertices: int) -> Iterator[EdgeLabelledGraph]:
    """Members with a perfect matching containing ``graph``, smallest first.

    Fresh vertices are interchangeable until labelled, so the matching layout
    is canonical: each unmatched input vertex mates the next fresh vertex, and
    leftover fresh vertices pair up consecutively.  Only the folded distances
    between fresh edges remain free; they are enumerated in canonical order
    with forbidden-triangle pruning, which makes the stream deterministic.
    """
    if not is_member(graph, desc):
        raise InputError("witness candidates extend class members")
    delta = desc.delta
    gdesc = desc.folded()
    base_matching = delta_matching(graph)
    unmatched = [v for v in graph.vertices if v not in base_matching.covered()]
    for n in range(len(graph), max_vertices + 1):
        if n % 2 == 1:
            continue
        extra = n - len(graph)
        if extra < len(unmatched) or (extra - len(unmatched)) % 2 == 1:
            continue
        if extra == 0:
            yield graph
            continue
        taken = set(graph.vertices)
        fresh = _fresh_names("w", extra, taken)
        pair_ups = list(zip(unmatched, fresh))
        leftover = fresh[len(unmatched):]
        fresh_edges = [(leftover[i], leftover[i + 1]) for i in range(0, len(leftover), 2)]
        vertices = graph.vertices + tuple(fresh)
        fixed_edges = list(graph.edges())
        for u, w in pair_ups:
            fixed_edges.append((u, w, delta))
            for v in graph.vertices:
                if v != u:
                    fixed_edges.append((w, v, delta - graph.dist(u, v)))
        for i, (u1, w1) in enumerate(pair_ups):
            for u2, w2 in pair_ups[i + 1:]:
                fixed_edges.append((w1, w2, graph.dist(u1, u2)))
        for a, b in fresh_edges:
            fixed_edges.append((a, b, delta))
        skeleton = EdgeLabelledGraph(vertices, delta, fixed_edges)
        matching = delta_matching(skeleton)
        reps = [x for x, _ in matching.edges]
        unknown = [(u, v) for i, u in enumerate(reps) for v in reps[i + 1:]
                   if skeleton.dist(u, v) is None]

        def folded_value(assignment, u, v):
            got = skeleton.dist(u, v)
            if got is not None:
                return got
            return assignment.get((u, v)) or assignment.get((v, u))

        def fill(pos: int, assignment: dict) -> Iterator[EdgeLabelledGraph]:
            if pos == len(unknown):
                edges = list(skeleton.edges())
                have = {frozenset((u, v)) for u, v, _ in edges}
                for (u, v), b in assignment.items():
                    for p, q, lab in ((u, v, b),
                                      (matching.mate(u), matching.mate(v), b),
                                      (u, matching.mate(v), delta - b),
                                      (matching.mate(u), v, delta - b)):
                        if frozenset((p, q)) not in have:
                            edges.append((p, q, lab))
                            have.add(frozenset((p, q)))
                candidate = EdgeLabelledGraph(vertices, delta, edges)
                if candidate.is_complete() and is_member(candidate, desc):
                    yield candidate
                return
            u, v = unknown[pos]
            for b in range(1, delta):
                ok = True
                for w in reps:
                    if w in (u, v):
                        continue
                    x = folded_value(assignment, u, w)
                    y = folded_value(assignment, v, w)
                    if x is not None and y is not None and \
                            is_forbidden_triangle(b, x, y, gdesc):
                        ok = False
                        break
                if ok:
                    assignment[(u, v)] = b
                    yield from fill(pos + 1, assignment)
                    del assignment[(u, v)]

        yield from fill(0, {})


def search_witness(graph: EdgeLabelledGraph, desc: ClassDescriptor,
                   max_vertices: int = 8) -> EdgeLabelledGraph | None:
    """Smallest canonical member witnessing the extension property for ``graph``.

    Returns ``None`` when no member with a perfect matching on at most
    ``max_vertices`` vertices passes the audit.
    """
    if len(graph) > max_vertices:
        raise SizeLimitError(
            f"witness search is bounded at {max_vertices} vertices", max_vertices)
    for candidate in witness_candidates(graph, desc, max_vertices):
        report = verify_eppa_witness(graph, candidate, "plain",
                                     max_domain=len(graph), max_witness=max_vertices)
        if report.ok:
            return candidate
    return None


def expand_witness(big: EdgeLabelledGraph, small_expansion: GammaLStructure,
                   desc: ClassDescriptor, orientation: OrientationSet | None = None
                   ) -> GammaLStructure | None:
    """Suitable expansion of ``big`` extending the given one, if any exists.

    Backtracks over an index and a valuation for the representative of each
    unmarked matched edge; indices come from the language of the small
    expansion and may repeat across edges.
    """
    _orientation_args(desc, orientation)
    matching = delta_matching(big, desc, require_perfect=True)
    m = small_expansion.mark_size or 0
    marks: dict = {}
    for v in small_expansion.vertices:
        mark = small_expansion.mark(v)
        if mark is None:
            raise InputError("the small expansion must be fully marked")
        marks[v] = mark
    todo = [(x, y) for x, y in matching.edges if x not in marks]
    if m == 0:
        if todo:
            return None
        return GammaLStructure(big, [], {})
    bipartite = desc.variant is Variant.EVEN_BIPARTITE
    lang_partition = None
    side_part: dict[bool, bool] = {}
    if bipartite:
        part1, _ = parity_parts(big)
        small_matching = delta_matching(small_expansion.base, desc, require_perfect=True)
        d_one = small_matching.part_one or frozenset()
        lang_partition = (d_one, frozenset(range(1, m + 1)) - d_one)
        for v, (i, _) in marks.items():
            side = i in d_one
            place = v in part1
            if side_part.setdefault(side, place) != place:
                return None
        if len(side_part) == 2 and side_part[True] == side_part[False]:
            return None

    def mutual_ok(u, mu, v, mv):
        iu, chiu = mu
        iv, chiv = mv
        differ = chiu(iv) != chiv(iu)
        label = big.dist(u, v)
        if desc.variant is Variant.ODD_NON_BIPARTITE:
            return differ == (label % 2 == 1)
        if differ:
            return label in orientation
        return orientation.co_contains(label)

    def finish():
        mates = []
        for x, y in matching.edges:
            mates.append((x, y))
            mates.append((y, x))
        expansion = GammaLStructure(big, mates, marks)
        if is_suitable_expansion(expansion, big, desc, orientation,
                                 lang_partition=lang_partition):
            return expansion
        return None

    def assign(pos: int):
        if pos == len(todo):
            return finish()
        x, y = todo[pos]
        for i in range(1, m + 1):
            if bipartite:
                side = i in lang_partition[0]
                if side in side_part and side_part[side] != (x in part1):
                    continue
            for bits in itertools.product((0, 1), repeat=m):
                chi = ValuationFunction(bits)
                mx = (i, chi)
                my = (i, chi.complement())
                if not mutual_ok(x, mx, y, my):
                    continue
                good = True
                for v, mv in marks.items():
                    if not mutual_ok(x, mx, v, mv) or not mutual_ok(y, my, v, mv):
                        good = False
                        break
                if not good:
                    continue
                marks[x] = mx
                marks[y] = my
                added_side = None
                if bipartite:
                    side = i in lang_partition[0]
                    if side not in side_part:
                        side_part[side] = x in part1
                        added_side = side
                        other = not side
                        if other in side_part and side_part[other] == side_part[side]:
                            del side_part[added_side]
                            del marks[x]
                            del marks[y]
                            continue
                out = assign(pos + 1)
                if out is not None:
                    return out
                del marks[x]
                del marks[y]
                if added_side is not None:
                    del side_part[added_side]
        return None

    return assign(0)


@dataclass
class PipelineResult:
    """End-to-end outcome: closed input, expansion, witness, and both audits."""

    ok: bool
    stage: str
    detail: str
    base: EdgeLabelledGraph
    expansion: GammaLStructure = None
    witness: EdgeLabelledGraph = None
    witness_expansion: GammaLStructure = None
    gamma_report: WitnessReport = None
    plain_report: WitnessReport = None


def pipeline(graph: EdgeLabelledGraph, desc: ClassDescriptor,
             witness_source="search", *, max_vertices: int = 8,
             orientation: OrientationSet | None = None) -> PipelineResult:
    """Close, pad, expand, find or take a witness, and audit everything.

    ``witness_source`` is ``"search"`` or a user-supplied marked witness.  On
    success the returned witness is a member containing the closed input, its
    marked version passes the language-level audit, and the reduct passes the
    plain audit.
    """
    if desc.variant is Variant.EVEN_BIPARTITE and orientation is None:
        orientation = OrientationSet.default(desc.delta)
    closed, matching = antipodal_closure(graph, desc)
    if desc.variant is Variant.EVEN_BIPARTITE:
        closed = pad_bipartition(closed, desc)
        matching = delta_matching(closed, desc, require_perfect=True)
    expansion = build_suitable_expansion(closed, desc, orientation)
    lang_partition = None
    if desc.variant is Variant.EVEN_BIPARTITE and matching.part_one is not None:
        lang_partition = (matching.part_one, matching.part_two)

    if isinstance(witness_source, GammaLStructure):
        supplied = witness_source
        try:
            _check_gamma_substructure(expansion, supplied)
        except InputError as exc:
            return PipelineResult(False, "witness-validation", str(exc), closed,
                                  expansion)
        reduct = supplied.reduct()
        if not is_member(reduct, desc):
            return PipelineResult(False, "witness-validation",
                                  "supplied witness is not a class member",
                                  closed, expansion)
        gamma_report = verify_eppa_witness(
            expansion, supplied, "gamma", max_domain=len(closed),
            max_witness=len(reduct), lang_partition=lang_partition)
        if not gamma_report.ok:
            return PipelineResult(
                False, "gamma-witness",
                f"partial automorphism without extension: {gamma_report.counterexample!r}",
                closed, expansion, reduct, supplied, gamma_report)
        plain_report = verify_eppa_witness(
            closed, reduct, "plain", max_domain=len(closed), max_witness=len(reduct))
        if not plain_report.ok:
            return PipelineResult(
                False, "plain-witness",
                f"reduct fails on: {plain_report.counterexample!r}",
                closed, expansion, reduct, supplied, gamma_report, plain_report)
        return PipelineResult(True, "done", "witness verified", closed, expansion,
                              reduct, supplied, gamma_report, plain_report)

    if witness_source != "search":
        raise InputError("witness source must be 'search' or a marked structure")
    for candidate in witness_candidates(closed, desc, max_vertices):
        cand_expansion = expand_witness(candidate, expansion, desc, orientation)
        if cand_expansion is None:
            continue
        gamma_report = verify_eppa_witness(
            expansion, cand_expansion, "gamma", max_domain=len(closed),
            max_witness=max_vertices, lang_partition=lang_partition)
        if not gamma_report.ok:
            continue
        plain_report = verify_eppa_witness(
            closed, candidate, "plain", max_domain=len(closed),
            max_witness=max_vertices)
        if not plain_report.ok:
            continue
        return PipelineResult(True, "done", "witness found and verified", closed,
                              expansion, candidate, cand_expansion,
                              gamma_report, plain_report)
    return PipelineResult(
        False, "witness-search",
        f"no witness with at most {max_vertices} vertices", closed, expansion)
