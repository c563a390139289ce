"""Completion procedures: shortest-path, cycle oracles, and antipodal completion.

Three layers live here.  :func:`shortest_path_completion` fills a partial
integer metric space canonically, so every symmetry of the input survives into
the completion (the completion may gain symmetries: an asymmetric definedness
pattern can complete to a symmetric space).  :func:`forbidden_cycle_oracle` decides by exhaustive search whether a
labelled cycle can be completed inside a five-parameter family, which powers
:func:`local_finiteness_bound`.  :func:`antipodal_complete` fills a partial
antipodal graph whose long edges form a perfect matching, steering the parity
of every new distance with a two-valued pair function and auditing afterwards
that the completion is a member, matches the parities, and keeps every
parity-preserving symmetry of the input.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import (CompletionError, CompletionNotEquivariant, InputError,
                     NonMetricCycleError, PreconditionError, SizeLimitError)
from .membership import (ClassDescriptor, DeltaMatching, GeneralClassDescriptor,
                         Variant, delta_matching, find_forbidden_triple,
                         is_forbidden_triangle, is_member)
from .structures import EdgeLabelledGraph, Vertex, automorphisms, is_completion_of


class ParityFunction:
    """Total two-valued function on unordered vertex pairs.

    On labelled pairs it must agree with the label's parity class; across two
    disjoint long edges its values must be coherent (equal on parallel pairs,
    opposite on crossing pairs).  :func:`check_f_conditions` verifies both.
    """

    __slots__ = ("_values",)

    def __init__(self, values):
        store: dict[frozenset, int] = {}
        items = values.items() if hasattr(values, "items") else values
        for entry in items:
            if hasattr(values, "items"):
                (u, v), bit = entry
            else:
                u, v, bit = entry
            if u == v:
                raise InputError("parity function is defined on distinct pairs only")
            if bit not in (0, 1):
                raise InputError(f"parity value must be 0 or 1, got {bit!r}")
            key = frozenset((u, v))
            if key in store and store[key] != bit:
                raise InputError(f"conflicting parity values on pair ({u!r}, {v!r})")
            store[key] = bit
        self._values = store

    def value(self, u: Vertex, v: Vertex) -> int:
        try:
            return self._values[frozenset((u, v))]
        except KeyError:
            raise InputError(f"parity function undefined on pair ({u!r}, {v!r})") from None

    def defined(self, u: Vertex, v: Vertex) -> bool:
        return frozenset((u, v)) in self._values

    def pair_count(self) -> int:
        return len(self._values)

    def items_sorted(self) -> list[tuple[tuple, int]]:
        entries = [(tuple(sorted(k, key=str)), bit) for k, bit in self._values.items()]
        return sorted(entries, key=lambda e: (str(e[0][0]), str(e[0][1])))

    def __eq__(self, other):
        if not isinstance(other, ParityFunction):
            return NotImplemented
        return self._values == other._values

    def __hash__(self):
        return hash(frozenset(self._values.items()))

    def __repr__(self):
        body = ", ".join(f"{u}{v}:{bit}" for (u, v), bit in self.items_sorted())
        return f"ParityFunction({body})"


@dataclass(frozen=True)
class OrientationSet:
    """Subset of ``{0..delta}`` selecting one side of each pair ``{a, delta-a}``.

    ``delta`` itself always belongs; for even ``delta`` the self-paired value
    ``delta/2`` must belong as well, so that it counts as lying on both sides.
    """

    delta: int
    members: frozenset

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        if not all(isinstance(a, int) and 0 <= a <= self.delta for a in self.members):
            raise InputError("orientation values must lie in 0..delta")
        if self.delta not in self.members:
            raise InputError("delta itself must belong to the orientation set")
        for a in range(self.delta + 1):
            b = self.delta - a
            if a == b:
                if a not in self.members:
                    raise InputError("the half distance must belong to the orientation set")
            elif (a in self.members) == (b in self.members):
                raise InputError(
                    f"exactly one of {a} and {b} must belong to the orientation set")

    @classmethod
    def default(cls, delta: int) -> "OrientationSet":
        return cls(delta, frozenset(a for a in range(delta + 1) if 2 * a >= delta))

    def __contains__(self, a: int) -> bool:
        return a in self.members

    def co_contains(self, a: int) -> bool:
        """True when ``a`` lies on the complementary side (``delta - a`` is in)."""
        return (self.delta - a) in self.members

    def sorted_members(self) -> list[int]:
        return sorted(self.members)


@dataclass(frozen=True)
class CycleSpec:
    """Labels around a cycle ``v_1 .. v_k`` (``labels[i]`` joins ``v_i`` to ``v_{i+1}``).

    ``vertices`` is optional: concrete witnesses carry them, abstract cycles
    used by the oracle do not.
    """

    labels: tuple[int, ...]
    vertices: tuple = None  # type: ignore[assignment]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.labels) < 3:
            raise InputError("a cycle needs at least three edges")
        if not all(isinstance(l, int) and l >= 1 for l in self.labels):
            raise InputError("cycle labels must be positive integers")
        if self.vertices is not None:
            object.__setattr__(self, "vertices", tuple(self.vertices))
            if len(self.vertices) != len(self.labels):
                raise InputError("a cycle has as many vertices as labels")

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def is_non_metric(self) -> bool:
        return 2 * max(self.labels) > sum(self.labels)


def _components(graph: EdgeLabelledGraph) -> list[set]:
    seen: set = set()
    out = []
    for start in graph.vertices:
        if start in seen:
            continue
        comp = {start}
        frontier = [start]
        while frontier:
            u = frontier.pop()
            for v in graph.vertices:
                if v not in comp and v != u and graph.dist(u, v) is not None:
                    comp.add(v)
                    frontier.append(v)
        seen |= comp
        out.append(comp)
    return out


def _shortest_avoiding(graph: EdgeLabelledGraph, source: Vertex, target: Vertex):
    """Shortest weighted path from source to target that skips the direct edge.

    Returns ``(total, path)`` or ``None``.  Ties break on canonical vertex
    order, so the returned path is deterministic.
    """
    dist = {source: 0}
    prev: dict = {}
    heap = [(0, graph.index(source), source)]
    while heap:
        d, _, u = heapq.heappop(heap)
        if d > dist.get(u, math.inf):
            continue
        if u == target:
            path = [u]
            while path[-1] != source:
                path.append(prev[path[-1]])
            return d, list(reversed(path))
        for v in graph.vertices:
            if v == u or {u, v} == {source, target}:
                continue
            w = graph.dist(u, v)
            if w is None:
                continue
            nd = d + w
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                prev[v] = u
                heapq.heappush(heap, (nd, graph.index(v), v))
    return None


def find_non_metric_cycle(graph: EdgeLabelledGraph) -> CycleSpec | None:
    """First cycle whose closing label exceeds the path around it, if any."""
    for u, v, label in graph.edges():
        found = _shortest_avoiding(graph, u, v)
        if found is not None and found[0] < label:
            _, path = found
            labels = tuple(graph.dist(path[i], path[i + 1]) for i in range(len(path) - 1))
            return CycleSpec(labels + (label,), tuple(path))
    return None


def shortest_path_completion(graph: EdgeLabelledGraph) -> EdgeLabelledGraph:
    """Complete a connected partial graph with weighted shortest-path distances.

    The formula is canonical, hence every symmetry of the input is a symmetry
    of the completion.  When the input contains a non-metric cycle the stored labels
    cannot survive, and the witness cycle is raised instead.  Completed
    distances may exceed the input's diameter bound, in which case the bound
    grows to fit.
    """
    if len(graph) <= 1:
        return graph
    comps = _components(graph)
    if len(comps) > 1:
        raise InputError(
            f"graph is disconnected ({len(comps)} components); complete per component")
    verts = graph.vertices
    n = len(verts)
    d = [[math.inf] * n for _ in range(n)]
    for i in range(n):
        d[i][i] = 0
    for u, v, label in graph.edges():
        i, j = graph.index(u), graph.index(v)
        d[i][j] = d[j][i] = label
    for k in range(n):
        for i in range(n):
            dik = d[i][k]
            if dik is math.inf:
                continue
            row = d[i]
            for j in range(n):
                alt = dik + d[k][j]
                if alt < row[j]:
                    row[j] = alt
                    d[j][i] = alt
    for u, v, label in graph.edges():
        if d[graph.index(u)][graph.index(v)] < label:
            cycle = find_non_metric_cycle(graph)
            raise NonMetricCycleError(cycle)
    edges = []
    top = graph.delta
    for i in range(n):
        for j in range(i + 1, n):
            value = int(d[i][j])
            top = max(top, value)
            edges.append((verts[i], verts[j], value))
    return EdgeLabelledGraph(verts, top, edges)


def forbidden_cycle_oracle(cycle: CycleSpec, gdesc: GeneralClassDescriptor,
                           *, max_length: int = 8) -> bool:
    """True when no chord labelling completes the cycle into a member.

    Decided by exhaustive backtracking over all chord labellings, pruning as
    soon as a fully labelled triangle is forbidden.  Refuses cycles longer
    than ``max_length``.
    """
    k = len(cycle)
    if k > max_length:
        raise SizeLimitError(
            f"cycle oracle is bounded at length {max_length} (got {k})", max_length)
    diameter = gdesc.diameter
    for label in cycle.labels:
        if not 1 <= label <= diameter:
            raise InputError(f"cycle label {label} outside 1..{diameter}")
    fixed: dict[tuple[int, int], int] = {}
    for i in range(k):
        a, b = i, (i + 1) % k
        fixed[(min(a, b), max(a, b))] = cycle.labels[i]
    if k == 3:
        return is_forbidden_triangle(*cycle.labels, gdesc)
    chords = [(i, j) for i in range(k) for j in range(i + 1, k)
              if (i, j) not in fixed]
    assigned: dict[tuple[int, int], int] = {}

    def value(i: int, j: int):
        key = (min(i, j), max(i, j))
        return fixed.get(key) or assigned.get(key)

    def consistent(i: int, j: int, a: int) -> bool:
        for t in range(k):
            if t in (i, j):
                continue
            x, y = value(i, t), value(j, t)
            if x is not None and y is not None and is_forbidden_triangle(a, x, y, gdesc):
                return False
        return True

    def dfs(pos: int) -> bool:
        if pos == len(chords):
            return True
        i, j = chords[pos]
        for a in range(1, diameter + 1):
            if consistent(i, j, a):
                assigned[(i, j)] = a
                if dfs(pos + 1):
                    return True
                del assigned[(i, j)]
        return False

    return not dfs(0)


@dataclass(frozen=True)
class BoundSearch:
    """Result of a forbidden-cycle sweep: the locality bound and its provenance.

    ``n`` is ``max(4, 2 * largest_forbidden)``.  ``exhaustive`` is True when
    the top examined length carried no forbidden cycle, which is evidence (not
    proof) that longer ones do not exist; bipartite families always have
    forbidden cycles of every odd perimeter, so there it stays False.
    """

    n: int
    cycle_bound: int
    largest_forbidden: int
    exhaustive: bool
    example: CycleSpec | None


def _canonical_cycles(length: int, diameter: int) -> Iterator[tuple[int, ...]]:
    """Label tuples of the given length, one per rotation/reflection class."""
    for labels in itertools.product(range(1, diameter + 1), repeat=length):
        variants = [labels[i:] + labels[:i] for i in range(length)]
        rev = labels[::-1]
        variants += [rev[i:] + rev[:i] for i in range(length)]
        if labels == min(variants):
            yield labels


def local_finiteness_bound(desc: ClassDescriptor, cycle_bound: int) -> BoundSearch:
    """Sweep all cycles up to ``cycle_bound`` and derive the locality bound.

    The bound is at least 4 and at least twice the length of the largest
    forbidden cycle found.  No minimality filtering is applied, so the bound
    is conservative.
    """
    if cycle_bound < 3:
        raise InputError("cycle bound must be at least 3")
    gdesc = desc.folded()
    largest = 0
    example = None
    for k in range(3, cycle_bound + 1):
        for labels in _canonical_cycles(k, gdesc.diameter):
            spec = CycleSpec(labels)
            if forbidden_cycle_oracle(spec, gdesc, max_length=cycle_bound):
                largest = k
                example = spec
                break
    return BoundSearch(max(4, 2 * largest), cycle_bound, largest,
                       largest < cycle_bound, example)


@dataclass(frozen=True)
class FViolation:
    """One broken parity-function condition, for diagnostics."""

    kind: str
    vertices: tuple
    message: str


def _orientation_args(desc: ClassDescriptor, orientation: OrientationSet | None):
    if desc.variant is Variant.ODD_NON_BIPARTITE:
        if orientation is not None:
            raise InputError("orientation sets apply to even-bipartite classes only")
    elif desc.variant is Variant.EVEN_BIPARTITE:
        if orientation is None:
            raise InputError(
                "even-bipartite classes need an orientation set (OrientationSet.default(delta))")
        if orientation.delta != desc.delta:
            raise InputError("orientation set diameter differs from the class diameter")
    else:
        raise InputError(
            "parity-driven completion is defined for odd-non-bipartite and "
            "even-bipartite classes only")


def _label_side_ok(label: int, bit: int, desc: ClassDescriptor,
                   orientation: OrientationSet | None) -> bool:
    if desc.variant is Variant.ODD_NON_BIPARTITE:
        return label % 2 == bit
    return label in orientation if bit == 1 else orientation.co_contains(label)


def check_f_conditions(graph: EdgeLabelledGraph, f: ParityFunction,
                       desc: ClassDescriptor, orientation: OrientationSet | None = None
                       ) -> list[FViolation]:
    """All broken invariants of the pair function ``f`` against ``graph``.

    Checks totality, agreement with stored labels (parity, or orientation
    side for bipartite classes), and coherence across pairs of long edges:
    parallel pairs agree, crossing pairs differ.
    """
    _orientation_args(desc, orientation)
    out: list[FViolation] = []
    for u, v in graph.pairs():
        if not f.defined(u, v):
            out.append(FViolation("missing", (u, v), f"f undefined on ({u}, {v})"))
    for u, v, label in graph.edges():
        if not f.defined(u, v):
            continue
        if not _label_side_ok(label, f.value(u, v), desc, orientation):
            out.append(FViolation(
                "label-side", (u, v),
                f"f({u},{v})={f.value(u, v)} incompatible with distance {label}"))
    try:
        matching = delta_matching(graph)
    except InputError as exc:
        out.append(FViolation("matching", (), str(exc)))
        return out
    edges = matching.edges
    for a in range(len(edges)):
        x1, y1 = edges[a]
        for b in range(a + 1, len(edges)):
            x2, y2 = edges[b]
            if not all(f.defined(p, q) for p, q in
                       ((x1, x2), (y1, y2), (x1, y2), (x2, y1))):
                continue
            if f.value(x1, x2) != f.value(y1, y2):
                out.append(FViolation("parallel", (x1, x2, y1, y2),
                                      f"f({x1},{x2}) != f({y1},{y2})"))
            if f.value(x1, y2) != f.value(x2, y1):
                out.append(FViolation("parallel", (x1, y2, x2, y1),
                                      f"f({x1},{y2}) != f({x2},{y1})"))
            if f.value(x1, x2) == f.value(x1, y2):
                out.append(FViolation("crossing", (x1, x2, y2),
                                      f"f({x1},{x2}) == f({x1},{y2})"))
    return out


def _folded_cycles(folded: EdgeLabelledGraph, bound: int) -> Iterator[CycleSpec]:
    """Simple cycles of a partial graph up to the given length, each once."""
    verts = folded.vertices
    n = len(verts)

    def neighbours(u):
        return [v for v in verts if v != u and folded.dist(u, v) is not None]

    def extend(path: list, start_idx: int) -> Iterator[CycleSpec]:
        u = path[-1]
        for v in neighbours(u):
            vi = folded.index(v)
            if vi <= start_idx:
                if v == path[0] and len(path) >= 3:
                    # close only in one direction to avoid the mirrored duplicate
                    if folded.index(path[1]) < folded.index(path[-1]):
                        labels = tuple(folded.dist(path[i], path[i + 1])
                                       for i in range(len(path) - 1))
                        yield CycleSpec(labels + (folded.dist(u, path[0]),), tuple(path))
                continue
            if v in path:
                continue
            if len(path) < bound:
                path.append(v)
                yield from extend(path, start_idx)
                path.pop()

    for s in range(n):
        yield from extend([verts[s]], s)


def _complete_folded(folded: EdgeLabelledGraph, gdesc: GeneralClassDescriptor,
                     domains: dict[tuple[Vertex, Vertex], list[int]]):
    """Fill the unlabelled pairs of a folded partial graph, or return ``None``.

    ``domains`` maps each unlabelled pair to its ordered candidate list; the
    order encodes the selection policy.  Candidates are first pruned to a
    fixpoint against decided pairs (input labels and singleton domains), then
    a depth-first search over pairs in canonical order takes the first
    assignment whose triangles all pass.  With canonical candidate order the
    first leaf is exactly the per-pair canonical selection whenever that
    selection is globally consistent.
    """
    verts = folded.vertices
    fixed = {(u, v): l for u, v, l in folded.edges()}
    for u, v in folded.pairs():
        key = (u, v)
        if key not in fixed and key not in domains:
            raise InputError(f"no candidate domain supplied for pair ({u!r}, {v!r})")
    for (u, v), l in fixed.items():
        for w in verts:
            if w in (u, v):
                continue
            a, b = fixed.get(folded._key(u, w)), fixed.get(folded._key(v, w))
            if a is not None and b is not None and is_forbidden_triangle(l, a, b, gdesc):
                return None

    work = {pair: list(dom) for pair, dom in domains.items()}
    changed = True
    while changed:
        changed = False
        decided = dict(fixed)
        for pair, dom in work.items():
            if len(dom) == 1:
                decided[pair] = dom[0]

        def known(u, v):
            return decided.get((u, v)) or decided.get((v, u))

        for (u, v), dom in work.items():
            if len(dom) <= 1:
                continue
            kept = []
            for a in dom:
                ok = True
                for w in verts:
                    if w in (u, v):
                        continue
                    x, y = known(u, w), known(v, w)
                    if x is not None and y is not None and \
                            is_forbidden_triangle(a, x, y, gdesc):
                        ok = False
                        break
                if ok:
                    kept.append(a)
            if len(kept) != len(dom):
                work[(u, v)] = kept
                changed = True
        if any(not dom for dom in work.values()):
            return None

    order = sorted(work, key=lambda p: (folded.index(p[0]), folded.index(p[1])))
    assignment: dict[tuple[Vertex, Vertex], int] = {}

    def value(u, v):
        for source in (fixed, assignment):
            got = source.get((u, v)) or source.get((v, u))
            if got is not None:
                return got
        return None

    def dfs(pos: int) -> bool:
        if pos == len(order):
            return True
        u, v = order[pos]
        for a in work[(u, v)]:
            good = True
            for w in verts:
                if w in (u, v):
                    continue
                x, y = value(u, w), value(v, w)
                if x is not None and y is not None and is_forbidden_triangle(a, x, y, gdesc):
                    good = False
                    break
            if good:
                assignment[(u, v)] = a
                if dfs(pos + 1):
                    return True
                del assignment[(u, v)]
        return False

    if not dfs(0):
        return None
    return {**fixed, **assignment}


def antipodal_complete(graph: EdgeLabelledGraph, f: ParityFunction,
                       desc: ClassDescriptor, orientation: OrientationSet | None = None,
                       *, cycle_bound: int = 8, verify_limit: int = 12) -> EdgeLabelledGraph:
    """Complete a partial antipodal graph, steering parities with ``f``.

    Preconditions (each failure raises :class:`PreconditionError` naming the
    clause): the long edges form a perfect matching; any vertex joined to one
    endpoint of a long edge is joined to both, with the two distances summing
    to the diameter; the folded image contains no forbidden cycle up to
    ``cycle_bound``; ``f`` passes :func:`check_f_conditions`.

    The completion works on the folded image: each undecided pair of long
    edges gets one unknown, whose candidate values are the side of
    ``{a, delta-a}`` selected by ``f``, ordered centre-first.  A deterministic
    search fills them, the four crossing distances are pulled back from each
    unknown, and the result is audited: it must be a member extending the
    input, every pair must sit on its ``f`` side, and every input symmetry
    preserving ``f`` must remain a symmetry (otherwise
    :class:`CompletionNotEquivariant` is raised).
    """
    _orientation_args(desc, orientation)
    if len(graph) > verify_limit:
        raise SizeLimitError(
            f"completion audit is bounded at {verify_limit} vertices", verify_limit)
    if graph.delta != desc.delta:
        raise InputError(f"graph delta {graph.delta} != class diameter {desc.delta}")
    if len(graph) == 0:
        return graph
    delta = desc.delta
    try:
        matching = delta_matching(graph, require_perfect=True)
    except InputError as exc:
        raise PreconditionError("perfect-matching", str(exc)) from None
    for x, y in matching.edges:
        for w in graph.vertices:
            if w in (x, y):
                continue
            a, b = graph.dist(x, w), graph.dist(y, w)
            if (a is None) != (b is None):
                raise PreconditionError(
                    "antipodal-sum", f"{w!r} is joined to only one endpoint of "
                    f"the long edge ({x!r}, {y!r})", (x, y, w))
            if a is not None and a + b != delta:
                raise PreconditionError(
                    "antipodal-sum", f"distances from {w!r} to ({x!r}, {y!r}) "
                    f"sum to {a + b}, expected {delta}", (x, y, w))
    violations = check_f_conditions(graph, f, desc, orientation)
    if violations:
        first = violations[0]
        raise PreconditionError(
            "parity-function",
            f"{len(violations)} condition(s) broken, first: {first.message}",
            first.vertices)
    reps = [x for x, _ in matching.edges]
    folded = EdgeLabelledGraph(
        reps, max(delta - 1, 1),
        [(u, v, graph.dist(u, v)) for i, u in enumerate(reps)
         for v in reps[i + 1:] if graph.dist(u, v) is not None])
    gdesc = desc.folded()
    for cyc in _folded_cycles(folded, min(cycle_bound, len(folded))):
        if forbidden_cycle_oracle(cyc, gdesc, max_length=cycle_bound):
            raise PreconditionError(
                "forbidden-cycle", f"folded image contains the forbidden cycle "
                f"{cyc.labels} on {cyc.vertices}", cyc.vertices)
    mid = (delta + 1) // 2
    domains: dict[tuple[Vertex, Vertex], list[int]] = {}
    for i, u in enumerate(reps):
        for v in reps[i + 1:]:
            if folded.dist(u, v) is not None:
                continue
            bit = f.value(u, v)
            cands = [a for a in range(1, delta)
                     if _label_side_ok(a, bit, desc, orientation)]
            domains[(u, v)] = sorted(cands, key=lambda a: (abs(a - mid), a))
    solution = _complete_folded(folded, gdesc, domains)
    if solution is None:
        raise CompletionError(
            "no completion matches the parity function within the class")
    edges = list(graph.edges())
    have = {frozenset((u, v)) for u, v, _ in graph.edges()}

    def put(u, v, label):
        if frozenset((u, v)) not in have:
            edges.append((u, v, label))
            have.add(frozenset((u, v)))

    for (u, v), b in solution.items():
        yu, yv = matching.mate(u), matching.mate(v)
        put(u, v, b)
        put(yu, yv, b)
        put(u, yv, delta - b)
        put(yu, v, delta - b)
    completed = EdgeLabelledGraph(graph.vertices, delta, edges)
    if not (completed.is_complete() and is_completion_of(completed, graph)
            and is_member(completed, desc)):
        raise AssertionError("internal: folded solution pulled back inconsistently")
    for u, v, label in completed.edges():
        if not _label_side_ok(label, f.value(u, v), desc, orientation):
            raise AssertionError("internal: completion broke the parity function")
    for g in automorphisms(graph, max_vertices=verify_limit):
        preserves = all(f.value(u, v) == f.value(g[u], g[v]) for u, v in graph.pairs())
        if not preserves:
            continue
        for u, v in completed.pairs():
            if completed.dist(u, v) != completed.dist(g[u], g[v]):
                raise CompletionNotEquivariant(
                    f"completion drops the parity-preserving symmetry {g!r}", g)
    return completed
