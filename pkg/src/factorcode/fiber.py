"""Fiber analysis over periodic image points.

The fiber of a periodic point y of period p is carried by the phase graph:
vertices are pairs (symbol, phase) whose label matches y at that phase,
edges act by the transition relation while advancing the phase. Preimages
of y are exactly the bi-infinite walks, so the graph is pruned to vertices
lying on such walks.

Transition classes (mutual-reachability classes of preimages under
coordinate splicing) are read off as the nontrivial strongly connected
components after unrolling the phase graph to the least common multiple P
of the component cyclicities; at that period every component has settled
into its terminal splitting and the count is stable under any further
unrolling, which the doubling certificate re-checks explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm

from . import graphs
from .core import PeriodicPoint, PreconditionError, primitive_root
from .classdegree import TransitionBlock, transition_block


@dataclass
class FiberGraph:
    """Phase graph of a periodic image point.

    ``vertices`` lists every label-compatible (symbol, phase) pair;
    ``pruned`` is the subset lying on bi-infinite walks. ``adjacency``
    covers the full vertex set; restrict to ``pruned`` for fiber content.
    """

    triple: object
    word: tuple
    period: int
    vertices: tuple
    adjacency: dict
    pruned: frozenset

    def pruned_adjacency(self):
        return {v: [w for w in self.adjacency[v] if w in self.pruned]
                for v in self.vertices if v in self.pruned}


def build_fiber_graph(t, y):
    """Phase graph of y, pruned to the bi-infinite part.

    Raises PreconditionError when y has no preimage (y not in the image).
    """
    word = tuple(y.word) if isinstance(y, PeriodicPoint) else tuple(y)
    for c in word:
        if c not in t.preimage_map:
            raise ValueError("unknown image symbol %r" % (c,))
    p = len(word)
    vertices = tuple((s, k) for k in range(p) for s in t.preimages(word[k]))
    vert_set = set(vertices)
    adjacency = {}
    for (s, k) in vertices:
        nxt = []
        for u in t.x.successors(s):
            w = (u, (k + 1) % p)
            if w in vert_set:
                nxt.append(w)
        adjacency[(s, k)] = nxt
    pruned = frozenset(graphs.bi_essential_nodes(adjacency))
    if not pruned:
        raise PreconditionError("point has no preimage in the domain")
    return FiberGraph(t, word, p, vertices, adjacency, pruned)


@dataclass
class TransitionClass:
    """One transition class: its unrolled SCC and a periodic preimage."""

    name: str
    vertices: frozenset
    representative: PeriodicPoint


@dataclass
class TransitionClassReport:
    """Everything the fiber of one periodic point exposes.

    ``reaches`` lists the strict reachability pairs between classes (the
    induced order is reflexive; self-pairs are omitted from the listing).
    ``s_sets`` and ``transient`` are indexed by phase modulo the unrolled
    period: s_sets[C][n] holds the preimage symbols whose future options
    match class C exactly at phase n, and transient[n] the preimage
    symbols matching no class there. ``transient_symbols`` are the symbols
    transient at every phase where they are preimage symbols at all.
    """

    word: tuple
    period: int
    unrolled_period: int
    class_count: int
    classes: tuple
    reaches: tuple
    s_sets: dict
    transient: tuple
    transient_symbols: frozenset
    stable_under_doubling: bool
    class_of_vertex: dict


def _unrolled_graph(t, word, period):
    reps = period // len(word)
    return build_fiber_graph(t, PeriodicPoint(tuple(word) * reps))


def _vertex_reach_names(adj, class_of_vertex):
    out = {}
    for v in adj:
        seen = graphs.reachable_from(adj, [v])
        out[v] = frozenset(class_of_vertex[w] for w in seen
                           if w in class_of_vertex)
    return out


def transition_classes(g):
    """Transition classes over the point presented by fiber graph ``g``."""
    t = g.triple
    p = g.period
    adj = g.pruned_adjacency()
    cyclicities = [graphs.component_cyclicity(adj, comp)
                   for comp in graphs.nontrivial_components(adj)]
    big_p = lcm(*cyclicities) if cyclicities else p
    gp = _unrolled_graph(t, g.word, big_p) if big_p != p else g
    adj_p = gp.pruned_adjacency()

    xorder = {s: i for i, s in enumerate(t.x.symbols)}

    def vkey(v):
        return (v[1], xorder[v[0]])

    comps = sorted(graphs.nontrivial_components(adj_p),
                   key=lambda comp: min(vkey(v) for v in comp))
    names = ["C%d" % (i + 1) for i in range(len(comps))]
    class_of_vertex = {}
    for name, comp in zip(names, comps):
        for v in comp:
            class_of_vertex[v] = name

    reach_names = _vertex_reach_names(adj_p, class_of_vertex)
    reach_of_class = {name: reach_names[comp[0]]
                      for name, comp in zip(names, comps)}
    reaches = tuple((a, b) for a in names for b in names
                    if a != b and b in reach_of_class[a])

    s_sets = {}
    for name in names:
        target = reach_of_class[name]
        per_phase = []
        for n in range(big_p):
            members = {v[0] for v in adj_p
                       if v[1] == n and reach_names[v] == target}
            per_phase.append(frozenset(members))
        s_sets[name] = tuple(per_phase)
    transient = []
    for n in range(big_p):
        placed = set()
        for name in names:
            placed |= s_sets[name][n]
        transient.append(frozenset(
            s for s in t.preimages(g.word[n % p]) if s not in placed))
    candidates = set()
    for n in range(big_p):
        candidates.update(t.preimages(g.word[n % p]))
    transient_symbols = frozenset(
        s for s in candidates
        if all(s in transient[n] for n in range(big_p)
               if s in t.preimages(g.word[n % p])))

    classes = []
    for name, comp in zip(names, comps):
        rep_start = min((v for v in comp if v[1] == 0), key=vkey)
        rep_word = _shortest_cycle_word(adj_p, set(comp), rep_start)
        classes.append(TransitionClass(name, frozenset(comp),
                                       PeriodicPoint(rep_word)))

    doubled = _unrolled_graph(t, g.word, 2 * big_p)
    stable = (len(graphs.nontrivial_components(doubled.pruned_adjacency()))
              == len(comps))

    return TransitionClassReport(
        word=tuple(g.word), period=p, unrolled_period=big_p,
        class_count=len(comps), classes=tuple(classes), reaches=reaches,
        s_sets=s_sets, transient=tuple(transient),
        transient_symbols=transient_symbols, stable_under_doubling=stable,
        class_of_vertex=class_of_vertex)


def _shortest_cycle_word(adj, members, start):
    """Symbols along a shortest closed walk through ``start`` inside one
    strongly connected component."""
    parent = {}
    dist = {}
    queue = []
    for u in adj[start]:
        if u in members and u not in dist:
            dist[u] = 1
            parent[u] = start
            queue.append(u)
    head = 0
    while head < len(queue) and start not in dist:
        v = queue[head]
        head += 1
        for u in adj[v]:
            if u in members and u not in dist:
                dist[u] = dist[v] + 1
                parent[u] = v
                queue.append(u)
    back = []
    node = parent[start]
    while node != start:
        back.append(node)
        node = parent[node]
    chain = [start] + back[::-1]
    return tuple(v[0] for v in chain)


def class_of_preimage(t, report, x):
    """Name of the transition class containing a periodic preimage x."""
    if not t.x.admits_cycle(x.word):
        raise ValueError("not a periodic point of the domain")
    span = lcm(x.period, len(report.word))
    for j in range(span):
        if t.label[x.symbol_at(j)] != report.word[j % len(report.word)]:
            raise ValueError("point is not a preimage of the fiber's point")
    vertex = (x.symbol_at(0), 0)
    if vertex not in report.class_of_vertex:
        raise ValueError("point is not a preimage of the fiber's point")
    return report.class_of_vertex[vertex]


def enumerate_periodic_preimages(t, y, max_period):
    """Periodic preimages of y with period at most max_period, as points.

    Each result is phase aligned with y (coordinate 0 maps to y_0); both
    members of a rotation pair are reported when they are distinct points.
    """
    g = build_fiber_graph(t, y)
    if max_period < g.period:
        raise ValueError("max_period is smaller than the point's period")
    adj = g.pruned_adjacency()
    xorder = {s: i for i, s in enumerate(t.x.symbols)}
    found = set()

    starts = sorted((v for v in adj if v[1] == 0), key=lambda v: xorder[v[0]])
    for v0 in starts:
        stack = [(v0, (v0[0],))]
        while stack:
            node, word = stack.pop()
            for nxt in adj[node]:
                if nxt == v0 and len(word) % g.period == 0:
                    if primitive_root(word) == word:
                        found.add(word)
                if len(word) < max_period:
                    stack.append((nxt, word + (nxt[0],)))

    words = sorted(found, key=lambda w: (len(w),
                                         tuple(xorder[s] for s in w)))
    return [PeriodicPoint(w) for w in words]


@dataclass
class SynchronizingExtension:
    """Result of stabilizing finite-window preimage blocks.

    ``blocks`` are the true preimage blocks over the interval (the ones
    extending to full preimages of y); ``radius`` is the least l such that
    every preimage block of the l-extended window already restricts to a
    true block. ``per_coordinate`` projects the blocks to symbol sets."""

    interval: tuple
    radius: int
    blocks: tuple
    per_coordinate: tuple


def _walk_words(t, g, interval, adjacency, start_ok, end_ok):
    m, n = interval
    p = g.period
    xorder = {s: i for i, s in enumerate(t.x.symbols)}
    width = n - m + 1
    out = set()

    def extend(node, word):
        if len(word) == width:
            if end_ok(node):
                out.add(word)
            return
        for u in adjacency[node]:
            extend(u, word + (u[0],))

    for v in sorted((v for v in adjacency if v[1] == m % p),
                    key=lambda v: xorder[v[0]]):
        if start_ok(v):
            extend(v, (v[0],))
    return sorted(out, key=lambda w: tuple(xorder[s] for s in w))


def _capacity_levels(adjacency):
    """levels[r] = vertices from which a path of length >= r starts."""
    levels = [set(adjacency)]
    while levels[-1]:
        nxt = {v for v in adjacency
               if any(u in levels[-1] for u in adjacency[v])}
        if nxt == levels[-1]:
            break
        levels.append(nxt)
    return levels


def window_blocks(t, y, interval, radius=None):
    """Preimage symbol blocks of a periodic point over a coordinate window.

    With ``radius=None``: the true blocks, i.e. restrictions of bi-infinite
    preimages of y to the window. With an integer radius l: the blocks of
    the l-extended local condition, paths in the label-compatible phase
    graph whose endpoints extend at least l more steps backward and
    forward. The latter decrease with l and reach the true blocks at a
    finite radius (the synchronizing radius).
    """
    m, n = interval
    if m > n:
        raise ValueError("empty interval")
    g = build_fiber_graph(t, y)
    if radius is None:
        return _walk_words(t, g, interval, g.pruned_adjacency(),
                           lambda v: True, lambda v: True)
    if radius < 0:
        raise ValueError("radius must be >= 0")
    back = _capacity_levels(graphs.invert(g.adjacency))
    fwd = _capacity_levels(g.adjacency)
    bl = back[min(radius, len(back) - 1)]
    fl = fwd[min(radius, len(fwd) - 1)]
    return _walk_words(t, g, interval, g.adjacency,
                       lambda v: v in bl, lambda v: v in fl)


def synchronizing_extension(t, y, interval):
    m, n = interval
    if m > n:
        raise ValueError("empty interval")
    true_blocks = window_blocks(t, y, interval)
    cap = len(build_fiber_graph(t, y).vertices) + 1
    radius = 0
    while radius <= cap:
        if window_blocks(t, y, interval, radius) == true_blocks:
            break
        radius += 1
    else:
        raise AssertionError("synchronizing radius failed to stabilize")

    width = n - m + 1
    per_coordinate = tuple(frozenset(w[i] for w in true_blocks)
                           for i in range(width))
    return SynchronizingExtension((m, n), radius, tuple(true_blocks),
                                  per_coordinate)


@dataclass
class ExtractionResult:
    """A transition block extracted from the fiber of a periodic point,
    together with the stage data that produced it."""

    block: TransitionBlock
    class_count: int
    n2: int
    n3: int
    n4: int
    radius: int


def extract_transition_block(t, y):
    """Construct a transition block whose depth equals the number of
    transition classes over the periodic point y.

    Stage 1 bounds the time by which every preimage shows a non-transient
    vertex; stage 2 finds a common routing target per class at one time
    n3; stage 3 grows the window until every preimage provably merges back
    out of its routing target; stage 4 pads the window by the
    synchronizing radius so that finite preimage blocks behave like the
    bi-infinite fiber. The result is machine-checked on construction.
    """
    report = transition_classes(build_fiber_graph(t, y))
    big_p = report.unrolled_period
    g = _unrolled_graph(t, report.word, big_p)
    adj = g.pruned_adjacency()
    xorder = {s: i for i, s in enumerate(t.x.symbols)}

    reach_names = _vertex_reach_names(adj, report.class_of_vertex)
    reach_of_class = {}
    for cls in report.classes:
        reach_of_class[cls.name] = reach_names[next(iter(cls.vertices))]
    class_match = {}
    for v in adj:
        for cls in report.classes:
            if reach_names[v] == reach_of_class[cls.name]:
                class_match[v] = cls.name
                break

    transient_sub = {v: [w for w in adj[v] if w not in class_match]
                     for v in adj if v not in class_match}
    n2 = graphs.longest_path_vertices(transient_sub)

    def step(frontier):
        nxt = set()
        for v in frontier:
            nxt.update(adj[v])
        return nxt

    # seeds: non-transient vertices at times 0..n2, grouped by class
    names = [cls.name for cls in report.classes]
    seeds = {name: [] for name in names}
    for time in range(n2 + 1):
        for v in adj:
            if v[1] == time % big_p and v in class_match:
                seeds[class_match[v]].append((v, time))
    for name in names:
        if not seeds[name]:
            raise AssertionError("class without early seed vertices")
    scc_vertices = {cls.name: cls.vertices for cls in report.classes}

    max_n3 = n2 + 1 + 4 * big_p * (len(adj) + 1)
    dp_budget = len(adj) * (2 ** len(names)) + 2 * big_p + 8

    chosen = None
    for n3 in range(n2 + 1, max_n3 + 1):
        targets = {}
        for name in names:
            candidates = sorted(
                (v for v in scc_vertices[name] if v[1] == n3 % big_p),
                key=lambda v: xorder[v[0]])
            pick = None
            for cand in candidates:
                ok = True
                for v, time in seeds[name]:
                    frontier = {v}
                    for _ in range(n3 - time):
                        frontier = step(frontier)
                    if cand not in frontier:
                        ok = False
                        break
                if ok:
                    pick = cand
                    break
            if pick is None:
                targets = None
                break
            targets[name] = pick
        if targets is None:
            continue

        # stage 3: product sweep over (vertex, collected class set)
        states = {(v, frozenset([class_match[v]] if v in class_match else ()))
                  for v in adj if v[1] == 0}
        time = 0
        while time < n2:
            time += 1
            nxt = set()
            for v, collected in states:
                for w in adj[v]:
                    extra = class_match.get(w)
                    nxt.add((w, collected | {extra}) if extra
                            else (w, collected))
            states = nxt
        if any(not collected for _, collected in states):
            raise AssertionError("preimage path with no early class visit")

        b_front = {name: {targets[name]} for name in names}
        b_time = n3
        found_n4 = None
        while b_time - n3 <= dp_budget:
            while time < b_time:
                time += 1
                states = {(w, collected) for v, collected in states
                          for w in adj[v]}
            if b_time > n3:
                good = all(
                    any(v in b_front[name] for name in collected)
                    for v, collected in states)
                if good:
                    found_n4 = b_time
                    break
            for name in names:
                b_front[name] = step(b_front[name])
            b_time += 1
        if found_n4 is None:
            continue
        chosen = (n3, found_n4, targets)
        break
    if chosen is None:
        raise RuntimeError("transition block extraction exhausted its caps")

    n3, n4, targets = chosen
    sync = synchronizing_extension(t, y, (0, n4))
    radius = sync.radius
    window = tuple(PeriodicPoint(report.word).window(-radius, n4 + radius))
    index = n3 + radius
    symbols = frozenset(targets[name][0] for name in names)
    if len(symbols) != len(names):
        raise AssertionError("routing targets share a symbol")
    block = transition_block(t, window, index, symbols)
    return ExtractionResult(block, report.class_count, n2, n3, n4, radius)
