"""Analysis of 1-block factor codes: profiles, degree, sofic images.

Conventions. For a factor triple t with SFT X and labeling onto Y-symbols,
an image word w of length L has preimage blocks = X-paths carrying those
labels. The preimage profile at index i collects the symbols such paths can
show at coordinate i; its size is the classical d(w, i). The infimum d* of
d(w, i) over all words and indices is attained on so-called magic words,
and for finite-to-one codes over an irreducible image it equals the degree
of the code (the minimal number of preimages of a point).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from . import graphs
from .core import (Block, EmptyShiftError, FactorTriple, PeriodicPoint,
                   PreconditionError, Sft, canonical_orbit_word,
                   is_irreducible)


def apply_code(t, obj):
    """Apply the 1-block code to a Block or PeriodicPoint of X."""
    if isinstance(obj, PeriodicPoint):
        if not t.x.admits_cycle(obj.word):
            raise ValueError("invalid periodic point")
        return PeriodicPoint(t.label_word(obj.word))
    if not t.x.admits_word(obj.symbols):
        raise ValueError("invalid block")
    return Block(t.label_word(obj.symbols), obj.start)


def _check_image_word(t, word):
    word = tuple(word)
    if not word:
        raise ValueError("empty image word")
    for c in word:
        if c not in t.preimage_map:
            raise ValueError("unknown image symbol %r" % (c,))
    return word


def forward_sets(t, word):
    """F_i sweep: F_0 = preimages(w_0), F_{i+1} = succ(F_i) & preimages."""
    word = _check_image_word(t, word)
    sets = []
    current = set(t.preimages(word[0]))
    sets.append(frozenset(current))
    for c in word[1:]:
        nxt = set()
        for s in current:
            for u in t.x.successors(s):
                if t.label[u] == c:
                    nxt.add(u)
        current = nxt
        sets.append(frozenset(current))
    return sets

def backward_sets(t, word):
    """B_i sweep from the right end, mirror image of forward_sets."""
    word = _check_image_word(t, word)
    sets = [None] * len(word)
    current = set(t.preimages(word[-1]))
    sets[-1] = frozenset(current)
    for i in range(len(word) - 2, -1, -1):
        prv = set()
        for s in current:
            for u in t.x.predecessors(s):
                if t.label[u] == word[i]:
                    prv.add(u)
        current = prv
        sets[i] = frozenset(current)
    return sets


@dataclass(frozen=True)
class PreimageProfile:
    """Symbols shown at one coordinate by the preimages of an image word."""

    word: tuple
    index: int
    symbols: frozenset

    @property
    def value(self):
        return len(self.symbols)


def preimage_profiles(t, word):
    """Profiles at every coordinate of ``word`` (empty sets iff w not in
    the image language)."""
    word = _check_image_word(t, word)
    fwd = forward_sets(t, word)
    bwd = backward_sets(t, word)
    return [PreimageProfile(word, i, fwd[i] & bwd[i])
            for i in range(len(word))]


def preimage_profile(t, word, index):
    word = _check_image_word(t, word)
    if not 0 <= index < len(word):
        raise ValueError("index out of range")
    return preimage_profiles(t, word)[index]


def exact_forward_set(t, start, word):
    """Symbols reachable from ``start`` along paths labeled by ``word``
    (start must carry word[0]); the set after the full word."""
    current = {start} if t.label[start] == word[0] else set()
    for c in word[1:]:
        nxt = set()
        for s in current:
            for u in t.x.successors(s):
                if t.label[u] == c:
                    nxt.add(u)
        current = nxt
    return current


def exact_forward_sweep(t, start, word):
    """All intermediate sets of exact_forward_set, one per coordinate."""
    current = {start} if t.label[start] == word[0] else set()
    sweep = [frozenset(current)]
    for c in word[1:]:
        nxt = set()
        for s in current:
            for u in t.x.successors(s):
                if t.label[u] == c:
                    nxt.add(u)
        current = nxt
        sweep.append(frozenset(current))
    return sweep


def exact_backward_sweep(t, end, word):
    current = {end} if t.label[end] == word[-1] else set()
    sweep = [frozenset(current)]
    for i in range(len(word) - 2, -1, -1):
        prv = set()
        for s in current:
            for u in t.x.predecessors(s):
                if t.label[u] == word[i]:
                    prv.add(u)
        current = prv
        sweep.append(frozenset(current))
    sweep.reverse()
    return sweep


def preimage_blocks(t, word):
    """All X-paths labeled by ``word``, lexicographic in symbol order."""
    word = _check_image_word(t, word)
    bwd = backward_sets(t, word)
    out = []

    def extend(path, i):
        if i == len(word):
            out.append(tuple(path))
            return
        for u in t.x.successors(path[-1]):
            if t.label[u] == word[i] and u in bwd[i]:
                path.append(u)
                extend(path, i + 1)
                path.pop()

    for s in t.x.symbols:
        if t.label[s] == word[0] and s in bwd[0]:
            extend([s], 1)
    return out


@dataclass(frozen=True)
class MagicWitness:
    """A word and index where the profile attains the global minimum d*."""

    word: tuple
    index: int
    value: int


def _subset_automaton(t, forward):
    """Reachable subset states of the label-determinized automaton.

    States are frozensets of equally-labeled X-symbols; the sweep direction
    is forward (successors) or backward (predecessors). Returns a dict
    state -> (word, label) where word is a shortest witness word read from
    an initial full-preimage state ending (or starting) at that state.
    BFS order follows the image alphabet, so witnesses are deterministic.
    """
    step = t.x.successor_map if forward else t.x.predecessor_map
    found = {}
    queue = []
    for c in t.y_alphabet:
        state = frozenset(t.preimages(c))
        if state not in found:
            found[state] = ((c,), c)
            queue.append(state)
    head = 0
    while head < len(queue):
        state = queue[head]
        head += 1
        word, _ = found[state]
        for c in t.y_alphabet:
            nxt = frozenset(u for s in state for u in step[s]
                            if t.label[u] == c)
            if nxt and nxt not in found:
                found[nxt] = (word + (c,), c)
                queue.append(nxt)
    return found


def d_star(t):
    """Exact minimum of d(w, i) over all image words w and indices i.

    Computed by intersecting every reachable forward subset state with
    every reachable backward subset state over a common image symbol; a
    witness word is assembled from the two shortest witness halves. The
    witness is chosen to minimize (value, total length, word).
    """
    fwd = _subset_automaton(t, forward=True)
    bwd = _subset_automaton(t, forward=False)
    by_label_f = {}
    for state, (word, c) in fwd.items():
        by_label_f.setdefault(c, []).append((word, state))
    by_label_b = {}
    for state, (word, c) in bwd.items():
        by_label_b.setdefault(c, []).append((word, state))
    best = None
    for c in t.y_alphabet:
        for fword, fstate in by_label_f.get(c, ()):
            for bword, bstate in by_label_b.get(c, ()):
                meet = fstate & bstate
                if not meet:
                    continue
                # backward witness words were read right-to-left
                word = fword + tuple(reversed(bword))[1:]
                key = (len(meet), len(word), word)
                if best is None or key < best:
                    best = key
                    best_witness = MagicWitness(word, len(fword) - 1,
                                                len(meet))
    if best is None:
        raise EmptyShiftError("image shift is empty")
    return best_witness


@dataclass(frozen=True)
class PairGraph:
    """Label product of X with itself: vertices are ordered pairs of
    equally labeled symbols, edges act componentwise."""

    vertices: tuple
    edges: frozenset

    @cached_property
    def adjacency(self):
        return {v: [w for w in self.vertices if (v, w) in self.edges]
                for v in self.vertices}


def pair_graph(t):
    vertices = tuple((a, b) for a in t.x.symbols for b in t.x.symbols
                     if t.label[a] == t.label[b])
    edges = frozenset(((a, b), (c, d)) for (a, b) in vertices
                      for (c, d) in vertices
                      if t.x.allows(a, c) and t.x.allows(b, d))
    return PairGraph(vertices, edges)


def is_finite_to_one(t):
    """A 1-block code is finite-to-one iff it admits no diamond: two
    distinct equally labeled paths with equal endpoints. Equivalently, no
    off-diagonal pair-graph vertex sits on a diagonal-to-diagonal path."""
    pg = pair_graph(t)
    adj = pg.adjacency
    diagonal = [v for v in pg.vertices if v[0] == v[1]]
    from_diag = graphs.reachable_from(adj, diagonal)
    to_diag = graphs.reachable_from(graphs.invert(adj), diagonal)
    for v in pg.vertices:
        if v[0] != v[1] and v in from_diag and v in to_diag:
            return False
    return True


@dataclass
class SoficImage:
    """Right-resolving presentation of the image shift.

    States are the label-homogeneous subsets of X reachable by the subset
    construction from the full one-symbol preimage sets, essentialized.
    ``triple`` presents the image: its SFT walks the state graph and its
    labels read off the presented image symbols. ``members`` maps each
    state name back to the underlying symbol subset.
    """

    triple: FactorTriple
    members: dict
    irreducible: bool


def sofic_image(t):
    label_of = {}
    order = []
    for c in t.y_alphabet:
        state = frozenset(t.preimages(c))
        if state not in label_of:
            label_of[state] = c
            order.append(state)
    head = 0
    edges = set()
    while head < len(order):
        state = order[head]
        head += 1
        for c in t.y_alphabet:
            nxt = frozenset(u for s in state for u in t.x.successors(s)
                            if t.label[u] == c)
            if not nxt:
                continue
            if nxt not in label_of:
                label_of[nxt] = c
                order.append(nxt)
            edges.add((state, nxt))

    xorder = {s: i for i, s in enumerate(t.x.symbols)}

    def name(state):
        return "+".join(sorted(state, key=xorder.get))

    # Essentialize the state graph; acceptance of finite blocks is
    # preserved because every run can be stabilized on the left into the
    # essential part.
    alive = set(order)
    changed = True
    while changed:
        changed = False
        for s in list(alive):
            if not any(a == s and b in alive for (a, b) in edges):
                alive.discard(s)
                changed = True
                continue
            if not any(b == s and a in alive for (a, b) in edges):
                alive.discard(s)
                changed = True
    if not alive:
        raise EmptyShiftError("image shift is empty")
    kept = [s for s in order if s in alive]
    names = tuple(name(s) for s in kept)
    name_of = {s: name(s) for s in kept}
    sft = Sft(names, frozenset((name_of[a], name_of[b]) for (a, b) in edges
                               if a in alive and b in alive))
    label = {name_of[s]: label_of[s] for s in kept}
    used = {label[nm] for nm in names}
    triple = FactorTriple(sft, label,
                          tuple(c for c in t.y_alphabet if c in used))
    members = {name_of[s]: s for s in kept}
    return SoficImage(triple, members,
                      graphs.is_strongly_connected(sft.adjacency()))


def image_irreducible(t):
    """Certified irreducibility of the image shift.

    Either the domain is irreducible (a factor of an irreducible shift is
    irreducible) or the canonical presentation is strongly connected.
    """
    return is_irreducible(t.x) or sofic_image(t).irreducible


def image_blocks(t, n):
    """All n-blocks of the image shift, lexicographic in the image
    alphabet order; enumerated directly on X via nonempty forward sets."""
    if n < 1:
        raise ValueError("block length must be >= 1")
    out = []

    def extend(word, fset):
        if len(word) == n:
            out.append(tuple(word))
            return
        for c in t.y_alphabet:
            nxt = frozenset(u for s in fset for u in t.x.successors(s)
                            if t.label[u] == c)
            if nxt:
                word.append(c)
                extend(word, nxt)
                word.pop()

    for c in t.y_alphabet:
        extend([c], frozenset(t.preimages(c)))
    return out


def degree(t, strict=False):
    """Degree of a finite-to-one code over an irreducible image: the
    minimal number of preimages of an image point, equal to d*.

    With strict=True the domain itself must be irreducible as well.
    """
    if not is_finite_to_one(t):
        raise PreconditionError("degree undefined (infinite-to-one code)")
    if strict and not is_irreducible(t.x):
        raise PreconditionError("domain shift is not irreducible")
    if not image_irreducible(t):
        raise PreconditionError("image shift is not certified irreducible")
    return d_star(t).value


def periodic_image_points(t, max_period):
    """Orbit representatives of image points with period <= max_period.

    Enumerates cycles of the presentation graph and canonicalizes the
    label words (primitive root, least rotation). Sorted by (period, word).
    """
    if max_period < 1:
        raise ValueError("max_period must be >= 1")
    image = sofic_image(t)
    sft = image.triple.x
    label = image.triple.label
    yorder = {c: i for i, c in enumerate(t.y_alphabet)}
    seen = set()

    def record(state_cycle):
        word = tuple(label[s] for s in state_cycle)
        seen.add(canonical_orbit_word(word))

    for start in sft.symbols:
        stack = [(start, [start])]
        while stack:
            node, path = stack.pop()
            for nxt in sft.successors(node):
                if nxt == start:
                    record(path)
                if len(path) < max_period:
                    stack.append((nxt, path + [nxt]))

    words = [w for w in seen if len(w) <= max_period]
    words.sort(key=lambda w: (len(w), tuple(yorder[c] for c in w)))
    return [PeriodicPoint(w) for w in words]
