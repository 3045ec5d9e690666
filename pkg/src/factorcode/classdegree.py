"""Transition blocks and the class degree search.

A transition block for an image word w is an interior index n together
with a set m of preimage symbols such that every preimage path of w can be
rerouted, keeping its endpoints and labels, through some symbol of m at
coordinate n. The depth of the block is |m|. The class degree of the code
is the minimal depth over all image words; it also equals the minimal
number of fiber transition classes over periodic image points, which is
what the certification step checks.

Route sets are computed per endpoint pair: the reroutes of a preimage U at
index n depend only on (U_0, U_end), namely the exact-length forward set
from U_0 intersected with the exact-length backward set from U_end.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from . import graphs
from .core import PeriodicPoint, PreconditionError
from .codes import (exact_backward_sweep, exact_forward_sweep, forward_sets,
                    image_blocks, image_irreducible, sofic_image)


@dataclass(frozen=True)
class TransitionBlock:
    """An image word with an interior routing index and routing symbols."""

    word: tuple
    index: int
    symbols: frozenset

    @property
    def depth(self):
        return len(self.symbols)


def _route_table(t, word):
    """Route sets of an image word, keyed by realizable endpoint pairs.

    Returns (pairs, fsweeps, bsweeps) where ``pairs`` lists the (start,
    end) symbol pairs realized by some preimage path and the sweeps give
    R(start, end, n) = fsweeps[start][n] & bsweeps[end][n].
    """
    word = tuple(word)
    fsweeps = {}
    for s in t.preimages(word[0]):
        sweep = exact_forward_sweep(t, s, word)
        if sweep[-1]:
            fsweeps[s] = sweep
    bsweeps = {}
    for e in t.preimages(word[-1]):
        sweep = exact_backward_sweep(t, e, word)
        if sweep[0]:
            bsweeps[e] = sweep
    pairs = [(s, e) for s in fsweeps for e in bsweeps
             if e in fsweeps[s][-1]]
    return pairs, fsweeps, bsweeps


def _interior_or_raise(word, index):
    if not 0 < index < len(word) - 1:
        raise ValueError("index must be interior to the word")


def routable_symbols(t, word, index, preimage):
    """Symbols through which one specific preimage path can be rerouted."""
    word = tuple(word)
    _interior_or_raise(word, index)
    path = tuple(preimage.symbols if hasattr(preimage, "symbols")
                 else preimage)
    if len(path) != len(word) or not t.x.admits_word(path) \
            or t.label_word(path) != word:
        raise ValueError("block is not a preimage of the word")
    fsweep = exact_forward_sweep(t, path[0], word)
    bsweep = exact_backward_sweep(t, path[-1], word)
    return frozenset(fsweep[index] & bsweep[index])


def is_transition_block(t, word, index, symbols):
    """Machine check of the transition block property."""
    word = tuple(word)
    _interior_or_raise(word, index)
    symbols = frozenset(symbols)
    if not symbols or not symbols <= set(t.preimages(word[index])):
        return False
    pairs, fsweeps, bsweeps = _route_table(t, word)
    if not pairs:
        return False
    return all(fsweeps[s][index] & bsweeps[e][index] & symbols
               for s, e in pairs)


def transition_block(t, word, index, symbols):
    """Constructor that machine-checks the routing property."""
    word = tuple(word)
    _interior_or_raise(word, index)
    if not forward_sets(t, word)[-1]:
        raise ValueError("word is not an image block")
    symbols = frozenset(symbols)
    if not is_transition_block(t, word, index, symbols):
        raise PreconditionError("not a transition block: routing fails")
    return TransitionBlock(word, index, symbols)


def _min_hitting_set(route_sets, pool):
    """Smallest subset of ``pool`` meeting every route set; the first
    combination in lexicographic pool order wins ties."""
    for size in range(1, len(pool) + 1):
        for combo in combinations(pool, size):
            chosen = set(combo)
            if all(chosen & rs for rs in route_sets):
                return combo
    return None


def minimal_depth_at(t, word):
    """Minimal transition block depth of one image word.

    Returns (index, symbols) minimizing |symbols| over interior indices;
    ties prefer the smallest index, then the lexicographically least
    symbol set (in domain symbol order).
    """
    word = tuple(word)
    if len(word) < 3:
        raise ValueError("word must have length >= 3")
    pairs, fsweeps, bsweeps = _route_table(t, word)
    if not pairs:
        raise ValueError("word is not an image block")
    xorder = {s: i for i, s in enumerate(t.x.symbols)}
    best = None
    for n in range(1, len(word) - 1):
        route_sets = [fsweeps[s][n] & bsweeps[e][n] for s, e in pairs]
        pool = sorted(set().union(*route_sets), key=xorder.get)
        if best is not None:
            # only a strictly smaller depth can improve on an earlier index
            found = None
            for size in range(1, len(best[1])):
                for combo in combinations(pool, size):
                    if all(set(combo) & rs for rs in route_sets):
                        found = combo
                        break
                if found:
                    break
            if found:
                best = (n, found)
        else:
            best = (n, _min_hitting_set(route_sets, pool))
    return best[0], frozenset(best[1])


@dataclass
class DepthSearchResult:
    """Outcome of the class degree search.

    ``value`` is the smallest depth found up to the horizon; when
    ``certified`` is true a periodic image point with exactly ``value``
    transition classes was exhibited (the ``certificate``), which pins the
    class degree to ``value`` exactly. An uncertified value is still a
    valid upper bound.
    """

    value: int
    witness: TransitionBlock
    horizon: int
    certified: bool
    certificate: PeriodicPoint | None


def _present_word(presentation, word, allowed=None):
    """Run a word through the right-resolving presentation.

    Returns the state path (one state per coordinate) from the first
    start state that carries the word, or None. ``allowed`` optionally
    restricts the states and edges."""
    sft = presentation.x
    label = presentation.label
    for start in sft.symbols:
        if label[start] != word[0]:
            continue
        if allowed is not None and start not in allowed["states"]:
            continue
        path = [start]
        for c in word[1:]:
            nxt = None
            for u in sft.successors(path[-1]):
                if label[u] != c:
                    continue
                if allowed is not None and (
                        u not in allowed["states"]
                        or (path[-1], u) not in allowed["edges"]):
                    continue
                nxt = u
                break
            if nxt is None:
                path = None
                break
            path.append(nxt)
        if path is not None:
            return path
    return None


def _close_word(t, word, allowed=None, image=None):
    """Extend an image word into a periodic image point containing it.

    A word embeds in a periodic point iff it can be presented inside a
    single strongly connected piece of the (possibly restricted)
    presentation graph; the subset construction may also present it along
    transient states, from which no closed walk returns. So each cyclic
    component is tried in turn: present the word inside it, then return
    from the final state to the initial one along a shortest state path.
    The labels along the closed walk give the periodic point, whose window
    [0, L) equals the word."""
    if image is None:
        image = sofic_image(t)
    pres = image.triple
    adj = pres.x.adjacency()
    if allowed is not None:
        adj = {v: [u for u in adj[v]
                   if u in allowed["states"] and (v, u) in allowed["edges"]]
               for v in adj if v in allowed["states"]}
    for comp in graphs.nontrivial_components(adj):
        members = set(comp)
        sub = {"states": members,
               "edges": {(a, b) for a in comp for b in adj[a] if b in members}}
        path = _present_word(pres, word, sub)
        if path is None:
            continue
        start, end = path[0], path[-1]
        # BFS for a shortest nonempty state walk end -> start inside the
        # component; strong connectivity guarantees one exists.
        parent = {}
        queue = []
        for u in adj[end]:
            if u in members and u not in parent:
                parent[u] = None
                queue.append(u)
        head = 0
        while head < len(queue) and start not in parent:
            v = queue[head]
            head += 1
            for u in adj[v]:
                if u in members and u not in parent:
                    parent[u] = v
                    queue.append(u)
        if start not in parent:
            raise AssertionError("cyclic component failed to close a word")
        chain = []
        node = start
        while node is not None:
            chain.append(node)
            node = parent[node]
        chain.reverse()  # successors of end, ending at start
        middle = chain[:-1]
        cycle_states = path + middle
        return PeriodicPoint(tuple(pres.label[s] for s in cycle_states))
    return None


def _count_classes_over(t, y):
    from .fiber import build_fiber_graph, transition_classes
    return transition_classes(build_fiber_graph(t, y)).class_count


def _candidate_key(t, word, index, symbols):
    yorder = {c: i for i, c in enumerate(t.y_alphabet)}
    xorder = {s: i for i, s in enumerate(t.x.symbols)}
    return (len(symbols), len(word), tuple(yorder[c] for c in word), index,
            tuple(sorted(xorder[s] for s in symbols)))


def _pad_to_interior(t, word, index):
    """Extend an image word minimally so the marked index is interior."""
    word = list(word)
    while len(word) < 3 or index == 0 or index == len(word) - 1:
        if index == 0:
            for c in t.y_alphabet:
                if forward_sets(t, tuple([c] + word))[-1]:
                    word.insert(0, c)
                    index += 1
                    break
            else:
                raise PreconditionError("image word admits no left extension")
        else:
            for c in t.y_alphabet:
                if forward_sets(t, tuple(word + [c]))[-1]:
                    word.append(c)
                    break
            else:
                raise PreconditionError("image word admits no right extension")
    return tuple(word), index


def _depth_search(t, horizon, words_of_length, seed_word, image, allowed):
    """Shared search core for the plain and measure-restricted variants."""
    best = None
    failed = set()
    top_length = 0

    def consider(word):
        nonlocal best
        n, m = minimal_depth_at(t, word)
        key = _candidate_key(t, word, n, m)
        if best is None or key < best[0]:
            best = (key, word, n, m)
            return True
        return False

    def certify():
        y = _close_word(t, best[1], allowed, image)
        if y is None:
            return None
        count = _count_classes_over(t, y)
        if count > len(best[3]):
            raise AssertionError(
                "class count exceeds transition block depth")
        return y if count == len(best[3]) else None

    if seed_word is not None:
        consider(seed_word)
        top_length = len(seed_word)

    for length in range(3, horizon + 1):
        top_length = max(top_length, length)
        for word in words_of_length(length):
            if consider(word) and len(best[3]) == 1:
                certificate = certify()
                if certificate is None:
                    raise AssertionError(
                        "depth 1 block failed certification")
                return _result(t, best, top_length, certificate)
        if best[0] not in failed:
            certificate = certify()
            if certificate is not None:
                return _result(t, best, top_length, certificate)
            failed.add(best[0])
    return _result(t, best, top_length, None)


def _result(t, best, top_length, certificate):
    _, word, n, m = best
    return DepthSearchResult(
        value=len(m),
        witness=TransitionBlock(word, n, m),
        horizon=top_length,
        certified=certificate is not None,
        certificate=certificate)


def find_minimal_transition_block(t, horizon=8):
    """Search image words up to the horizon for a minimal-depth transition
    block; certify the result against a periodic point when possible.

    The search enumerates image words by length then lexicographic order,
    seeded with a block padded out of a magic word so the class degree of
    a finite-to-one code is always reached and certified. After every
    length pass the best candidate is closed into a periodic image point;
    when the number of transition classes over that point equals the
    candidate depth the result is exact (certified). An uncertified result
    is an upper bound for the class degree.
    """
    if horizon < 3:
        raise ValueError("horizon must be >= 3")
    if not image_irreducible(t):
        raise PreconditionError("image shift is not certified irreducible")
    from .codes import d_star
    witness = d_star(t)
    seed_word, _ = _pad_to_interior(t, witness.word, witness.index)
    image = sofic_image(t)
    return _depth_search(t, horizon, lambda n: image_blocks(t, n),
                         seed_word, image, None)


def class_count_for_measure(t, measure, horizon=8):
    """Minimal transition class count over points generic for a Markov
    measure on the image presentation: the depth search restricted to
    measure-positive image words, certified over measure-generic periodic
    points whenever a closure succeeds."""
    if horizon < 3:
        raise ValueError("horizon must be >= 3")
    image = sofic_image(t)
    pres = image.triple
    if tuple(measure.base.symbols) != tuple(pres.x.symbols):
        raise PreconditionError("measure is not on the image presentation")
    support_states = frozenset(
        s for s in pres.x.symbols if measure.stationary[s] > 0)
    support_edges = frozenset(
        e for e in measure.kernel if measure.kernel[e] > 0
        and e[0] in support_states and e[1] in support_states)
    allowed = {"states": support_states, "edges": support_edges}

    def words_of_length(n):
        out = []

        def extend(word, states):
            if len(word) == n:
                out.append(tuple(word))
                return
            for c in pres.y_alphabet:
                nxt = frozenset(
                    u for s in states for u in pres.x.successors(s)
                    if pres.label[u] == c and (s, u) in support_edges)
                if nxt:
                    word.append(c)
                    extend(word, nxt)
                    word.pop()

        for c in pres.y_alphabet:
            states = frozenset(s for s in support_states
                               if pres.label[s] == c)
            if states:
                extend([c], states)
        return out

    return _depth_search(t, horizon, words_of_length, None, image, allowed)
