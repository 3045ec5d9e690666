"""Shared brute-force oracles and random generators for the test suite.

Every oracle here recomputes its answer by exhaustive enumeration with
itertools, independently of the library's sweeps, automata, and graph
algorithms, so agreement between the two is meaningful evidence. Oracles
are only usable at desk scale (alphabets of a handful of symbols, words of
length at most eight or so); the tests keep within that envelope.
"""

import itertools
import string
from math import lcm

from factorcode import (
    PeriodicPoint,
    canonical_orbit_word,
    fixtures,
    make_sft,
    orbit_measure,
    parry_measure,
    parse_measure,
    primitive_root,
    sofic_image,
)
from factorcode.core import FactorTriple


FIXTURE_NAMES = ("fix_a", "fix_b", "fix_c", "fix_d", "fix_e", "fix_g")

# The image-measure pairs exercised throughout: Parry measures of the
# image presentation, point masses on fixed points of the presentation,
# and the bundled empirical measure of the (01)-periodic image orbit.
MEASURE_PAIRS = (
    ("fix_a", "parry"),
    ("fix_b", "point"),
    ("fix_c", "point"),
    ("fix_d", "parry"),
    ("fix_e", "parry"),
    ("fix_e", "orbit01"),
    ("fix_g", "parry"),
)


def image_measure(t, kind):
    """Build one of the standard image measures for a fixture triple."""
    pres = sofic_image(t).triple
    if kind == "parry":
        return pres, parry_measure(pres.x)
    if kind == "point":
        return pres, orbit_measure(pres.x,
                                   PeriodicPoint((pres.x.symbols[0],)))
    if kind == "orbit01":
        text = fixtures.load_text("fix_e_orbit01.measure")
        return pres, parse_measure(text, pres.x)
    raise ValueError(kind)


def all_words(x, n):
    """Every admissible n-word of the SFT, by raw product enumeration."""
    out = []
    for u in itertools.product(x.symbols, repeat=n):
        if all(x.allows(u[i], u[i + 1]) for i in range(n - 1)):
            out.append(u)
    return out


def all_cycle_words(x, n):
    """Admissible n-words that close into a cycle (u[-1] -> u[0])."""
    return [u for u in all_words(x, n) if x.allows(u[-1], u[0])]


def brute_preimage_blocks(t, word):
    """All domain words mapping onto ``word``.

    Grown one coordinate at a time with the label filter applied eagerly,
    which keeps long low-preimage words tractable; no sweeps, no automata.
    """
    word = tuple(word)
    paths = [(s,) for s in t.x.symbols if t.label[s] == word[0]]
    for c in word[1:]:
        paths = [p + (u,) for p in paths for u in t.x.successors(p[-1])
                 if t.label[u] == c]
    return paths


def brute_profile(t, word, index):
    return frozenset(u[index] for u in brute_preimage_blocks(t, word))


def brute_image_words(t, n):
    return {t.label_word(u) for u in all_words(t.x, n)}


def brute_route(t, word, u, index, a, blocks=None):
    """Can preimage u of word be rerouted through a at index, keeping its
    endpoints? Checked against the full preimage list."""
    if blocks is None:
        blocks = brute_preimage_blocks(t, word)
    return any(v[0] == u[0] and v[-1] == u[-1] and v[index] == a
               for v in blocks)


def brute_routable(t, word, index, u, blocks=None):
    """The full route set of one preimage at one index."""
    if blocks is None:
        blocks = brute_preimage_blocks(t, word)
    return frozenset(v[index] for v in blocks
                     if v[0] == u[0] and v[-1] == u[-1])


def brute_min_depth(t, word):
    """Minimal transition-block depth of a word by exhaustive hitting sets.

    Returns None when the word has no preimage. Only the depth value is
    canonical; index and symbol-set tie-breaking is the library's policy
    and is tested separately against frozen expectations.
    """
    word = tuple(word)
    blocks = brute_preimage_blocks(t, word)
    if not blocks:
        return None
    best = None
    for index in range(1, len(word) - 1):
        pool = sorted({u[index] for u in blocks})
        routes = [brute_routable(t, word, index, u, blocks) for u in blocks]
        found = None
        for size in range(1, len(pool) + 1):
            for combo in itertools.combinations(pool, size):
                chosen = frozenset(combo)
                if all(r & chosen for r in routes):
                    found = size
                    break
            if found is not None:
                break
        if best is None or found < best:
            best = found
    return best


def brute_is_transition_block(t, word, index, symbols):
    blocks = brute_preimage_blocks(t, word)
    if not blocks:
        return False
    symbols = frozenset(symbols)
    return all(brute_routable(t, word, index, u, blocks) & symbols
               for u in blocks)


def brute_periodic_preimages(t, y, max_period):
    """Primitive periodic preimage words of y, phase aligned at zero.

    A candidate word u of length n is a preimage point iff u closes into a
    cycle and label(u) repeated agrees with y over a full common period.
    """
    out = []
    for n in range(1, max_period + 1):
        span = lcm(n, y.period)
        for u in all_cycle_words(t.x, n):
            if primitive_root(u) != u:
                continue
            if all(t.label[u[i % n]] == y.symbol_at(i) for i in range(span)):
                out.append(u)
    return sorted(out, key=lambda u: (len(u), u))


def brute_in_image_periodic(t, word):
    """Whether the ``word``-periodic point lies in the image shift.

    Builds the phase graph over one period by hand and trims vertices
    without successors or predecessors to a fixed point; the point has a
    bi-infinite preimage iff anything survives.
    """
    n = len(word)
    vertices = {(s, i) for i in range(n) for s in t.x.symbols
                if t.label[s] == word[i]}
    while True:
        succ = {v: [(u, (v[1] + 1) % n) for u in t.x.successors(v[0])
                    if (u, (v[1] + 1) % n) in vertices] for v in vertices}
        pred = {v: [(u, (v[1] - 1) % n) for u in t.x.predecessors(v[0])
                    if (u, (v[1] - 1) % n) in vertices] for v in vertices}
        dead = {v for v in vertices if not succ[v] or not pred[v]}
        if not dead:
            return bool(vertices)
        vertices -= dead


def brute_pruned_phase_vertices(t, word):
    """(symbol, phase) pairs on bi-infinite preimages of the word-periodic
    point, by iterative trimming of the phase graph."""
    n = len(word)
    vertices = {(s, i) for i in range(n) for s in t.x.symbols
                if t.label[s] == word[i]}
    while True:
        succ = {v: [(u, (v[1] + 1) % n) for u in t.x.successors(v[0])
                    if (u, (v[1] + 1) % n) in vertices] for v in vertices}
        pred = {v: [(u, (v[1] - 1) % n) for u in t.x.predecessors(v[0])
                    if (u, (v[1] - 1) % n) in vertices] for v in vertices}
        dead = {v for v in vertices if not succ[v] or not pred[v]}
        if not dead:
            return vertices
        vertices -= dead


def brute_window_blocks(t, y, interval):
    """True preimage blocks over the window, via the trimmed phase graph."""
    m, n = interval
    vertices = brute_pruned_phase_vertices(t, y.word)
    p = y.period
    walks = [[v] for v in vertices if v[1] == m % p]
    for i in range(m + 1, n + 1):
        walks = [w + [v] for w in walks for v in vertices
                 if v[1] == i % p and t.x.allows(w[-1][0], v[0])]
    return {tuple(v[0] for v in w) for w in walks}


def brute_periodic_image_words(t, max_period):
    """Canonical periodic image orbit words, by trying every candidate."""
    out = set()
    for n in range(1, max_period + 1):
        for w in itertools.product(t.y_alphabet, repeat=n):
            if brute_in_image_periodic(t, w):
                out.add(canonical_orbit_word(w))
    return {w for w in out if len(w) <= max_period}


def random_triple(rng):
    """A random essential triple with at most five domain symbols.

    The domain always contains a full cycle through every symbol, so it is
    irreducible (hence essential); extra random edges and a random label
    map with forced image coverage give a varied population of codes.
    """
    n = rng.randint(1, 5)
    syms = tuple(string.ascii_lowercase[:n])
    edges = {(syms[i], syms[(i + 1) % n]) for i in range(n)}
    for _ in range(rng.randint(0, n)):
        edges.add((rng.choice(syms), rng.choice(syms)))
    y_size = rng.randint(1, n)
    y_syms = tuple(str(i) for i in range(y_size))
    label = {s: rng.choice(y_syms) for s in syms}
    for i in range(y_size):
        label[syms[i]] = y_syms[i]
    return FactorTriple(make_sft(syms, edges), dict(label), y_syms)
