"""Core objects: shifts of finite type, blocks, periodic points, factor triples.

A shift of finite type (SFT) is presented by its 1-step transition relation
on a finite alphabet of vertex symbols. A factor triple bundles an SFT with
a 1-block labeling onto an image alphabet; the labeling induces a sliding
block code onto a sofic image shift.

Symbol order is structural throughout: the order of first appearance in the
defining file (or constructor argument) fixes iteration order everywhere
downstream, which keeps every derived quantity deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from . import graphs


class FactorCodeError(Exception):
    """Base class for all structured errors raised by this package."""


class TripleParseError(FactorCodeError):
    """Malformed triple file."""


class MeasureParseError(FactorCodeError):
    """Malformed Markov measure file."""


class EmptyShiftError(FactorCodeError):
    """An operation produced or received an empty shift."""


class PreconditionError(FactorCodeError):
    """A documented precondition of an operation was violated."""


@dataclass(frozen=True)
class Sft:
    """A 1-step SFT given by allowed transitions on an ordered alphabet."""

    symbols: tuple
    transitions: frozenset

    def __post_init__(self):
        if not self.symbols:
            raise EmptyShiftError("empty shift")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("duplicate symbols")
        for a, b in self.transitions:
            if a not in self.symbol_set or b not in self.symbol_set:
                raise ValueError("transition uses unknown symbol")

    @cached_property
    def symbol_set(self):
        return frozenset(self.symbols)

    @cached_property
    def successor_map(self):
        out = {s: tuple(t for t in self.symbols if (s, t) in self.transitions)
               for s in self.symbols}
        return out

    @cached_property
    def predecessor_map(self):
        out = {s: tuple(t for t in self.symbols if (t, s) in self.transitions)
               for s in self.symbols}
        return out

    def successors(self, s):
        return self.successor_map[s]

    def predecessors(self, s):
        return self.predecessor_map[s]

    def allows(self, a, b):
        return (a, b) in self.transitions

    def adjacency(self):
        """Adjacency dict in symbol order, for the graph helpers."""
        return {s: list(self.successor_map[s]) for s in self.symbols}

    def admits_word(self, word):
        """Whether a finite symbol sequence is a block of the shift."""
        if not word:
            return False
        for s in word:
            if s not in self.symbol_set:
                return False
        return all(self.allows(a, b) for a, b in zip(word, word[1:]))

    def admits_cycle(self, word):
        """Whether the sequence repeats into a valid periodic point."""
        return self.admits_word(word) and self.allows(word[-1], word[0])

    @cached_property
    def is_essential(self):
        return all(self.successor_map[s] and self.predecessor_map[s]
                   for s in self.symbols)


def make_sft(symbols, edges):
    return Sft(tuple(symbols), frozenset((a, b) for a, b in edges))


@dataclass(frozen=True)
class Block:
    """A finite word placed at integer coordinates [start, start+len-1]."""

    symbols: tuple
    start: int = 0

    def __post_init__(self):
        if not self.symbols:
            raise ValueError("empty block")

    def __len__(self):
        return len(self.symbols)

    @property
    def end(self):
        return self.start + len(self.symbols) - 1

    def __getitem__(self, i):
        return self.symbols[i]


@dataclass(frozen=True)
class PeriodicPoint:
    """A periodic bi-infinite point, stored as one period starting at 0."""

    word: tuple

    def __post_init__(self):
        if not self.word:
            raise ValueError("empty period word")

    @property
    def period(self):
        return len(self.word)

    def symbol_at(self, i):
        return self.word[i % len(self.word)]

    def window(self, start, stop):
        """Symbols at coordinates start..stop inclusive."""
        return tuple(self.symbol_at(i) for i in range(start, stop + 1))


def primitive_root(word):
    """Shortest word whose repetition gives ``word``."""
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and word == word[:d] * (n // d):
            return word[:d]
    return word


def least_rotation(word):
    """Lexicographically least rotation, comparing by position tuples."""
    return min(tuple(word[(i + j) % len(word)] for j in range(len(word)))
               for i in range(len(word)))


def canonical_orbit_word(word):
    """Canonical representative of the orbit of ``word``-periodic points."""
    return least_rotation(primitive_root(tuple(word)))


@dataclass
class FactorTriple:
    """An SFT together with a 1-block factor map onto an image alphabet.

    ``label`` sends each SFT symbol to an image symbol; ``y_alphabet`` is
    the ordered image alphabet (every member has at least one preimage).
    """

    x: Sft
    label: dict
    y_alphabet: tuple

    def __post_init__(self):
        if set(self.label) != set(self.x.symbols):
            raise ValueError("label map must cover exactly the SFT alphabet")
        used = {self.label[s] for s in self.x.symbols}
        if not set(self.y_alphabet) >= used:
            raise ValueError("label map uses undeclared image symbol")
        if set(self.y_alphabet) != used:
            raise ValueError("image alphabet has a symbol with no preimage")

    @cached_property
    def preimage_map(self):
        out = {c: tuple(s for s in self.x.symbols if self.label[s] == c)
               for c in self.y_alphabet}
        return out

    def preimages(self, c):
        if c not in self.preimage_map:
            raise ValueError("unknown image symbol %r" % (c,))
        return self.preimage_map[c]

    def label_word(self, word):
        return tuple(self.label[s] for s in word)


def essentialize(x):
    """Largest essential sub-SFT: every symbol keeps a successor and a
    predecessor. Iterates removal to a fixed point; raises EmptyShiftError
    when nothing survives."""
    alive = set(x.symbols)
    changed = True
    while changed:
        changed = False
        for s in list(alive):
            has_out = any(t in alive for t in x.successor_map[s])
            has_in = any(t in alive for t in x.predecessor_map[s])
            if not (has_out and has_in):
                alive.discard(s)
                changed = True
    if not alive:
        raise EmptyShiftError("empty shift")
    symbols = tuple(s for s in x.symbols if s in alive)
    transitions = frozenset((a, b) for (a, b) in x.transitions
                            if a in alive and b in alive)
    return Sft(symbols, transitions)


def essentialize_triple(t):
    x = essentialize(t.x)
    label = {s: t.label[s] for s in x.symbols}
    used = {label[s] for s in x.symbols}
    y_alphabet = tuple(c for c in t.y_alphabet if c in used)
    return FactorTriple(x, label, y_alphabet)


def is_irreducible(x):
    """Irreducibility of an essential SFT = strong connectivity."""
    return graphs.is_strongly_connected(x.adjacency())


def _parse_pair(token, lineno, kind):
    parts = token.split(">")
    if len(parts) != 2 or not parts[0] or not parts[1]:
        raise TripleParseError(
            "line %d: malformed %s token %r (expected a>b)"
            % (lineno, kind, token))
    return parts[0], parts[1]


def parse_triple(text):
    """Parse the triple file format into an essentialized FactorTriple.

    The format is line oriented: '#' lines are comments, every other
    nonblank line is ``key: tokens`` with keys xsymbols, ysymbols, map,
    edges. Sections may repeat and appear in any order; token order fixes
    symbol order. The parsed SFT is essentialized before being returned,
    and image symbols that lose every preimage are dropped.
    """
    xsymbols = []
    ysymbols = []
    label_entries = []
    edge_entries = []
    seen_x = set()
    seen_y = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            raise TripleParseError("line %d: expected 'key: tokens'" % lineno)
        key = key.strip()
        tokens = rest.split()
        if key == "xsymbols":
            for tok in tokens:
                if ">" in tok:
                    raise TripleParseError(
                        "line %d: symbol %r may not contain '>'"
                        % (lineno, tok))
                if tok in seen_x:
                    raise TripleParseError(
                        "line %d: duplicate x symbol %r" % (lineno, tok))
                seen_x.add(tok)
                xsymbols.append(tok)
        elif key == "ysymbols":
            for tok in tokens:
                if ">" in tok:
                    raise TripleParseError(
                        "line %d: symbol %r may not contain '>'"
                        % (lineno, tok))
                if tok in seen_y:
                    raise TripleParseError(
                        "line %d: duplicate y symbol %r" % (lineno, tok))
                seen_y.add(tok)
                ysymbols.append(tok)
        elif key == "map":
            for tok in tokens:
                label_entries.append((lineno, _parse_pair(tok, lineno, "map")))
        elif key == "edges":
            for tok in tokens:
                edge_entries.append((lineno, _parse_pair(tok, lineno, "edge")))
        else:
            raise TripleParseError("line %d: unknown section %r" % (lineno, key))

    if not xsymbols:
        raise TripleParseError("no xsymbols declared")
    if not ysymbols:
        raise TripleParseError("no ysymbols declared")

    label = {}
    for lineno, (s, c) in label_entries:
        if s not in seen_x:
            raise TripleParseError("line %d: unknown x symbol %r" % (lineno, s))
        if c not in seen_y:
            raise TripleParseError("line %d: unknown y symbol %r" % (lineno, c))
        if s in label:
            raise TripleParseError(
                "line %d: symbol %r labeled twice" % (lineno, s))
        label[s] = c
    missing = [s for s in xsymbols if s not in label]
    if missing:
        raise TripleParseError("unlabeled x symbols: %s" % " ".join(missing))

    edges = set()
    for lineno, (a, b) in edge_entries:
        if a not in seen_x:
            raise TripleParseError("line %d: unknown x symbol %r" % (lineno, a))
        if b not in seen_x:
            raise TripleParseError("line %d: unknown x symbol %r" % (lineno, b))
        if (a, b) in edges:
            raise TripleParseError(
                "line %d: duplicate edge %s>%s" % (lineno, a, b))
        edges.add((a, b))
    if not edges:
        raise TripleParseError("no edges declared")

    raw_triple = FactorTriple(
        Sft(tuple(xsymbols), frozenset(edges)),
        label,
        tuple(c for c in ysymbols if any(label[s] == c for s in xsymbols)))
    return essentialize_triple(raw_triple)


def triple_to_text(t):
    """Serialize a triple back to the file format, deterministically."""
    lines = []
    lines.append("xsymbols: " + " ".join(t.x.symbols))
    lines.append("ysymbols: " + " ".join(t.y_alphabet))
    lines.append("map: " + " ".join(
        "%s>%s" % (s, t.label[s]) for s in t.x.symbols))
    edge_toks = []
    for a in t.x.symbols:
        for b in t.x.successors(a):
            edge_toks.append("%s>%s" % (a, b))
    lines.append("edges: " + " ".join(edge_toks))
    return "\n".join(lines) + "\n"


def enumerate_blocks(x, n):
    """All n-blocks of an essential SFT, lexicographic in symbol order."""
    if n < 1:
        raise ValueError("block length must be >= 1")
    order = {s: i for i, s in enumerate(x.symbols)}
    out = []

    def extend(prefix):
        if len(prefix) == n:
            out.append(Block(tuple(prefix)))
            return
        for t_ in x.successors(prefix[-1]):
            prefix.append(t_)
            extend(prefix)
            prefix.pop()

    for s in sorted(x.symbols, key=order.get):
        extend([s])
    return out


@dataclass
class BlockRecoding:
    """Conjugacy data for a higher-block recoding.

    Maps blocks and periodic points both ways between the base triple and
    the recoded one. Recoded symbols are named by joining the base window
    with '.'; the name-to-window mapping is stored explicitly so recodings
    of already-recoded triples stay unambiguous.
    """

    n: int
    base: FactorTriple
    recoded: FactorTriple
    windows: dict = field(default_factory=dict)

    def _window_name(self, window):
        name = ".".join(window)
        if self.windows.get(name, window) != window:
            raise ValueError("ambiguous recoded symbol name %r" % name)
        return name

    def _window_of(self, name):
        if self.n == 1:
            return (name,)
        return self.windows[name]

    def to_recoded_block(self, b):
        if len(b) < self.n:
            raise ValueError("block shorter than the recoding window")
        syms = tuple(self._window_name(b.symbols[i:i + self.n])
                     for i in range(len(b) - self.n + 1))
        return Block(syms, b.start)

    def to_base_block(self, b):
        windows = [self._window_of(s) for s in b.symbols]
        syms = tuple(w[0] for w in windows) + windows[-1][1:]
        return Block(syms, b.start)

    def to_recoded_point(self, p):
        q = p.period
        syms = tuple(self._window_name(tuple(p.symbol_at(i + j)
                                             for j in range(self.n)))
                     for i in range(q))
        return PeriodicPoint(syms)

    def to_base_point(self, p):
        return PeriodicPoint(tuple(self._window_of(s)[0] for s in p.word))


def higher_block(t, n):
    """Recode a triple to its n-block presentation.

    Symbols of the recoded SFT are the admissible n-blocks of the base,
    transitions follow progressive overlap, and each n-block inherits the
    label of its first symbol, so the induced image shift is unchanged.
    Returns the recoded triple and the two-way conjugacy maps; n = 1 gives
    the triple itself with identity maps.
    """
    if n < 1:
        raise ValueError("recoding window must be >= 1")
    if n == 1:
        return t, BlockRecoding(1, t, t)
    blocks = enumerate_blocks(t.x, n)
    names = [".".join(b.symbols) for b in blocks]
    if len(set(names)) != len(names):
        raise ValueError("symbol names collide under '.' joining")
    windows = {name: b.symbols for name, b in zip(names, blocks)}
    edges = set()
    for u in names:
        for v in names:
            if windows[u][1:] == windows[v][:-1]:
                edges.add((u, v))
    x = Sft(tuple(names), frozenset(edges))
    label = {u: t.label[windows[u][0]] for u in names}
    recoded = FactorTriple(x, label, t.y_alphabet)
    if not recoded.x.is_essential:
        raise ValueError("recoding of a non-essential SFT")
    return recoded, BlockRecoding(n, t, recoded, windows)
