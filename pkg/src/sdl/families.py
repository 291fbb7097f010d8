"""Graph families: Schreier graphs of self-similar groups and baselines.

Tree automorphisms are given by wreath recursions ``g = sigma(g_0, ..., g_{d-1})``
acting on words as ``g(x w) = sigma(x) g_x(w)``.  Level-``n`` words are
numbered in lexicographic order, first letter most significant.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Sequence

from .graph import GraphError, Multigraph

IDENTITY = "identity"


class SpecError(GraphError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Generator:
    name: str
    perm: tuple[int, ...]
    sections: tuple[str, ...]


@dataclass(frozen=True)
class WreathRecursionSpec:
    alphabet_size: int
    generators: tuple[Generator, ...]

    def __post_init__(self):
        d = self.alphabet_size
        if d < 2:
            raise SpecError("alphabet size must be at least 2")
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise SpecError("duplicate generator name")
        if IDENTITY in names:
            raise SpecError(f"'{IDENTITY}' is reserved")
        for g in self.generators:
            if sorted(g.perm) != list(range(d)):
                raise SpecError(f"generator {g.name}: invalid permutation {g.perm}")
            if len(g.sections) != d:
                raise SpecError(f"generator {g.name}: expected {d} sections")
            for s in g.sections:
                if s != IDENTITY and s not in names:
                    raise SpecError(f"generator {g.name}: unknown section '{s}'")

    @property
    def names(self) -> list[str]:
        return [g.name for g in self.generators]

    def generator(self, name: str) -> Generator:
        for g in self.generators:
            if g.name == name:
                return g
        raise SpecError(f"unknown generator '{name}'")


def act(spec: WreathRecursionSpec, generator: str, word: Sequence[int]) -> tuple[int, ...]:
    """Image of ``word`` under the named generator."""
    table = {g.name: g for g in spec.generators}
    if generator not in table:
        raise SpecError(f"unknown generator '{generator}'")
    out = []
    cur = generator
    for i, x in enumerate(word):
        if cur == IDENTITY:
            out.extend(word[i:])
            break
        g = table[cur]
        out.append(g.perm[x])
        cur = g.sections[x]
    return tuple(out)


def words(d: int, n: int):
    return itertools.product(range(d), repeat=n)


def word_index(word: Sequence[int], d: int) -> int:
    idx = 0
    for x in word:
        idx = idx * d + x
    return idx


def word_label(word: Sequence[int]) -> str:
    return "".join(str(x) for x in word)


def level_permutation(spec: WreathRecursionSpec, generator: str, n: int) -> list[int]:
    """The generator's action on level-``n`` words, as an index permutation."""
    d = spec.alphabet_size
    return [word_index(act(spec, generator, w), d) for w in words(d, n)]


def schreier_graph(spec: WreathRecursionSpec, level: int, name: str = "") -> Multigraph:
    """Action graph of the generators on level-``level`` words.

    Each generator must act as an involution; it contributes one edge per
    2-cycle and one loop per fixed word.
    """
    if level < 1:
        raise GraphError("level must be at least 1")
    d = spec.alphabet_size
    labels = [word_label(w) for w in words(d, level)]
    edges = []
    for gen in spec.names:
        perm = level_permutation(spec, gen, level)
        for v, w in enumerate(perm):
            if perm[w] != v:
                raise SpecError(f"generator {gen} is not an involution at level {level}")
            if v <= w:
                edges.append((v, w))
    return Multigraph.from_edges(len(labels), edges, labels, name=name)


# -- spec text format ---------------------------------------------------------

_LINE = re.compile(r"^\s*(?P<name>[A-Za-z_]\w*)\s*=\s*(?P<perm>(\([^)]*\)\s*)+)\[(?P<secs>[^\]]*)\]\s*$")
_HEADER = re.compile(r"^\s*alphabet\s+(?P<d>\d+)\s*$")


def _parse_cycles(text: str, d: int, line: int, col: int) -> tuple[int, ...]:
    perm = list(range(d))
    seen: set[int] = set()
    for m in re.finditer(r"\(([^)]*)\)", text):
        items = m.group(1).replace(",", " ").split()
        try:
            cyc = [int(t) for t in items]
        except ValueError:
            raise SpecError(f"non-integer letter in cycle '{m.group(0)}'", line, col + m.start()) from None
        for x in cyc:
            if not 0 <= x < d:
                raise SpecError(f"letter {x} out of range for alphabet {d}", line, col + m.start())
            if x in seen:
                raise SpecError(f"letter {x} repeated in permutation", line, col + m.start())
            seen.add(x)
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            perm[a] = b
    return tuple(perm)


def parse_spec(text: str) -> WreathRecursionSpec:
    """Parse the text format::

        alphabet 3
        a = (0 1) [1, 1, a]

    Permutations are in cycle notation (``()`` for the identity) and ``1``
    stands for an identity section.  ``#`` starts a comment.
    """
    d = None
    raw: list[tuple[str, tuple[int, ...], list[tuple[str, int]], int]] = []
    for lineno, full in enumerate(text.splitlines(), start=1):
        body = full.split("#", 1)[0]
        if not body.strip():
            continue
        h = _HEADER.match(body)
        if h:
            if d is not None:
                raise SpecError("duplicate alphabet header", lineno, 1)
            d = int(h.group("d"))
            if d < 2:
                raise SpecError("alphabet size must be at least 2", lineno, h.start("d") + 1)
            continue
        m = _LINE.match(body)
        if not m:
            raise SpecError("expected 'name = (perm) [sections]'", lineno, 1)
        if d is None:
            raise SpecError("missing 'alphabet d' header before generators", lineno, 1)
        perm = _parse_cycles(m.group("perm"), d, lineno, m.start("perm") + 1)
        secs = []
        pos = m.start("secs")
        for tok in m.group("secs").split(","):
            col = pos + len(tok) - len(tok.lstrip()) + 1
            secs.append((tok.strip(), col))
            pos += len(tok) + 1
        if len(secs) != d:
            raise SpecError(f"expected {d} sections, got {len(secs)}", lineno, m.start("secs") + 1)
        if any(name == m.group("name") for name, *_ in raw):
            raise SpecError(f"duplicate generator '{m.group('name')}'", lineno, m.start("name") + 1)
        raw.append((m.group("name"), perm, secs, lineno))
    if d is None:
        raise SpecError("missing 'alphabet d' header")
    names = {r[0] for r in raw}
    gens = []
    for name, perm, secs, lineno in raw:
        resolved = []
        for s, col in secs:
            if s == "1":
                resolved.append(IDENTITY)
            elif s in names:
                resolved.append(s)
            else:
                raise SpecError(f"unknown section name '{s}'", lineno, col)
        gens.append(Generator(name, perm, tuple(resolved)))
    return WreathRecursionSpec(d, tuple(gens))


def format_spec(spec: WreathRecursionSpec) -> str:
    lines = [f"alphabet {spec.alphabet_size}"]
    for g in spec.generators:
        cycles = []
        seen: set[int] = set()
        for start in range(spec.alphabet_size):
            if start in seen or g.perm[start] == start:
                continue
            cyc = [start]
            seen.add(start)
            x = g.perm[start]
            while x != start:
                cyc.append(x)
                seen.add(x)
                x = g.perm[x]
            cycles.append("(" + " ".join(map(str, cyc)) + ")")
        secs = ", ".join("1" if s == IDENTITY else s for s in g.sections)
        lines.append(f"{g.name} = {''.join(cycles) or '()'} [{secs}]")
    return "\n".join(lines) + "\n"


HANOI_SPEC_TEXT = """\
alphabet 3
a = (0 1) [1, 1, a]
b = (0 2) [1, b, 1]
c = (1 2) [c, 1, 1]
"""

GRIGORCHUK_SPEC_TEXT = """\
alphabet 2
a = (0 1) [1, 1]
b = () [a, c]
c = () [a, d]
d = () [1, b]
"""

HANOI_SPEC = WreathRecursionSpec(
    3,
    (
        Generator("a", (1, 0, 2), (IDENTITY, IDENTITY, "a")),
        Generator("b", (2, 1, 0), (IDENTITY, "b", IDENTITY)),
        Generator("c", (0, 2, 1), ("c", IDENTITY, IDENTITY)),
    ),
)

GRIGORCHUK_SPEC = WreathRecursionSpec(
    2,
    (
        Generator("a", (1, 0), (IDENTITY, IDENTITY)),
        Generator("b", (0, 1), ("a", "c")),
        Generator("c", (0, 1), ("a", "d")),
        Generator("d", (0, 1), (IDENTITY, "b")),
    ),
)


def _check_level(n: int, lo: int, hi: int, family: str) -> None:
    if not isinstance(n, int) or not lo <= n <= hi:
        raise GraphError(f"{family} level must be in {lo}..{hi}, got {n}")


def hanoi_graph(n: int) -> Multigraph:
    """Pascal graph: Schreier graph of the Hanoi Towers group on 3 pegs."""
    _check_level(n, 1, 8, "hanoi")
    return schreier_graph(HANOI_SPEC, n, name=f"hanoi-{n}")


def grigorchuk_graph(n: int) -> Multigraph:
    _check_level(n, 1, 12, "grigorchuk")
    return schreier_graph(GRIGORCHUK_SPEC, n, name=f"grigorchuk-{n}")


def lamplighter_graph(n: int) -> Multigraph:
    """Cayley graph of Z_2 wr Z_n for generators s (lamp flip) and t (shift).

    Vertex ``pos * 2**n + lamps`` is the element with the lamp configuration
    bitmask ``lamps`` and the lamplighter at ``pos``.  Right multiplication by
    ``s`` flips the lamp under the lamplighter, by ``t`` moves it one step.
    """
    _check_level(n, 2, 10, "lamplighter")
    size = 1 << n

    def index(lamps, pos):
        return pos * size + lamps

    labels = []
    s_edges = []
    t_pairs = set()
    for pos in range(n):
        for lamps in range(size):
            labels.append(format(lamps, f"0{n}b")[::-1] + f"@{pos}")
            v = index(lamps, pos)
            w = index(lamps ^ (1 << pos), pos)
            if v < w:
                s_edges.append((v, w))
            w = index(lamps, (pos + 1) % n)
            # t and t^-1 jointly give one edge per pair {v, vt}
            t_pairs.add((min(v, w), max(v, w)))
    return Multigraph.from_edges(
        n * size, s_edges + sorted(t_pairs), labels, transitive=True, name=f"lamplighter-{n}"
    )


def ball_path_graph(n: int) -> Multigraph:
    """Radius-``n`` ball of the 3-regular tree with a path of ``|B(n)|`` new
    vertices hung off the centre.  Vertex 0 is the centre; ball vertices come
    first in BFS order, then the path."""
    _check_level(n, 1, 10, "ball_path")
    edges = []
    frontier = [0]
    count = 1
    for depth in range(n):
        nxt = []
        for x in frontier:
            for _ in range(3 if depth == 0 else 2):
                edges.append((x, count))
                nxt.append(count)
                count += 1
        frontier = nxt
    ball = count
    prev = 0
    for i in range(ball):
        edges.append((prev, ball + i))
        prev = ball + i
    labels = [f"t{i}" for i in range(ball)] + [f"p{i + 1}" for i in range(ball)]
    return Multigraph.from_edges(2 * ball, edges, labels, name=f"ball_path-{n}")


def ball_size(n: int) -> int:
    return 3 * 2**n - 2


def sierpinski_graph(n: int) -> Multigraph:
    """Sierpinski gasket graph: three level-(n-1) copies glued at corners.

    Vertices are triangular-lattice points in axial coordinates; the level-n
    gasket spans the lattice triangle with corners (0,0), (2^(n-1),0),
    (0,2^(n-1)).
    """
    _check_level(n, 1, 8, "sierpinski")
    pts = {(0, 0), (1, 0), (0, 1)}
    segs = {((0, 0), (1, 0)), ((0, 0), (0, 1)), ((0, 1), (1, 0))}
    side = 1
    for _ in range(n - 1):
        shifted_pts = set()
        shifted_segs = set()
        for ox, oy in ((0, 0), (side, 0), (0, side)):
            shifted_pts |= {(x + ox, y + oy) for x, y in pts}
            shifted_segs |= {((a[0] + ox, a[1] + oy), (b[0] + ox, b[1] + oy)) for a, b in segs}
        pts, segs = shifted_pts, shifted_segs
        side *= 2
    order = sorted(pts)
    index = {p: i for i, p in enumerate(order)}
    edges = [(index[a], index[b]) for a, b in sorted(segs)]
    labels = [f"{x},{y}" for x, y in order]
    return Multigraph.from_edges(len(order), edges, labels, name=f"sierpinski-{n}")


def standard_graph(kind: str, n: int) -> Multigraph:
    """Baseline graphs: ``cycle`` (n >= 3), ``path`` (n >= 1 vertices),
    ``complete`` (n >= 1) and ``hypercube`` (dimension n >= 1)."""
    if kind == "cycle":
        _check_level(n, 3, 100000, kind)
        return Multigraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)], transitive=True, name=f"cycle-{n}")
    if kind == "path":
        _check_level(n, 1, 100000, kind)
        return Multigraph.from_edges(n, [(i, i + 1) for i in range(n - 1)], name=f"path-{n}")
    if kind == "complete":
        _check_level(n, 1, 5000, kind)
        edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
        return Multigraph.from_edges(n, edges, transitive=True, name=f"complete-{n}")
    if kind == "hypercube":
        _check_level(n, 1, 16, kind)
        edges = [(v, v ^ (1 << b)) for v in range(1 << n) for b in range(n) if v < v ^ (1 << b)]
        labels = [format(v, f"0{n}b") for v in range(1 << n)]
        return Multigraph.from_edges(1 << n, edges, labels, transitive=True, name=f"hypercube-{n}")
    raise GraphError(f"unknown standard graph kind '{kind}'")


def petersen_graph() -> Multigraph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Multigraph.from_edges(10, outer + spokes + inner, transitive=True, name="petersen")


FAMILIES = {
    "hanoi": (hanoi_graph, 1, 8),
    "grigorchuk": (grigorchuk_graph, 1, 12),
    "lamplighter": (lamplighter_graph, 2, 10),
    "ball_path": (ball_path_graph, 1, 10),
    "sierpinski": (sierpinski_graph, 1, 8),
    "cycle": (lambda n: standard_graph("cycle", n), 3, 100000),
    "path": (lambda n: standard_graph("path", n), 1, 100000),
    "complete": (lambda n: standard_graph("complete", n), 1, 5000),
    "hypercube": (lambda n: standard_graph("hypercube", n), 1, 16),
}


def build_family(family: str, n: int) -> Multigraph:
    try:
        ctor = FAMILIES[family][0]
    except KeyError:
        raise GraphError(f"unknown family '{family}'") from None
    return ctor(n)
