"""Words over ``{b, r, g}``, their lattice walks, and parenthesis structure.

A word ``w_1 ... w_{3n}`` is read as a lattice walk through the step map

    b -> (1, -1),   r -> (-1, 0),   g -> (0, 1)

All indices exposed by this module are 1-based (``w_1`` is the first letter).
Window words taken from a bi-infinite sequence carry an ``offset`` giving the
index of their first letter, so index 0 and negative indices can occur.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

LETTERS = ("b", "r", "g")
STEPS = {"b": (1, -1), "r": (-1, 0), "g": (0, 1)}
_LETTER_OF_STEP = {v: k for k, v in STEPS.items()}


class InvalidWordError(ValueError):
    pass


class InvalidStepError(ValueError):
    def __init__(self, index: int, step: tuple[int, int]):
        super().__init__(f"step {step} at index {index} is not one of (1,-1), (-1,0), (0,1)")
        self.index = index
        self.step = step


class InvalidDyckError(ValueError):
    pass


class NotInWnError(ValueError):
    """Raised when an operation needs a member of W_n; carries the report."""

    def __init__(self, report: "MembershipReport"):
        super().__init__(f"word is not in W_n: {report.summary()}")
        self.report = report


@dataclass(frozen=True)
class Word:
    letters: str
    offset: int = 1

    def __post_init__(self):
        bad = set(self.letters) - set(LETTERS)
        if bad:
            raise InvalidWordError(f"letters outside {{b,r,g}}: {sorted(bad)}")

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return self.letters

    def __iter__(self) -> Iterator[str]:
        return iter(self.letters)

    def __getitem__(self, i: int) -> str:
        j = i - self.offset
        if not 0 <= j < len(self.letters):
            raise IndexError(f"index {i} outside [{self.first}, {self.last}]")
        return self.letters[j]

    @property
    def first(self) -> int:
        return self.offset

    @property
    def last(self) -> int:
        return self.offset + len(self.letters) - 1

    @property
    def n(self) -> int:
        return len(self.letters) // 3

    def indices(self) -> range:
        return range(self.first, self.last + 1)

    def count(self, letter: str) -> int:
        return self.letters.count(letter)


def as_word(w: Word | str) -> Word:
    return w if isinstance(w, Word) else Word(str(w))


@dataclass(frozen=True)
class LatticeWalk:
    points: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.points)

    @property
    def L(self) -> list[int]:
        return [p[0] for p in self.points]

    @property
    def R(self) -> list[int]:
        return [p[1] for p in self.points]

    def to_csv(self) -> str:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["L", "R"])
        out.writerows(self.points)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "LatticeWalk":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [c.strip() for c in rows[0]] != ["L", "R"]:
            raise ValueError('walk CSV must start with the header "L,R"')
        return cls(tuple((int(a), int(b)) for a, b in rows[1:] if (a, b) != ("", "")))


def walk_of_word(w: Word | str) -> LatticeWalk:
    x = y = 0
    pts = [(0, 0)]
    for c in as_word(w):
        dx, dy = STEPS[c]
        x += dx
        y += dy
        pts.append((x, y))
    return LatticeWalk(tuple(pts))


def word_of_walk(z: LatticeWalk | Sequence[tuple[int, int]]) -> Word:
    pts = z.points if isinstance(z, LatticeWalk) else tuple(z)
    out = []
    for k in range(1, len(pts)):
        step = (pts[k][0] - pts[k - 1][0], pts[k][1] - pts[k - 1][1])
        try:
            out.append(_LETTER_OF_STEP[step])
        except KeyError:
            raise InvalidStepError(k, step) from None
    return Word("".join(out))


# -- membership ---------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    kind: str  # "length" | "quadrant" | "endpoint" | "r_then_b"
    index: int | None = None
    detail: str = ""


@dataclass(frozen=True)
class MembershipReport:
    n: int
    violations: tuple[Violation, ...] = ()

    @property
    def member(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.member

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def summary(self) -> str:
        if self.member:
            return "member"
        return "; ".join(f"{v.kind}@{v.index}: {v.detail}" if v.index is not None
                         else f"{v.kind}: {v.detail}" for v in self.violations)


def validate_Wn(w: Word | str) -> MembershipReport:
    """Check every defining condition of W_n and list all that fail."""
    w = as_word(w)
    s = w.letters
    out: list[Violation] = []
    if len(s) % 3:
        out.append(Violation("length", None, f"length {len(s)} is not a multiple of 3"))
    x = y = 0
    exited = False
    for k, c in enumerate(s, start=1):
        dx, dy = STEPS[c]
        x += dx
        y += dy
        if not exited and (x < 0 or y < 0):
            exited = True
            out.append(Violation("quadrant", k, f"walk reaches ({x},{y})"))
    if (x, y) != (0, 0):
        out.append(Violation("endpoint", len(s), f"walk ends at ({x},{y})"))
    for k in range(1, len(s)):
        if s[k - 1] == "r" and s[k] == "b":
            out.append(Violation("r_then_b", k, f"r at {k} followed by b at {k + 1}"))
    return MembershipReport(len(s) // 3, tuple(out))


def require_Wn(w: Word | str) -> Word:
    w = as_word(w)
    rep = validate_Wn(w)
    if not rep.member:
        raise NotInWnError(rep)
    return w


# -- matchings ----------------------------------------------------------------

_KINDS = {"gb": ("g", "b"), "br": ("b", "r")}


@dataclass(frozen=True)
class MatchTable:
    kind: str
    pairs: tuple[tuple[int, int], ...]
    unmatched: tuple[int, ...] = ()
    partner: dict[int, int] = field(default_factory=dict, compare=False, repr=False)

    def match_of(self, i: int) -> int | None:
        return self.partner.get(i)


def match_pairs(w: Word | str, kind: str) -> MatchTable:
    """Parenthesis matching of the two-letter subword named by ``kind``.

    For ``gb`` the g's open and the b's close; for ``br`` the b's open and the
    r's close.  Pairs are listed in order of their closing index.
    """
    try:
        opener, closer = _KINDS[kind]
    except KeyError:
        raise ValueError(f"kind must be 'gb' or 'br', not {kind!r}") from None
    w = as_word(w)
    stack: list[int] = []
    pairs: list[tuple[int, int]] = []
    lone_closers: list[int] = []
    for i, c in zip(w.indices(), w.letters):
        if c == opener:
            stack.append(i)
        elif c == closer:
            if stack:
                pairs.append((stack.pop(), i))
            else:
                lone_closers.append(i)
    partner = {}
    for j, k in pairs:
        partner[j] = k
        partner[k] = j
    return MatchTable(kind, tuple(pairs), tuple(sorted(lone_closers + stack)), partner)


# -- Dyck paths and plane trees -----------------------------------------------

@dataclass(frozen=True)
class DyckPath:
    steps: tuple[int, ...]

    def __post_init__(self):
        h = 0
        for k, s in enumerate(self.steps, start=1):
            if s not in (1, -1):
                raise InvalidDyckError(f"step {s!r} at {k} is not +1 or -1")
            h += s
            if h < 0:
                raise InvalidDyckError(f"path goes negative at step {k}")
        if h:
            raise InvalidDyckError(f"path ends at height {h}")

    def heights(self) -> list[int]:
        h, out = 0, [0]
        for s in self.steps:
            h += s
            out.append(h)
        return out

    def matching(self) -> list[tuple[int, int]]:
        """Up/down step pairs (1-based), in order of the down step."""
        stack, out = [], []
        for k, s in enumerate(self.steps, start=1):
            if s == 1:
                stack.append(k)
            else:
                out.append((stack.pop(), k))
        return out


@dataclass
class PlaneTree:
    """Rooted plane tree; ``children`` are in clockwise order."""

    children: list["PlaneTree"] = field(default_factory=list)

    @property
    def size(self) -> int:
        return sum(1 + c.size for c in self.children)

    def __eq__(self, other):
        if not isinstance(other, PlaneTree):
            return NotImplemented
        return tree_to_dyck(self).steps == tree_to_dyck(other).steps


def tree_to_dyck(t: PlaneTree) -> DyckPath:
    """Contour function of a clockwise exploration from the root."""
    steps: list[int] = []
    stack = [(t, 0)]
    while stack:
        node, k = stack.pop()
        if k < len(node.children):
            stack.append((node, k + 1))
            steps.append(1)
            stack.append((node.children[k], 0))
        elif stack:
            steps.append(-1)
    return DyckPath(tuple(steps))


def dyck_to_tree(d: DyckPath | Iterable[int]) -> PlaneTree:
    d = d if isinstance(d, DyckPath) else DyckPath(tuple(d))
    root = PlaneTree()
    path = [root]
    for s in d.steps:
        if s == 1:
            child = PlaneTree()
            path[-1].children.append(child)
            path.append(child)
        else:
            path.pop()
    return root


# -- shear image --------------------------------------------------------------

@dataclass(frozen=True)
class ShearPair:
    abscissa: tuple[int, ...]
    ordinate: tuple[int, ...]
    non_crossing: bool


def shear_dyck_pair(w: Word | str | LatticeWalk) -> ShearPair:
    """Image of a W_n walk under (L, R) -> (L + R, R).

    The shear sends the first quadrant onto ``{x >= y >= 0}``, so the two
    coordinate paths of a W_n walk never cross.
    """
    if isinstance(w, LatticeWalk):
        word = word_of_walk(w)
        walk = w
    else:
        word = as_word(w)
        walk = walk_of_word(word)
    require_Wn(word)
    xs = tuple(a + b for a, b in walk.points)
    ys = tuple(b for _, b in walk.points)
    ok = all(x >= y >= 0 for x, y in zip(xs, ys))
    return ShearPair(xs, ys, ok)
