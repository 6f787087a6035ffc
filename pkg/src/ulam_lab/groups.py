"""Group arithmetic for the three families the lab works with.

Three kinds of groups appear in the experiments: finite groups given by a
multiplication table, free groups on a small number of generators with
reduced-word arithmetic, and the integer lattices Z^d.  Elements are plain
Python values (ints for finite groups, :class:`Word` for free groups, int
tuples for lattices) so they can be dict keys and JSON payloads.

All handles and elements are immutable after construction.
"""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

DEFAULT_MAX_ELEMENTS = 200_000

WEIGHT_SUM_TOL = 1e-12


def max_elements() -> int:
    """Element cap for ball enumeration; ULAM_LAB_MAX_ELEMENTS overrides."""
    raw = os.environ.get("ULAM_LAB_MAX_ELEMENTS")
    if raw is None:
        return DEFAULT_MAX_ELEMENTS
    cap = int(raw)
    if cap <= 0:
        raise ValueError(f"ULAM_LAB_MAX_ELEMENTS must be positive, got {cap}")
    return cap


class GroupError(ValueError):
    """Invalid group data or an element outside the group."""


# ---------------------------------------------------------------------------
# free-group words


def _reduce_letters(letters: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    out: list[tuple[int, int]] = []
    for gen, exp in letters:
        if out and out[-1][0] == gen and out[-1][1] == -exp:
            out.pop()
        else:
            out.append((gen, exp))
    return tuple(out)


def _letter_key(letter: tuple[int, int]) -> tuple[int, int]:
    gen, exp = letter
    return (gen, 0 if exp == 1 else 1)


@dataclass(frozen=True)
class Word:
    """A reduced word in a free group.

    ``letters`` is a sequence of ``(generator index, exponent)`` pairs with
    exponent +1 or -1; no adjacent pair may cancel.  Construction rejects
    unreduced input; use :meth:`product` / ``*`` for reducing multiplication.
    """

    letters: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        for gen, exp in self.letters:
            if gen < 0 or exp not in (-1, 1):
                raise GroupError(f"bad letter {(gen, exp)}")
        if self.letters != _reduce_letters(self.letters):
            raise GroupError(f"word is not reduced: {self.letters}")

    @staticmethod
    def from_letters(letters: Iterable[tuple[int, int]]) -> "Word":
        return Word(_reduce_letters(letters))

    @staticmethod
    def generator(index: int, exponent: int = 1) -> "Word":
        return Word(((index, exponent),))

    def product(self, other: "Word") -> "Word":
        return Word(_reduce_letters(self.letters + other.letters))

    __mul__ = product

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    def __len__(self) -> int:
        return len(self.letters)

    def shortlex_key(self) -> tuple:
        return (len(self.letters), tuple(_letter_key(l) for l in self.letters))

    def first_letter(self) -> tuple[int, int] | None:
        return self.letters[0] if self.letters else None

    def __str__(self) -> str:
        if not self.letters:
            return "e"
        return "".join(
            chr((ord("A") if exp < 0 else ord("a")) + gen) for gen, exp in self.letters
        )

    @staticmethod
    def parse(text: str) -> "Word":
        """Parse compact form: 'a'..'z' are generators, 'A'..'Z' inverses.

        Whitespace is ignored and 'e' alone denotes the identity.
        """
        text = "".join(text.split())
        if text in ("", "e"):
            return Word()
        letters = []
        for ch in text:
            if "a" <= ch <= "z":
                letters.append((ord(ch) - ord("a"), 1))
            elif "A" <= ch <= "Z":
                letters.append((ord(ch) - ord("A"), -1))
            else:
                raise GroupError(f"cannot parse word character {ch!r}")
        return Word.from_letters(letters)


# ---------------------------------------------------------------------------
# group handles


class GroupHandle:
    """Common interface: mul/inv/identity plus deterministic enumeration."""

    kind: str

    def mul(self, x, y):
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    @property
    def identity(self):
        raise NotImplementedError

    def contains(self, x) -> bool:
        raise NotImplementedError

    def check_element(self, x) -> None:
        if not self.contains(x):
            raise GroupError(f"{x!r} is not an element of {self.describe()}")

    def describe(self) -> str:
        raise NotImplementedError

    def element_to_json(self, x):
        return x

    def element_from_json(self, data):
        return data


class FiniteGroup(GroupHandle):
    """A finite group given by its multiplication table.

    Elements are the indices 0..n-1 and index 0 is the identity.  The
    constructor verifies the full set of group axioms (Latin square,
    identity at 0, associativity), so a successfully built handle is a
    genuine group.
    """

    kind = "finite-table"

    def __init__(self, table: np.ndarray, name: str | None = None):
        table = np.asarray(table, dtype=np.int64)
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise GroupError(f"table must be square, got shape {table.shape}")
        n = table.shape[0]
        if n == 0:
            raise GroupError("empty multiplication table")
        if table.min() < 0 or table.max() >= n:
            raise GroupError("table entries must be indices 0..n-1")
        ident = np.arange(n)
        if not (np.array_equal(table[0], ident) and np.array_equal(table[:, 0], ident)):
            raise GroupError("index 0 must be the identity element")
        if not all(np.array_equal(np.sort(row), ident) for row in table):
            raise GroupError("table rows are not permutations (not a Latin square)")
        if not all(np.array_equal(np.sort(col), ident) for col in table.T):
            raise GroupError("table columns are not permutations (not a Latin square)")
        # (xy)z == x(yz), checked in bulk via fancy indexing
        if not np.array_equal(table[table, :], table[:, table]):
            raise GroupError("table is not associative")
        self.table = table
        self.table.setflags(write=False)
        self.order = n
        self.name = name or f"finite({n})"
        self._inverse = np.argmin(table, axis=1)  # row position of 0

    def describe(self) -> str:
        return self.name

    @property
    def identity(self) -> int:
        return 0

    def contains(self, x) -> bool:
        return isinstance(x, (int, np.integer)) and 0 <= x < self.order

    def mul(self, x: int, y: int) -> int:
        self.check_element(x)
        self.check_element(y)
        return int(self.table[x, y])

    def inv(self, x: int) -> int:
        self.check_element(x)
        return int(self._inverse[x])

    def elements(self) -> list[int]:
        return list(range(self.order))

    # -- constructors ------------------------------------------------------

    @staticmethod
    def cyclic(n: int) -> "FiniteGroup":
        if n < 1:
            raise GroupError("cyclic group needs n >= 1")
        i = np.arange(n)
        return FiniteGroup((i[:, None] + i[None, :]) % n, name=f"cyclic({n})")

    @staticmethod
    def dihedral(n: int) -> "FiniteGroup":
        """Symmetries of the regular n-gon, order 2n.

        Indices 0..n-1 are the rotations r^i, indices n..2n-1 the
        reflections r^i s, with s r s = r^-1.
        """
        if n < 1:
            raise GroupError("dihedral group needs n >= 1")
        table = np.zeros((2 * n, 2 * n), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                table[i, j] = (i + j) % n
                table[i, n + j] = n + (i + j) % n
                table[n + i, j] = n + (i - j) % n
                table[n + i, n + j] = (i - j) % n
        return FiniteGroup(table, name=f"dihedral({n})")

    @staticmethod
    def symmetric(n: int) -> "FiniteGroup":
        """S_n as its full table; n <= 5 keeps the order at 120."""
        if not 1 <= n <= 5:
            raise GroupError("symmetric(n) supports 1 <= n <= 5")
        perms = list(itertools.permutations(range(n)))  # identity comes first
        index = {p: i for i, p in enumerate(perms)}
        table = np.array(
            [[index[tuple(p[q[k]] for k in range(n))] for q in perms] for p in perms],
            dtype=np.int64,
        )
        return FiniteGroup(table, name=f"symmetric({n})")

    @staticmethod
    def direct_product(a: "FiniteGroup", b: "FiniteGroup") -> "FiniteGroup":
        na, nb = a.order, b.order
        ia, ib = np.arange(na), np.arange(nb)
        # index (x, y) -> x*nb + y; identity (0, 0) -> 0
        left = a.table[ia[:, None, None, None], ia[None, None, :, None]]
        right = b.table[ib[None, :, None, None], ib[None, None, None, :]]
        table = (left * nb + right).reshape(na * nb, na * nb)
        return FiniteGroup(table, name=f"{a.name}x{b.name}")

    @staticmethod
    def from_file(path: str | Path) -> "FiniteGroup":
        """Load a table: JSON {'table': [[...]]} or text 'n' + n rows."""
        path = Path(path)
        text = path.read_text()
        if path.suffix == ".json":
            data = json.loads(text)
            table = data["table"] if isinstance(data, dict) else data
            return FiniteGroup(np.asarray(table), name=path.stem)
        tokens = text.split()
        if not tokens:
            raise GroupError(f"empty table file {path}")
        n = int(tokens[0])
        if len(tokens) != 1 + n * n:
            raise GroupError(f"expected {n * n} entries after n={n}, got {len(tokens) - 1}")
        table = np.array(tokens[1:], dtype=np.int64).reshape(n, n)
        return FiniteGroup(table, name=path.stem)


class FreeGroup(GroupHandle):
    """Free group on ``rank`` generators; elements are reduced Words."""

    kind = "free"

    def __init__(self, rank: int):
        if rank < 1:
            raise GroupError("free group needs rank >= 1")
        self.rank = rank

    def describe(self) -> str:
        return f"free({self.rank})"

    @property
    def identity(self) -> Word:
        return Word()

    def contains(self, x) -> bool:
        return isinstance(x, Word) and all(g < self.rank for g, _ in x.letters)

    def mul(self, x: Word, y: Word) -> Word:
        self.check_element(x)
        self.check_element(y)
        return x.product(y)

    def inv(self, x: Word) -> Word:
        self.check_element(x)
        return x.inverse()

    def generators(self) -> list[Word]:
        return [Word.generator(i) for i in range(self.rank)]

    def ball(self, r: int) -> list[Word]:
        """All reduced words of length <= r in shortlex order.

        The sphere of radius k has 2*rank*(2*rank-1)^(k-1) words, so the
        enumeration is capped by :func:`max_elements`.
        """
        if r < 0:
            raise GroupError("ball radius must be >= 0")
        size = 1
        sphere = 2 * self.rank
        for _ in range(r):
            size += sphere
            if size > max_elements():
                raise GroupError(
                    f"ball of radius {r} in {self.describe()} exceeds the "
                    f"element cap {max_elements()}"
                )
            sphere *= 2 * self.rank - 1
        # letters in shortlex order: a < a^-1 < b < b^-1 < ...
        alphabet = [(g, e) for g in range(self.rank) for e in (1, -1)]
        out = [Word()]
        frontier = [Word()]
        for _ in range(r):
            nxt = []
            for w in frontier:
                last = w.letters[-1] if w.letters else None
                for gen, exp in alphabet:
                    if last is not None and last[0] == gen and last[1] == -exp:
                        continue
                    nxt.append(Word(w.letters + ((gen, exp),)))
            frontier = nxt
            out.extend(frontier)
        return out

    def element_to_json(self, x: Word):
        return str(x)

    def element_from_json(self, data) -> Word:
        return Word.parse(data)


class IntegerLattice(GroupHandle):
    """Z^d with componentwise addition; elements are int tuples."""

    kind = "integer-lattice"

    def __init__(self, dim: int):
        if dim < 1:
            raise GroupError("lattice needs dim >= 1")
        self.dim = dim

    def describe(self) -> str:
        return f"lattice({self.dim})"

    @property
    def identity(self) -> tuple[int, ...]:
        return (0,) * self.dim

    def contains(self, x) -> bool:
        return (
            isinstance(x, tuple)
            and len(x) == self.dim
            and all(isinstance(v, (int, np.integer)) for v in x)
        )

    def mul(self, x, y):
        self.check_element(x)
        self.check_element(y)
        return tuple(int(a + b) for a, b in zip(x, y))

    def inv(self, x):
        self.check_element(x)
        return tuple(int(-a) for a in x)

    def generators(self) -> list[tuple[int, ...]]:
        eye = np.eye(self.dim, dtype=int)
        return [tuple(int(v) for v in row) for row in eye]

    def ball(self, r: int) -> list[tuple[int, ...]]:
        """The box [-r, r]^d ordered by (sup norm, lexicographic)."""
        if r < 0:
            raise GroupError("ball radius must be >= 0")
        size = (2 * r + 1) ** self.dim
        if size > max_elements():
            raise GroupError(
                f"box of radius {r} in {self.describe()} exceeds the "
                f"element cap {max_elements()}"
            )
        pts = [tuple(p) for p in itertools.product(range(-r, r + 1), repeat=self.dim)]
        pts.sort(key=lambda p: (max(abs(v) for v in p) if p else 0, p))
        return pts

    def element_to_json(self, x):
        return list(x)

    def element_from_json(self, data) -> tuple[int, ...]:
        return tuple(int(v) for v in data)


# ---------------------------------------------------------------------------
# finitely supported probability measures


@dataclass(frozen=True, eq=False)
class ProbMeasure:
    """Finitely supported probability measure on group elements."""

    support: tuple
    weights: np.ndarray
    _index: dict = field(repr=False, default_factory=dict)

    def __post_init__(self) -> None:
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", weights)
        if len(self.support) != weights.shape[0] or weights.ndim != 1:
            raise ValueError("support and weights must have matching length")
        if len(set(self.support)) != len(self.support):
            raise ValueError("support entries must be distinct")
        if weights.min(initial=0.0) < 0:
            raise ValueError("weights must be nonnegative")
        total = float(weights.sum())
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights sum to {total}, not 1")
        weights.setflags(write=False)
        object.__setattr__(self, "_index", {x: i for i, x in enumerate(self.support)})

    def weight(self, x) -> float:
        i = self._index.get(x)
        return float(self.weights[i]) if i is not None else 0.0

    def items(self):
        return zip(self.support, self.weights)

    @staticmethod
    def uniform(elements: Sequence) -> "ProbMeasure":
        elements = tuple(elements)
        n = len(elements)
        if n == 0:
            raise ValueError("uniform measure needs a nonempty support")
        return ProbMeasure(elements, np.full(n, 1.0 / n))

    @staticmethod
    def point_mass(element) -> "ProbMeasure":
        return ProbMeasure((element,), np.array([1.0]))

    @staticmethod
    def dirichlet(elements: Sequence, rng: np.random.Generator) -> "ProbMeasure":
        elements = tuple(elements)
        return ProbMeasure(elements, rng.dirichlet(np.ones(len(elements))))


def translate_measure(group: GroupHandle, s, mu: ProbMeasure) -> ProbMeasure:
    """Pushforward of mu under left translation by s: (s mu)({y}) = mu({s^-1 y})."""
    return ProbMeasure(tuple(group.mul(s, x) for x in mu.support), mu.weights.copy())


def l1_distance(mu: ProbMeasure, nu: ProbMeasure) -> float:
    keys = set(mu.support) | set(nu.support)
    return float(sum(abs(mu.weight(k) - nu.weight(k)) for k in keys))


def folner_box(dim: int, r: int) -> ProbMeasure:
    """Uniform measure on the box [-r, r]^dim in Z^dim.

    A one-generator shift moves 2/(2r+1) of the mass out of the box, so
    these measures are the lab's approximately invariant means on Z^dim.
    """
    if dim < 1:
        raise GroupError("folner_box needs dim >= 1")
    return ProbMeasure.uniform(IntegerLattice(dim).ball(r))


# ---------------------------------------------------------------------------
# group descriptors (CLI / JSON surface)


def parse_group(descriptor: str) -> GroupHandle:
    """Build a handle from a descriptor such as 'cyclic(6)' or 'free(2)'.

    Product descriptors join finite factors with 'x':
    'cyclic(2)xcyclic(4)'.
    """
    descriptor = descriptor.strip()
    if "x" in descriptor and not descriptor.startswith(("free", "lattice")):
        parts = descriptor.split("x")
        groups = [parse_group(p) for p in parts]
        if not all(isinstance(g, FiniteGroup) for g in groups):
            raise GroupError("product descriptors need finite factors")
        out = groups[0]
        for g in groups[1:]:
            out = FiniteGroup.direct_product(out, g)
        return out
    if "(" not in descriptor or not descriptor.endswith(")"):
        raise GroupError(f"cannot parse group descriptor {descriptor!r}")
    head, arg = descriptor[:-1].split("(", 1)
    n = int(arg)
    makers: dict[str, Callable[[int], GroupHandle]] = {
        "cyclic": FiniteGroup.cyclic,
        "dihedral": FiniteGroup.dihedral,
        "symmetric": FiniteGroup.symmetric,
        "free": FreeGroup,
        "lattice": IntegerLattice,
    }
    if head not in makers:
        raise GroupError(f"unknown group family {head!r}")
    return makers[head](n)


def group_to_json(group: GroupHandle) -> dict:
    if isinstance(group, FiniteGroup):
        return {"kind": group.kind, "name": group.name, "table": group.table.tolist()}
    if isinstance(group, FreeGroup):
        return {"kind": group.kind, "rank": group.rank}
    if isinstance(group, IntegerLattice):
        return {"kind": group.kind, "dim": group.dim}
    raise GroupError(f"cannot serialize {group!r}")


def group_from_json(data: dict) -> GroupHandle:
    kind = data["kind"]
    if kind == "finite-table":
        return FiniteGroup(np.asarray(data["table"]), name=data.get("name"))
    if kind == "free":
        return FreeGroup(int(data["rank"]))
    if kind == "integer-lattice":
        return IntegerLattice(int(data["dim"]))
    raise GroupError(f"unknown group kind {kind!r}")
