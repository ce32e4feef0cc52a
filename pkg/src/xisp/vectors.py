"""Finitely supported rational vectors, index intervals and block sequences."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

Q = Fraction


def as_rational(value) -> Fraction:
    """Parse an int, Fraction or "p/q" string into a Fraction (never floats)."""
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted")
    return Fraction(value)


@dataclass(frozen=True)
class IndexInterval:
    """Closed interval [lo, hi] of positive integers; ``hi=None`` means unbounded.

    The empty interval is represented by ``hi < lo``.
    """

    lo: int = 1
    hi: int | None = None

    @classmethod
    def full(cls) -> IndexInterval:
        return cls(1, None)

    @classmethod
    def empty(cls) -> IndexInterval:
        return cls(1, 0)

    @property
    def is_empty(self) -> bool:
        return self.hi is not None and self.hi < self.lo

    def __contains__(self, k: int) -> bool:
        return k >= self.lo and (self.hi is None or k <= self.hi)

    def intersect(self, other: IndexInterval) -> IndexInterval:
        lo = max(self.lo, other.lo)
        if self.hi is None:
            hi = other.hi
        elif other.hi is None:
            hi = self.hi
        else:
            hi = min(self.hi, other.hi)
        if hi is not None and hi < lo:
            return IndexInterval.empty()
        return IndexInterval(lo, hi)

    def to_json(self):
        if self.is_empty:
            return "empty"
        return [str(self.lo), None if self.hi is None else str(self.hi)]

    @classmethod
    def from_json(cls, data) -> IndexInterval:
        if data == "empty":
            return cls.empty()
        lo, hi = data
        return cls(int(lo), None if hi is None else int(hi))


class RationalVector:
    """Immutable element of c_00 with exact rational coefficients."""

    __slots__ = ("_entries", "_index", "_hash")

    def __init__(self, entries: Mapping[int, object] | Iterable[tuple[int, object]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        data: dict[int, Fraction] = {}
        for k, c in items:
            k = int(k)
            if k < 1:
                raise ValueError(f"index must be a positive integer, got {k}")
            c = as_rational(c)
            if k in data:
                raise ValueError(f"duplicate index {k}")
            if c:
                data[k] = c
        self._entries = tuple(sorted(data.items()))
        self._index = dict(self._entries)
        self._hash = None

    @classmethod
    def unit(cls, k: int, coeff=1) -> RationalVector:
        return cls({k: coeff})

    @classmethod
    def _trusted(cls, sorted_items) -> RationalVector:
        v = cls.__new__(cls)
        v._entries = tuple(sorted_items)
        v._index = dict(v._entries)
        v._hash = None
        return v

    @property
    def entries(self) -> tuple[tuple[int, Fraction], ...]:
        return self._entries

    def __getitem__(self, k: int) -> Fraction:
        return self._index.get(k, Fraction(0))

    def items(self):
        return iter(self._entries)

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self._index)

    def __len__(self) -> int:
        return len(self._entries)

    def __bool__(self) -> bool:
        return bool(self._entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalVector) and self._entries == other._entries

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._entries)
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {c}" for k, c in self._entries[:8])
        more = ", ..." if len(self._entries) > 8 else ""
        return f"RationalVector({{{body}{more}}})"

    def support(self) -> list[int]:
        return [k for k, _ in self._entries]

    @property
    def min_support(self) -> int:
        if not self._entries:
            raise ValueError("zero vector has no support")
        return self._entries[0][0]

    @property
    def max_support(self) -> int:
        if not self._entries:
            raise ValueError("zero vector has no support")
        return self._entries[-1][0]

    def restrict(self, where) -> RationalVector:
        """Keep the coordinates in ``where`` (an IndexInterval or a set of indices)."""
        if isinstance(where, IndexInterval):
            if where.is_empty:
                return RationalVector()
            return RationalVector._trusted((k, c) for k, c in self._entries if k in where)
        return RationalVector._trusted((k, c) for k, c in self._entries if k in where)

    def __add__(self, other: RationalVector) -> RationalVector:
        out = dict(self._index)
        for k, c in other._entries:
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return RationalVector._trusted(sorted(out.items()))

    def __neg__(self) -> RationalVector:
        return RationalVector._trusted((k, -c) for k, c in self._entries)

    def __sub__(self, other: RationalVector) -> RationalVector:
        return self + (-other)

    def scale(self, factor) -> RationalVector:
        factor = as_rational(factor)
        if not factor:
            return RationalVector()
        return RationalVector._trusted((k, c * factor) for k, c in self._entries)

    __rmul__ = scale

    def dot(self, other: RationalVector) -> Fraction:
        small, big = (self, other) if len(self) <= len(other) else (other, self)
        idx = big._index
        total = Fraction(0)
        for k, c in small._entries:
            d = idx.get(k)
            if d is not None:
                total += c * d
        return total

    def abs(self) -> RationalVector:
        return RationalVector._trusted((k, abs(c)) for k, c in self._entries)

    def sup_norm(self) -> Fraction:
        return max((abs(c) for _, c in self._entries), default=Fraction(0))

    def l1_norm(self) -> Fraction:
        return sum((abs(c) for _, c in self._entries), Fraction(0))

    def to_json(self) -> dict:
        return {"entries": [[str(k), str(c)] for k, c in self._entries]}

    @classmethod
    def from_json(cls, data) -> RationalVector:
        if not isinstance(data, dict) or "entries" not in data:
            raise ValueError("vector JSON must be an object with an 'entries' list")
        pairs = []
        for item in data["entries"]:
            if not isinstance(item, (list, tuple)) or len(item) != 2:
                raise ValueError(f"malformed entry {item!r}")
            k, c = item
            if isinstance(c, float) or isinstance(k, float):
                raise ValueError("floating point values are not accepted")
            pairs.append((int(k), Fraction(c)))
        return cls(pairs)


def support(v: RationalVector) -> list[int]:
    return v.support()


def restrict(v: RationalVector, where) -> RationalVector:
    return v.restrict(where)


def linear_combination(coeffs: Iterable, vectors: Iterable[RationalVector]) -> RationalVector:
    out: dict[int, Fraction] = {}
    for c, v in zip(coeffs, vectors):
        c = as_rational(c)
        if not c:
            continue
        for k, a in v.items():
            s = out.get(k, 0) + c * a
            if s:
                out[k] = s
            else:
                out.pop(k, None)
    return RationalVector._trusted(sorted(out.items()))


def validate_block_sequence(xs: Iterable[RationalVector]) -> tuple[int, int] | None:
    """Return the first adjacent pair (i, i+1) that is not successive, or None.

    A zero block has no support and is reported as a violation with its successor
    (or predecessor, when it is last).
    """
    xs = list(xs)
    for i, x in enumerate(xs):
        if not x:
            return (i, i + 1) if i + 1 < len(xs) else (max(i - 1, 0), i)
    for i in range(len(xs) - 1):
        if xs[i].max_support >= xs[i + 1].min_support:
            return (i, i + 1)
    return None


class BlockSequenceError(ValueError):
    pass


@dataclass(frozen=True)
class BlockSequence:
    blocks: tuple[RationalVector, ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        bad = validate_block_sequence(self.blocks)
        if bad is not None:
            raise BlockSequenceError(f"blocks {bad[0]} and {bad[1]} are not successive")

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __getitem__(self, i):
        return self.blocks[i]

    @property
    def psi(self) -> list[int]:
        """Minimal support point of each block."""
        return [x.min_support for x in self.blocks]

    @property
    def phi(self) -> list[int]:
        """Maximal support point of each block."""
        return [x.max_support for x in self.blocks]

    def combine(self, coeffs) -> RationalVector:
        return linear_combination(coeffs, self.blocks)
