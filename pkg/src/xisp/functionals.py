"""Terms of the norming set W and of the Tsirelson-type sets W_T, W_T', W_|||.

A term is an immutable tree.  Every term knows the finitely supported vector it
represents, so evaluation is a dot product; validation walks the tree and checks
the grammar clauses, reporting the path to each violation.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

from . import schreier
from .config import SpaceConfig
from .vectors import IndexInterval, RationalVector, linear_combination

GRAMMARS = ("W", "W_T", "W_T'", "W_|||")


class InvalidTerm(ValueError):
    pass


class Term:
    """Common behaviour of all node kinds."""

    kind = "term"

    @property
    def children(self) -> tuple[Term, ...]:
        return ()

    @cached_property
    def vector(self) -> RationalVector:
        raise NotImplementedError

    def __call__(self, v: RationalVector) -> Fraction:
        return self.vector.dot(v)

    @property
    def is_zero(self) -> bool:
        return not self.vector

    @property
    def min_support(self) -> int:
        return self.vector.min_support

    @property
    def max_support(self) -> int:
        return self.vector.max_support


@dataclass(frozen=True, eq=False)
class Unit(Term):
    """±e*_k."""

    index: int
    sign: int = 1
    kind = "unit"

    @cached_property
    def vector(self):
        return RationalVector({self.index: self.sign})


@dataclass(frozen=True, eq=False)
class _Averaging(Term):
    size: int
    items: tuple[Term, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))

    @property
    def children(self):
        return self.items

    @cached_property
    def vector(self):
        c = Fraction(1, self.size)
        return linear_combination([c] * len(self.items), [f.vector for f in self.items])


class AlphaAverage(_Averaging):
    """(1/s)(f_1 + ... + f_d) with successive f_j in W and d <= s."""

    kind = "alpha"


class BetaAverage(_Averaging):
    """(1/s)(f_1 + ... + f_d) of type II functionals with disjoint weight sets."""

    kind = "beta"


@dataclass(frozen=True, eq=False)
class _Weighted(Term):
    weight: int
    items: tuple[Term, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))

    @property
    def children(self):
        return self.items

    @cached_property
    def vector(self):
        c = Fraction(1, 1 << self.weight)
        return linear_combination([c] * len(self.items), [f.vector for f in self.items])


class TypeIAlpha(_Weighted):
    """2^{-n} times a sum of very fast growing, S_n-admissible α-averages."""

    kind = "type1a"


class TypeIBeta(_Weighted):
    kind = "type1b"


@dataclass(frozen=True, eq=False)
class _Halving(Term):
    items: tuple[Term, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))

    @property
    def children(self):
        return self.items

    @cached_property
    def vector(self):
        half = Fraction(1, 2)
        return linear_combination([half] * len(self.items), [f.vector for f in self.items])


class TypeII(_Halving):
    """(1/2) times a special sequence of type I_α functionals."""

    kind = "type2"


class HalfSum(_Halving):
    """(1/2)(f_1 + ... + f_d): the node of the Tsirelson-type grammars."""

    kind = "half"


@dataclass(frozen=True, eq=False)
class Convex(Term):
    weights: tuple[Fraction, ...]
    items: tuple[Term, ...]
    kind = "convex"

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(Fraction(w) for w in self.weights))
        object.__setattr__(self, "items", tuple(self.items))

    @property
    def children(self):
        return self.items

    @cached_property
    def vector(self):
        return linear_combination(self.weights, [f.vector for f in self.items])


@dataclass(frozen=True, eq=False)
class Restricted(Term):
    """sign · (child restricted to an interval, or to a finite index set)."""

    item: Term
    where: IndexInterval | frozenset = field(default_factory=IndexInterval.full)
    sign: int = 1
    kind = "restricted"

    def __post_init__(self):
        if not isinstance(self.where, IndexInterval):
            object.__setattr__(self, "where", frozenset(int(k) for k in self.where))

    @property
    def children(self):
        return (self.item,)

    @cached_property
    def vector(self):
        v = self.item.vector.restrict(self.where)
        return -v if self.sign < 0 else v


ZERO = Restricted(Unit(1), IndexInterval.empty())


def negate(t: Term) -> Term:
    return Restricted(t, IndexInterval.full(), -1)


# -- structural helpers ------------------------------------------------------

def core(t: Term) -> Term:
    """The node underneath any restriction/sign wrappers."""
    while isinstance(t, Restricted):
        t = t.item
    return t


def average_size(t: Term) -> int | None:
    c = core(t)
    return c.size if isinstance(c, _Averaging) else None


def weight(t: Term) -> int | None:
    """w(f) for type I terms (possibly restricted)."""
    c = core(t)
    return c.weight if isinstance(c, _Weighted) else None


def _where_meets(lo: int, hi: int, where) -> bool:
    if isinstance(where, IndexInterval):
        return not where.is_empty and (where.hi is None or lo <= where.hi) and hi >= where.lo
    return any(lo <= k <= hi for k in where)


def _wheres(t: Term) -> list:
    out = []
    while isinstance(t, Restricted):
        out.append(t.where)
        t = t.item
    return out


def weight_set(t: Term) -> frozenset[int]:
    """ŵ(g): weights of the special sequence members whose range meets the restriction."""
    base = core(t)
    if not isinstance(base, TypeII):
        raise InvalidTerm("weight sets are defined for type II functionals only")
    wheres = _wheres(t)
    out = set()
    for f in base.items:
        if f.is_zero:
            continue
        lo, hi = f.min_support, f.max_support
        if all(_where_meets(lo, hi, w) for w in wheres):
            out.add(weight(f))
    return frozenset(out)


def evaluate(t: Term, v: RationalVector) -> Fraction:
    return t.vector.dot(v)


def evaluate_checked(t: Term, v: RationalVector, cfg: SpaceConfig, registry=None,
                     grammar: str = "W") -> Fraction:
    problems = validate(t, cfg, grammar=grammar, registry=registry)
    if problems:
        raise InvalidTerm("; ".join(str(p) for p in problems[:5]))
    return evaluate(t, v)


# -- validation --------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    path: tuple[int, ...]
    clause: str

    def __str__(self):
        where = "/".join(map(str, self.path)) or "root"
        return f"{where}: {self.clause}"


def _successive(items: Sequence[Term]) -> bool:
    return all(a.max_support < b.min_support for a, b in zip(items, items[1:]))


class _Validator:
    def __init__(self, cfg: SpaceConfig, grammar: str, registry, strict: bool):
        if grammar not in GRAMMARS:
            raise ValueError(f"unknown grammar {grammar!r}")
        self.cfg, self.grammar, self.registry, self.strict = cfg, grammar, registry, strict
        self.out: list[Violation] = []

    def bad(self, path, clause):
        self.out.append(Violation(tuple(path), clause))

    def nonzero_children(self, t, path) -> bool:
        ok = True
        for i, f in enumerate(t.children):
            if f.is_zero:
                self.bad(path + [i], "empty child")
                ok = False
        return ok

    def visit(self, t: Term, path: list[int]):
        g = self.grammar
        if isinstance(t, Unit):
            if t.index < 1 or t.sign not in (1, -1):
                self.bad(path, "unit functional needs index >= 1 and sign ±1")
            return
        if isinstance(t, Restricted):
            if t.sign not in (1, -1):
                self.bad(path, "sign must be ±1")
            if g == "W" and not isinstance(t.where, IndexInterval):
                self.bad(path, "W is closed under interval restrictions only")
            self.visit(t.item, path + [0])
            return
        if isinstance(t, Convex):
            if g == "W_T'":
                self.bad(path, "W_T' has no convex combinations")
            if len(t.weights) != len(t.items) or not t.items:
                self.bad(path, "convex node needs one weight per child")
            if any(w < 0 for w in t.weights) or sum(t.weights) != 1:
                self.bad(path, "convex weights must be non-negative and sum to 1")
            if self.strict and any(isinstance(f, Convex) for f in t.items):
                self.bad(path, "nested convex combination (not stratified)")
        elif isinstance(t, HalfSum):
            if g == "W":
                self.bad(path, "halving nodes belong to the Tsirelson grammars")
            elif self.nonzero_children(t, path):
                if not _successive(t.items):
                    self.bad(path, "children not successive")
                elif t.items:
                    cap = t.items[0].min_support * (2 if g == "W_|||" else 1)
                    if len(t.items) > cap:
                        self.bad(path, "too many parts for the first support point")
        elif isinstance(t, AlphaAverage):
            self.check_grammar_w(t, path)
            self.check_average(t, path)
            if len(t.items) and self.nonzero_children(t, path) and not _successive(t.items):
                self.bad(path, "α-average children not successive")
        elif isinstance(t, BetaAverage):
            self.check_grammar_w(t, path)
            self.check_average(t, path)
            self.check_beta(t, path)
        elif isinstance(t, _Weighted):
            self.check_grammar_w(t, path)
            self.check_type_one(t, path)
        elif isinstance(t, TypeII):
            self.check_grammar_w(t, path)
            self.check_type_two(t, path)
        else:
            self.bad(path, f"unknown node {type(t).__name__}")
            return
        for i, f in enumerate(t.children):
            self.visit(f, path + [i])

    def check_grammar_w(self, t, path):
        if self.grammar != "W":
            self.bad(path, f"{t.kind} nodes belong to W only")

    def check_average(self, t, path):
        if t.size < 1 or not t.items or len(t.items) > t.size:
            self.bad(path, "average needs 1 <= d <= s children")

    def check_beta(self, t, path):
        for i, f in enumerate(t.items):
            if not isinstance(core(f), TypeII):
                self.bad(path + [i], "β-average child is not of type II")
                return
        seen: set[int] = set()
        for f in t.items:
            ws = weight_set(f)
            if ws & seen:
                self.bad(path, "β-average children have overlapping weight sets")
                break
            seen |= ws
        if self.strict and self.nonzero_children(t, path) and not _successive(t.items):
            self.bad(path, "β-average children not successive (strict)")

    def check_type_one(self, t: _Weighted, path):
        want = AlphaAverage if isinstance(t, TypeIAlpha) else BetaAverage
        if t.weight < 1:
            self.bad(path, "weight must be at least 1")
        if not t.items:
            self.bad(path, "type I functional needs children")
            return
        for i, f in enumerate(t.items):
            if not isinstance(core(f), want):
                self.bad(path + [i], f"child is not an {want.kind}-average")
                return
        if not self.nonzero_children(t, path):
            return
        if not _successive(t.items):
            self.bad(path, "children not successive")
            return
        if not schreier.member([f.min_support for f in t.items], t.weight):
            self.bad(path, f"children not S_{t.weight}-admissible")
        for j in range(1, len(t.items)):
            prev, cur = t.items[j - 1], t.items[j]
            s_prev, s_cur = average_size(prev), average_size(cur)
            if not (s_cur > s_prev and s_cur > self.cfg.vfg_floor(prev.max_support)):
                self.bad(path + [j], "very fast growing")
                break

    def check_type_two(self, t: TypeII, path):
        if not t.items:
            self.bad(path, "type II functional needs children")
            return
        for i, f in enumerate(t.items):
            if not isinstance(core(f), TypeIAlpha):
                self.bad(path + [i], "special sequence member is not of type I_α")
                return
        if not self.nonzero_children(t, path):
            return
        if not _successive(t.items):
            self.bad(path, "special sequence not successive")
            return
        if len(t.items) > t.items[0].min_support:
            self.bad(path, "special sequence not S_1-admissible")
        weights = [weight(f) for f in t.items]
        if not self.cfg.in_L1(weights[0]):
            self.bad(path + [0], "first weight not in L_1")
        if len(t.items) > 1:
            if self.registry is None:
                self.bad(path, "coding: no registry available to check σ")
                return
            for j in range(1, len(t.items)):
                hist = list(zip(t.items[:j], weights[:j]))
                got = self.registry.lookup(hist)
                if got is None:
                    self.bad(path + [j], "coding: history not registered")
                    return
                if got != weights[j]:
                    self.bad(path + [j], "coding: weight differs from σ(history)")
                    return


def validate(t: Term, cfg: SpaceConfig, grammar: str = "W", registry=None,
             strict: bool | None = None) -> list[Violation]:
    """All grammar violations of t (empty list means valid)."""
    v = _Validator(cfg, grammar, registry, cfg.strict if strict is None else strict)
    v.visit(t, [])
    return v.out


# -- the coding function -----------------------------------------------------

def _runs(v: RationalVector) -> list[list[str]]:
    """Run-length form: maximal runs of consecutive indices with equal value."""
    out: list[list] = []
    for k, c in v.items():
        if out and out[-1][1] == k - 1 and out[-1][2] == c:
            out[-1][1] = k
        else:
            out.append([k, k, c])
    return [[str(a), str(b), str(c)] for a, b, c in out]


def _from_runs(runs) -> RationalVector:
    items = []
    for a, b, c in runs:
        c = Fraction(c)
        items.extend((k, c) for k in range(int(a), int(b) + 1))
    return RationalVector(items)


def _as_vector(f) -> RationalVector:
    return f if isinstance(f, RationalVector) else f.vector


def canonical_history(history: Iterable[tuple[object, int]]) -> str:
    data = [[_runs(_as_vector(f)), str(int(w))] for f, w in history]
    return json.dumps(data, separators=(",", ":"))


@dataclass(frozen=True)
class RegistryEntry:
    digest: str
    history: str
    weight: int
    terms: tuple | None = None

    def to_json(self):
        out = {"hash": self.digest, "history": self.history, "weight": str(self.weight)}
        if self.terms is not None:
            out["terms"] = list(self.terms)
        return out


class CodingRegistry:
    """Injective, growth-respecting realisation of σ on recorded histories.

    New histories receive the least element of L_2 above both the growth floor
    and every weight assigned so far, so weights increase with first use.
    """

    def __init__(self, cfg: SpaceConfig):
        self.cfg = cfg
        self._entries: list[RegistryEntry] = []
        self._by_digest: dict[str, RegistryEntry] = {}
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._entries)

    @property
    def entries(self) -> tuple[RegistryEntry, ...]:
        return tuple(self._entries)

    @staticmethod
    def digest(canonical: str) -> str:
        return hashlib.sha256(canonical.encode()).hexdigest()

    def lookup(self, history) -> int | None:
        canon = canonical_history(history)
        entry = self._by_digest.get(self.digest(canon))
        if entry is not None and entry.history == canon:
            return entry.weight
        return None

    def assign(self, history, keep_terms: bool = True) -> int:
        history = [(f, int(w)) for f, w in history]
        if not history:
            raise ValueError("σ is defined on non-empty histories")
        vecs = [_as_vector(f) for f, _ in history]
        if any(not v for v in vecs) or any(
            a.max_support >= b.min_support for a, b in zip(vecs, vecs[1:])
        ):
            raise ValueError("history functionals must be non-zero and successive")
        canon = canonical_history(history)
        key = self.digest(canon)
        with self._lock:
            entry = self._by_digest.get(key)
            if entry is not None:
                return entry.weight
            floor = self.cfg.sigma_floor(history[-1][1], vecs[-1].max_support)
            last = self._entries[-1].weight if self._entries else 0
            w = self.cfg.next_L2(max(floor, last))
            terms = None
            if keep_terms and all(isinstance(f, Term) for f, _ in history):
                terms = tuple(term_to_json(f) for f, _ in history)
            entry = RegistryEntry(key, canon, w, terms)
            self._entries.append(entry)
            self._by_digest[key] = entry
            return w

    def special_sequences(self) -> list[list[tuple[Term, int]]]:
        """Registered histories whose terms were kept, extended by their σ value."""
        out = []
        for e in self._entries:
            if e.terms is None:
                continue
            hist = json.loads(e.history)
            seq = [(term_from_json(tj), int(w)) for tj, (_, w) in zip(e.terms, hist)]
            out.append(seq)
        return out

    def to_json(self) -> dict:
        return {"config": self.cfg.to_json(), "entries": [e.to_json() for e in self._entries]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1)

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def from_json(cls, data, cfg: SpaceConfig | None = None) -> CodingRegistry:
        cfg = cfg or SpaceConfig.from_json(data.get("config", {}))
        reg = cls(cfg)
        last = 0
        for raw in data.get("entries", []):
            canon = raw["history"]
            if cls.digest(canon) != raw["hash"]:
                raise ValueError("registry entry hash mismatch")
            w = int(raw["weight"])
            hist = json.loads(canon)
            f_last = _from_runs(hist[-1][0])
            if not (cfg.in_L2(w) and w > last and w > cfg.sigma_floor(int(hist[-1][1]), f_last.max_support)):
                raise ValueError("registry entry violates the coding growth rules")
            terms = tuple(raw["terms"]) if "terms" in raw else None
            entry = RegistryEntry(raw["hash"], canon, w, terms)
            reg._entries.append(entry)
            reg._by_digest[entry.digest] = entry
            last = w
        return reg

    @classmethod
    def load(cls, path, cfg: SpaceConfig | None = None) -> CodingRegistry:
        return cls.from_json(json.loads(Path(path).read_text()), cfg)


def assign_sigma(reg: CodingRegistry, history) -> int:
    return reg.assign(history)


# -- JSON ----------------------------------------------------------------------

def _where_to_json(where):
    if isinstance(where, IndexInterval):
        return {"interval": where.to_json()}
    return {"set": [str(k) for k in sorted(where)]}


def _where_from_json(data):
    if "interval" in data:
        return IndexInterval.from_json(data["interval"])
    return frozenset(int(k) for k in data["set"])


def term_to_json(t: Term) -> dict:
    if isinstance(t, Unit):
        return {"kind": "unit", "index": str(t.index), "sign": t.sign}
    if isinstance(t, _Averaging):
        return {"kind": t.kind, "size": str(t.size), "children": [term_to_json(f) for f in t.items]}
    if isinstance(t, _Weighted):
        return {"kind": t.kind, "weight": str(t.weight), "children": [term_to_json(f) for f in t.items]}
    if isinstance(t, _Halving):
        return {"kind": t.kind, "children": [term_to_json(f) for f in t.items]}
    if isinstance(t, Convex):
        return {"kind": "convex", "weights": [str(w) for w in t.weights],
                "children": [term_to_json(f) for f in t.items]}
    if isinstance(t, Restricted):
        return {"kind": "restricted", "where": _where_to_json(t.where), "sign": t.sign,
                "child": term_to_json(t.item)}
    raise InvalidTerm(f"cannot serialise {type(t).__name__}")


_KINDS = {"alpha": AlphaAverage, "beta": BetaAverage, "type1a": TypeIAlpha,
          "type1b": TypeIBeta, "type2": TypeII, "half": HalfSum}


def term_from_json(data) -> Term:
    try:
        kind = data["kind"]
        if kind == "unit":
            return Unit(int(data["index"]), int(data.get("sign", 1)))
        if kind in ("alpha", "beta"):
            return _KINDS[kind](int(data["size"]), tuple(term_from_json(c) for c in data["children"]))
        if kind in ("type1a", "type1b"):
            return _KINDS[kind](int(data["weight"]), tuple(term_from_json(c) for c in data["children"]))
        if kind in ("type2", "half"):
            return _KINDS[kind](tuple(term_from_json(c) for c in data["children"]))
        if kind == "convex":
            return Convex(tuple(Fraction(w) for w in data["weights"]),
                          tuple(term_from_json(c) for c in data["children"]))
        if kind == "restricted":
            return Restricted(term_from_json(data["child"]), _where_from_json(data["where"]),
                              int(data.get("sign", 1)))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidTerm(f"malformed term: {exc}") from exc
    raise InvalidTerm(f"unknown term kind {data.get('kind')!r}")


def term_height(t: Term) -> int:
    if not t.children:
        return 0
    return 1 + max(term_height(f) for f in t.children)
