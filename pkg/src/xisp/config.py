"""Parameter sets for the norming set: the weight set L = L_1 ∪ L_2 and growth rules."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

FAITHFUL = "faithful"
SCALED = "scaled"

# Weights of more than this many bits are never materialised.
MAX_WEIGHT_BITS = 1 << 24


class InfeasibleAtBudget(RuntimeError):
    """A requested object exists in principle but is far beyond computable size."""

    def __init__(self, message: str, estimate: str | None = None):
        super().__init__(message if estimate is None else f"{message} (estimate: {estimate})")
        self.estimate = estimate


class ConfigError(ValueError):
    pass


def _faithful_lacunary(k: int) -> int:
    """k-th element (1-based) of ℓ_1 = 11, ℓ_{j+1} = 2^{2ℓ_j} + 1."""
    value = 11
    for _ in range(k - 1):
        if 2 * value > MAX_WEIGHT_BITS:
            raise InfeasibleAtBudget(
                f"element {k} of the faithful weight set is not representable",
                estimate=f"needs more than 2^{MAX_WEIGHT_BITS} bits",
            )
        value = (1 << (2 * value)) + 1
    return value


@dataclass(frozen=True)
class SpaceConfig:
    """Mode flag plus the rules that depend on it.

    Faithful mode: L is ℓ_1 = 11, ℓ_{k+1} = 2^{2ℓ_k} + 1, odd positions form L_1
    and even positions L_2; coding weights exceed 2^{n}·maxsupp and very fast
    growth means s(f_j) > 2^{maxsupp f_{j-1}}.

    Scaled mode: L is the even numbers ≥ 4, L_1 = 4N, L_2 = 4N + 2, and both
    growth rules use g(n, m) = n + m + 1 (very fast growth takes n = 0).
    Scaled mode also allows desk-sized tolerances in the exact-vector builders,
    so its records state which of the original clauses actually hold.
    """

    mode: str = SCALED
    strict: bool = False
    # scaled exact-vector realisation: s.c.c. level cap and tolerance
    scaled_scc_level: int = 1
    scaled_scc_eps: Fraction = Fraction(1)
    void_guarantees: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.mode not in (FAITHFUL, SCALED):
            raise ConfigError(f"unknown mode {self.mode!r}")
        object.__setattr__(self, "scaled_scc_eps", Fraction(self.scaled_scc_eps))
        if self.mode == SCALED:
            object.__setattr__(self, "void_guarantees", (
                "lacunarity l_{k+1} > 2^{2 l_k}",
                "sum of 2^{-l_k} below 1/1000",
                "at most one weight in {n..2^{2n}}",
                "exponential coding growth",
                "exponential very-fast-growth",
                "exact-vector tolerance bound (relaxed when infeasible)",
            ))
        else:
            object.__setattr__(self, "void_guarantees", ())
            self.check_faithful()

    @property
    def faithful(self) -> bool:
        return self.mode == FAITHFUL

    # -- the weight set L -------------------------------------------------
    def ell(self, k: int) -> int:
        """k-th element of L (1-based, increasing)."""
        if k < 1:
            raise ValueError("L is indexed from 1")
        if self.faithful:
            return _faithful_lacunary(k)
        return 2 * k + 2

    def in_L(self, w: int) -> bool:
        return self.in_L1(w) or self.in_L2(w)

    def in_L1(self, w: int) -> bool:
        if self.faithful:
            return self._faithful_position(w) % 2 == 1
        return w >= 4 and w % 4 == 0

    def in_L2(self, w: int) -> bool:
        if self.faithful:
            pos = self._faithful_position(w)
            return pos > 0 and pos % 2 == 0
        return w >= 6 and w % 4 == 2

    def _faithful_position(self, w: int) -> int:
        k, value = 1, 11
        while value < w:
            if 2 * value > MAX_WEIGHT_BITS:
                return 0
            value = (1 << (2 * value)) + 1
            k += 1
        return k if value == w else 0

    def next_L1(self, above: int) -> int:
        """Smallest element of L_1 strictly above ``above``."""
        return self._next(above, first=True)

    def next_L2(self, above: int) -> int:
        return self._next(above, first=False)

    def _next(self, above: int, first: bool) -> int:
        if self.faithful:
            k = 1 if first else 2
            while True:
                value = self.ell(k)
                if value > above:
                    return value
                k += 2
        base = 4 if first else 6
        if above < base:
            return base
        return base + 4 * ((above - base) // 4 + 1)

    # -- growth rules -------------------------------------------------------
    def sigma_floor(self, last_weight: int, last_max_support: int) -> int:
        """Coding weights must be strictly larger than this."""
        if self.faithful:
            return (1 << last_weight) * last_max_support
        return last_weight + last_max_support + 1

    def vfg_floor(self, previous_max_support: int) -> int:
        """Sizes in a very fast growing sequence must exceed this."""
        if self.faithful:
            if previous_max_support > MAX_WEIGHT_BITS:
                raise InfeasibleAtBudget("very fast growth floor too large to represent")
            return 1 << previous_max_support
        return previous_max_support + 1

    def c0_growth_floor(self, previous_size: int, previous_max_support: int) -> int:
        """Block sizes in the c_0 block recipe must exceed this."""
        return max(previous_size, self.vfg_floor(previous_max_support))

    # -- load-time checks ---------------------------------------------------
    def check_faithful(self) -> None:
        """Verify lacunarity, the 1/1000 tail bound and the one-weight-per-window rule."""
        l1, l2, l3 = self.ell(1), self.ell(2), self.ell(3)
        if not (l2 > 1 << (2 * l1) and l3.bit_length() > 2 * l2):
            raise ConfigError("lacunarity fails")
        # tail after l_1 is at most sum_{j >= l_2} 2^{-j} = 2^{1-l_2} <= 2^{-20}
        if not Fraction(1, 1 << l1) + Fraction(1, 1 << 20) < Fraction(1, 1000):
            raise ConfigError("sum of 2^{-l_k} is not below 1/1000")
        ls = [l1, l2]
        for n in range(1, 64):
            hits = [x for x in ls if n <= x <= 1 << (2 * n)]
            if len(hits) > 1:
                raise ConfigError(f"two weights of L lie in [{n}, 2^{2 * n}]")

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "strict": self.strict,
            "scaled_scc_level": self.scaled_scc_level,
            "scaled_scc_eps": str(self.scaled_scc_eps),
            "void_guarantees": list(self.void_guarantees),
        }

    @classmethod
    def from_json(cls, data) -> SpaceConfig:
        return cls(
            mode=data.get("mode", SCALED),
            strict=bool(data.get("strict", False)),
            scaled_scc_level=int(data.get("scaled_scc_level", 1)),
            scaled_scc_eps=Fraction(data.get("scaled_scc_eps", "1")),
        )
