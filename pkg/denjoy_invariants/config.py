# denjoy_invariants/config.py

import os
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterator

# -------------------------------------------------------------------
# 1) Defaults
# -------------------------------------------------------------------
DEFAULT_WORKING_BITS = 128
DEFAULT_MAX_BITS = 1024
# lattice points enumerated for a single gap table
DEFAULT_ENUM_BUDGET = 2_000_000
DEFAULT_MAX_D = 16
# box |n_i| <= bound searched when certifying rational independence of gamma
DEFAULT_INDEPENDENCE_BOUND = 6
# l1 radius of the gap closures tabulated for the orbit disjointness certificate
DEFAULT_CERTIFICATE_RADIUS = 2
DEFAULT_LAMBDA = Fraction(1, 2)
DECIMAL_DIGITS = 30

ENV_PREFIX = "DENJOY_"


# -------------------------------------------------------------------
# 2) Precision settings carried through every computation
# -------------------------------------------------------------------
@dataclass(frozen=True)
class PrecisionSettings:
    working_bits: int = DEFAULT_WORKING_BITS
    max_bits: int = DEFAULT_MAX_BITS
    enum_budget: int = DEFAULT_ENUM_BUDGET

    def __post_init__(self):
        if self.working_bits < 8:
            raise ValueError(f"working_bits must be at least 8, got {self.working_bits}")
        if self.max_bits < self.working_bits:
            raise ValueError(
                f"max_bits ({self.max_bits}) is below working_bits ({self.working_bits})"
            )
        if self.enum_budget < 1:
            raise ValueError("enum_budget must be positive")

    def refinements(self) -> Iterator[int]:
        """Precision ladder: working, doubled, ..., capped at the ceiling."""
        bits = self.working_bits
        while bits < self.max_bits:
            yield bits
            bits *= 2
        yield self.max_bits

    def with_overrides(self, working_bits=None, max_bits=None, enum_budget=None) -> "PrecisionSettings":
        changes = {}
        if working_bits is not None:
            changes["working_bits"] = int(working_bits)
        if max_bits is not None:
            changes["max_bits"] = int(max_bits)
        if enum_budget is not None:
            changes["enum_budget"] = int(enum_budget)
        if "working_bits" in changes and "max_bits" not in changes:
            changes["max_bits"] = max(self.max_bits, changes["working_bits"])
        return replace(self, **changes)

    @classmethod
    def from_env(cls) -> "PrecisionSettings":
        return cls().with_overrides(
            working_bits=os.environ.get(ENV_PREFIX + "WORKING_BITS"),
            max_bits=os.environ.get(ENV_PREFIX + "MAX_BITS"),
            enum_budget=os.environ.get(ENV_PREFIX + "ENUM_BUDGET"),
        )


DEFAULT_SETTINGS = PrecisionSettings()
