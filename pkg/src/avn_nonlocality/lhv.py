"""Deterministic local models: enumeration, constraint filtering, mixtures.

A deterministic model fixes sigma_Z and sigma_X at every site.  It is packed
into one 2n-bit integer, x word high and z word low, where a set bit means
the value -1.  Every enumeration order in this module is ascending in that
encoding.
"""

from __future__ import annotations

import math
from collections.abc import Iterator, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .constraints import ZeroProbConstraint, all_constraints
from .statevector import Basis, MeasurementSpec

DEFAULT_CAP = 12
#: Absolute ceiling regardless of the caller's cap; 4**14 is ~2.7e8 models.
HARD_CAP = 14
#: Above this many survivors reports carry counts only, not the list.
SURVIVOR_LIST_LIMIT = 100_000

_CHUNK = 1 << 20


class EnumerationCapError(ValueError):
    """Requested enumeration is larger than the configured cap."""


@dataclass(frozen=True, order=True)
class LhvAssignment:
    n_sites: int
    z_values: int
    x_values: int

    def __post_init__(self) -> None:
        full = (1 << self.n_sites) - 1
        if self.n_sites < 1 or not (0 <= self.z_values <= full and 0 <= self.x_values <= full):
            raise ValueError(f"invalid assignment words for {self.n_sites} sites")

    @classmethod
    def from_signs(cls, z: Sequence[int], x: Sequence[int]) -> LhvAssignment:
        if len(z) != len(x):
            raise ValueError("z and x patterns must have equal length")
        zw = sum(1 << k for k, v in enumerate(z) if v == -1)
        xw = sum(1 << k for k, v in enumerate(x) if v == -1)
        return cls(len(z), zw, xw)

    @classmethod
    def decode(cls, code: int, n_sites: int) -> LhvAssignment:
        code = int(code)
        if not 0 <= code < 1 << (2 * n_sites):
            raise ValueError(f"encoding {code} out of range for {n_sites} sites")
        full = (1 << n_sites) - 1
        return cls(n_sites, code & full, code >> n_sites)

    def encode(self) -> int:
        return (self.x_values << self.n_sites) | self.z_values

    def value(self, site: int, basis: Basis | str) -> int:
        word = self.z_values if Basis(basis) is Basis.Z else self.x_values
        return -1 if (word >> site) & 1 else 1

    def pattern(self, basis: Basis | str) -> str:
        """Signs per site, site 0 first, e.g. '-++'."""
        return "".join("-" if self.value(k, basis) == -1 else "+" for k in range(self.n_sites))

    @property
    def x_uniform(self) -> bool:
        return self.x_values in (0, (1 << self.n_sites) - 1)


def iter_assignments(n: int) -> Iterator[LhvAssignment]:
    for code in range(1 << (2 * n)):
        yield LhvAssignment.decode(code, n)


def assignment_probability(a: LhvAssignment, spec: MeasurementSpec) -> int:
    """Factorized probability for a deterministic model: a product of 0/1 indicators."""
    spec.check_fits(a.n_sites)
    for r in spec.records:
        if a.value(r.site, r.basis) != r.outcome:
            return 0
    return 1


def satisfies(a: LhvAssignment, c: ZeroProbConstraint) -> bool:
    if c.n_sites != a.n_sites:
        raise ValueError(f"constraint for {c.n_sites} sites applied to {a.n_sites}-site model")
    return assignment_probability(a, c.spec) == 0


def _masks(constraints: Sequence[ZeroProbConstraint], n: int) -> np.ndarray:
    """Rows of (care_mask, value) on the packed encoding, one per constraint."""
    rows = []
    for c in constraints:
        if c.n_sites != n:
            raise ValueError(f"constraint {c.label} is for {c.n_sites} sites, not {n}")
        care = val = 0
        for r in c.spec.records:
            bit = 1 << (r.site + (n if r.basis is Basis.X else 0))
            care |= bit
            if r.outcome == -1:
                val |= bit
        rows.append((care, val))
    return np.array(rows, dtype=np.int64).reshape(-1, 2)


def _scan_range(lo: int, hi: int, masks: np.ndarray) -> np.ndarray:
    out = []
    for start in range(lo, hi, _CHUNK):
        codes = np.arange(start, min(hi, start + _CHUNK), dtype=np.int64)
        for care, val in masks:
            codes = codes[(codes & care) != val]
            if not codes.size:
                break
        out.append(codes)
    return np.concatenate(out) if out else np.empty(0, dtype=np.int64)


def _check_cap(n: int, cap: int) -> None:
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if n > min(cap, HARD_CAP):
        raise EnumerationCapError(
            f"n={n} exceeds the enumeration cap of {min(cap, HARD_CAP)} "
            f"({4 ** n:.3g} models); raise the cap (hard limit {HARD_CAP}) or lower n"
        )


def survivor_codes(
    n: int,
    constraints: Sequence[ZeroProbConstraint],
    cap: int = DEFAULT_CAP,
    workers: int = 1,
) -> np.ndarray:
    """Sorted encodings of every model that gives each constraint probability 0."""
    _check_cap(n, cap)
    masks = _masks(constraints, n)
    total = 1 << (2 * n)
    if workers <= 1 or total <= _CHUNK:
        return _scan_range(0, total, masks)
    step = -(-total // workers)
    bounds = [(lo, min(total, lo + step)) for lo in range(0, total, step)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_scan_range, *zip(*bounds), [masks] * len(bounds)))
    return np.sort(np.concatenate(parts))


def filter_survivors(
    n: int,
    constraints: Sequence[ZeroProbConstraint],
    cap: int = DEFAULT_CAP,
    workers: int = 1,
) -> list[LhvAssignment]:
    return [LhvAssignment.decode(c, n) for c in survivor_codes(n, constraints, cap, workers)]


def recount_survivors(n: int, constraints: Sequence[ZeroProbConstraint]) -> int:
    """Slow per-model recheck through `satisfies`; independent of the bitmask scan."""
    return sum(all(satisfies(a, c) for c in constraints) for a in iter_assignments(n))


@dataclass(frozen=True)
class TheoremReport:
    n_sites: int
    total_models: int
    survivor_count: int
    #: None when survivor_count exceeds SURVIVOR_LIST_LIMIT
    survivors: tuple[LhvAssignment, ...] | None
    all_survivors_x_uniform: bool
    completeness_constraint_used: bool
    #: survivors with no site occupied (z all +1); only possible without completeness
    z_all_plus_survivors: int
    #: survivor set is exactly {one site occupied} x {x uniform}
    matches_single_occupation_class: bool

    @property
    def passed(self) -> bool:
        return self.all_survivors_x_uniform

    def to_dict(self) -> dict:
        return {
            "n_sites": self.n_sites,
            "total_models": self.total_models,
            "survivor_count": self.survivor_count,
            "all_survivors_x_uniform": self.all_survivors_x_uniform,
            "completeness_constraint_used": self.completeness_constraint_used,
            "z_all_plus_survivors": self.z_all_plus_survivors,
            "matches_single_occupation_class": self.matches_single_occupation_class,
            "survivors": None
            if self.survivors is None
            else [
                {"encoding": a.encode(), "z_pattern": a.pattern("Z"), "x_pattern": a.pattern("X")}
                for a in self.survivors
            ],
        }


def single_occupation_codes(n: int) -> list[int]:
    """Encodings of {exactly one z = -1} x {x all +1 or all -1}, ascending."""
    full = (1 << n) - 1
    return sorted((xw << n) | (1 << k) for k in range(n) for xw in (0, full))


def verify_theorem(
    n: int,
    use_completeness: bool = True,
    cap: int = DEFAULT_CAP,
    workers: int = 1,
) -> TheoremReport:
    """Enumerate all 4^n deterministic models and check X-uniformity of the survivors."""
    _check_cap(n, cap)
    codes = survivor_codes(n, all_constraints(n, use_completeness), cap, workers)
    full = (1 << n) - 1
    xw = codes >> n
    zw = codes & full
    uniform = bool(np.all((xw == 0) | (xw == full)))
    survivors = None
    if len(codes) <= SURVIVOR_LIST_LIMIT:
        survivors = tuple(LhvAssignment.decode(c, n) for c in codes)
    return TheoremReport(
        n_sites=n,
        total_models=1 << (2 * n),
        survivor_count=int(len(codes)),
        survivors=survivors,
        all_survivors_x_uniform=uniform,
        completeness_constraint_used=use_completeness,
        z_all_plus_survivors=int(np.count_nonzero(zw == 0)),
        matches_single_occupation_class=codes.tolist() == single_occupation_codes(n),
    )


def mixture_prediction(
    survivors: Sequence[LhvAssignment],
    weights: Sequence[float],
    spec: MeasurementSpec | Sequence[MeasurementSpec],
) -> float:
    """Probability of an event under a convex mixture of deterministic models.

    `spec` may be a sequence of mutually exclusive specs, whose probabilities
    are summed (e.g. all X = +1 or all X = -1).
    """
    if len(weights) != len(survivors):
        raise ValueError(f"{len(weights)} weights for {len(survivors)} models")
    if any(w < 0 for w in weights):
        raise ValueError("weights must be non-negative")
    total = math.fsum(weights)
    if abs(total - 1) > 1e-12:
        raise ValueError(f"weights sum to {total!r}, not 1")
    events = [spec] if isinstance(spec, MeasurementSpec) else list(spec)
    return math.fsum(
        w * sum(assignment_probability(a, e) for e in events) for a, w in zip(survivors, weights)
    )
