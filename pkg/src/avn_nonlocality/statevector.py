"""Sparse pure states over N two-level sites and Z/X measurement probabilities.

Basis index convention: bit k of the integer index is set iff site k is in
|1> (occupied).  |0> carries sigma_Z = +1 and |1> carries sigma_Z = -1.
For X, |+> = (|0> + |1>)/sqrt(2) carries +1 and |-> = (|0> - |1>)/sqrt(2)
carries -1.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import NamedTuple

#: Largest supported number of sites.  Indices are plain Python ints, but the
#: enumeration code packs (x, z) words into int64, so keep 2 * n below 64.
MAX_SITES = 31

#: Amplitudes with modulus below this are treated as structural zeros.
SPARSITY_EPS = 1e-15

_INV_SQRT2 = 1 / math.sqrt(2)


class Basis(str, enum.Enum):
    Z = "Z"
    X = "X"


class Record(NamedTuple):
    """One single-site measurement outcome."""

    site: int
    basis: Basis
    outcome: int


class SpecError(ValueError):
    """A measurement spec is malformed or does not fit the state."""


def _check_outcome(outcome: int) -> int:
    if outcome not in (1, -1):
        raise SpecError(f"outcome must be +1 or -1, got {outcome!r}")
    return int(outcome)


@dataclass(frozen=True)
class MeasurementSpec:
    """A set of simultaneous single-site outcomes on distinct sites."""

    records: tuple[Record, ...] = ()

    def __post_init__(self) -> None:
        recs = []
        for site, basis, outcome in self.records:
            if not isinstance(site, int) or site < 0:
                raise SpecError(f"site must be a non-negative int, got {site!r}")
            recs.append(Record(site, Basis(basis), _check_outcome(outcome)))
        sites = [r.site for r in recs]
        if len(set(sites)) != len(sites):
            raise SpecError(f"duplicate sites in measurement spec: {sorted(sites)}")
        object.__setattr__(self, "records", tuple(recs))

    @classmethod
    def of(cls, *records: tuple[int, str | Basis, int]) -> MeasurementSpec:
        return cls(tuple(Record(*r) for r in records))

    @property
    def sites(self) -> frozenset[int]:
        return frozenset(r.site for r in self.records)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def union(self, other: MeasurementSpec) -> MeasurementSpec:
        return MeasurementSpec(self.records + other.records)

    def check_fits(self, n_sites: int) -> None:
        for r in self.records:
            if r.site >= n_sites:
                raise SpecError(f"site {r.site} out of range for {n_sites} sites")


@dataclass(frozen=True)
class SparseState:
    """Immutable sparse vector of complex amplitudes keyed by basis index."""

    n_sites: int
    amplitudes: Mapping[int, complex] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not 1 <= self.n_sites <= MAX_SITES:
            raise ValueError(f"n_sites must be in 1..{MAX_SITES}, got {self.n_sites}")
        dim = 1 << self.n_sites
        amps = {}
        for idx, amp in self.amplitudes.items():
            if not 0 <= idx < dim:
                raise ValueError(f"basis index {idx} out of range for {self.n_sites} sites")
            if abs(amp) >= SPARSITY_EPS:
                amps[idx] = complex(amp)
        object.__setattr__(self, "amplitudes", MappingProxyType(amps))

    def norm_squared(self) -> float:
        return math.fsum(abs(a) ** 2 for a in self.amplitudes.values())

    def __len__(self) -> int:
        return len(self.amplitudes)


def build_w_state(n: int) -> SparseState:
    """Single excitation spread with equal positive amplitude over `n` sites."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"W state needs n >= 1, got {n!r}")
    if n > MAX_SITES:
        raise ValueError(f"n={n} exceeds the supported maximum of {MAX_SITES} sites")
    amp = 1 / math.sqrt(n)
    return SparseState(n, {1 << k: amp for k in range(n)})


def project(state: SparseState, site: int, basis: Basis | str, outcome: int) -> SparseState:
    """Apply the rank-1 projector for one site's outcome; the result is unnormalized."""
    if not 0 <= site < state.n_sites:
        raise SpecError(f"site {site} out of range for {state.n_sites} sites")
    basis = Basis(basis)
    outcome = _check_outcome(outcome)
    bit = 1 << site
    out: dict[int, complex] = {}
    if basis is Basis.Z:
        want = 0 if outcome == 1 else bit
        for idx, amp in state.amplitudes.items():
            if idx & bit == want:
                out[idx] = amp
    else:
        # (I + outcome * X) / 2 sends |b> to (|b> + outcome |1-b>) / 2
        for idx, amp in state.amplitudes.items():
            half = amp / 2
            out[idx] = out.get(idx, 0) + half
            flipped = idx ^ bit
            out[flipped] = out.get(flipped, 0) + outcome * half
    return SparseState(state.n_sites, out)


def _bra_factor(basis: Basis, outcome: int, bit_value: int) -> float:
    """<e|b> for the single-site eigenvector e of (basis, outcome)."""
    if basis is Basis.Z:
        return 1.0 if bit_value == (0 if outcome == 1 else 1) else 0.0
    if bit_value == 0 or outcome == 1:
        return _INV_SQRT2
    return -_INV_SQRT2


def probability(state: SparseState, spec: MeasurementSpec) -> float:
    """Joint probability of all outcomes in `spec` (simultaneous measurement).

    Computed as a sum over the unmeasured-site configurations of squared
    overlaps with the product eigenvector of the measured sites, which stays
    linear in the number of stored amplitudes.
    """
    spec.check_fits(state.n_sites)
    if not spec.records:
        return min(1.0, state.norm_squared())
    measured_mask = 0
    for r in spec.records:
        measured_mask |= 1 << r.site
    groups: dict[int, complex] = {}
    for idx, amp in state.amplitudes.items():
        coeff = amp
        for r in spec.records:
            coeff *= _bra_factor(r.basis, r.outcome, (idx >> r.site) & 1)
            if coeff == 0:
                break
        if coeff != 0:
            rest = idx & ~measured_mask
            groups[rest] = groups.get(rest, 0) + coeff
    p = math.fsum(abs(c) ** 2 for c in groups.values())
    return min(1.0, p)


def probability_by_projection(state: SparseState, spec: MeasurementSpec) -> float:
    """Squared norm after applying every projector in turn.

    Exponential in the number of X records; kept as a cross-check for
    `probability`.
    """
    spec.check_fits(state.n_sites)
    for r in spec.records:
        state = project(state, r.site, r.basis, r.outcome)
    return state.norm_squared()


class ZeroProbabilityCondition(ValueError):
    """Raised when conditioning on an event of probability zero."""


def conditional_probability(
    state: SparseState,
    given: MeasurementSpec,
    target: MeasurementSpec,
    atol: float = 1e-15,
) -> float:
    if given.sites & target.sites:
        raise SpecError("given and target must act on disjoint sites")
    p_given = probability(state, given)
    if p_given <= atol:
        raise ZeroProbabilityCondition(f"conditioning event has probability {p_given:.3g}")
    return probability(state, given.union(target)) / p_given


def outcome_strings(n: int) -> Iterable[tuple[int, ...]]:
    """All 2^n tuples of +/-1 outcomes in a fixed order."""
    for code in range(1 << n):
        yield tuple(-1 if (code >> k) & 1 else 1 for k in range(n))
