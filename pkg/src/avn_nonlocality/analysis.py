"""Quantum predictions for the W state versus the local value of 1.

Also contains the outcome-independence and parameter-independence scans:
the W state breaks the former and respects the latter.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass

from .statevector import (
    MAX_SITES,
    Basis,
    MeasurementSpec,
    build_w_state,
    conditional_probability,
    probability,
)

#: Largest n accepted by the gap sweep; the overlap evaluation is O(n^2).
GAP_CAP = MAX_SITES
OI_THRESHOLD = 0.01


def uniform_x_specs(n: int) -> tuple[MeasurementSpec, MeasurementSpec]:
    """The two mutually exclusive events "every X is +1" and "every X is -1"."""
    return tuple(MeasurementSpec.of(*[(k, Basis.X, s) for k in range(n)]) for s in (1, -1))


def closed_form_all_x_equal(n: int) -> float:
    return n / 2 ** (n - 1)


def quantum_all_x_equal(n: int) -> float:
    """P(all X outcomes equal) on the n-site W state, by overlap with the two uniform strings."""
    if not isinstance(n, int) or not 1 <= n <= GAP_CAP:
        raise ValueError(f"n must be in 1..{GAP_CAP}, got {n!r}")
    state = build_w_state(n)
    return sum(probability(state, spec) for spec in uniform_x_specs(n))


@dataclass(frozen=True)
class GapRow:
    n: int
    local_prediction: float
    quantum_prediction: float
    gap: float
    quantum_simulated: float


def gap_sweep(n_min: int = 2, n_max: int = 20) -> list[GapRow]:
    if not 1 <= n_min <= n_max <= GAP_CAP:
        raise ValueError(f"need 1 <= n_min <= n_max <= {GAP_CAP}, got {n_min}..{n_max}")
    rows = []
    for n in range(n_min, n_max + 1):
        q = closed_form_all_x_equal(n)
        sim = quantum_all_x_equal(n)
        if abs(q - sim) > 1e-10:
            raise ArithmeticError(f"simulated {sim!r} disagrees with closed form {q!r} at n={n}")
        rows.append(GapRow(n, 1.0, q, 1.0 - q, sim))
    return rows


@dataclass(frozen=True)
class ParameterIndependenceReport:
    n_sites: int
    tolerance: float
    max_deviation: float
    checked: int
    #: (site, basis, outcome, remote_site, remote_basis) at the max deviation
    worst_case: tuple

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance

    def to_dict(self) -> dict:
        d = asdict(self)
        d["worst_case"] = list(self.worst_case)
        d["passed"] = self.passed
        return d


def parameter_independence_check(n: int, tolerance: float = 1e-12) -> ParameterIndependenceReport:
    """Measuring a remote site without reading it must leave local marginals unchanged."""
    if n < 2:
        raise ValueError(f"independence checks need n >= 2, got {n}")
    state = build_w_state(n)
    worst, worst_case, checked = -1.0, (), 0
    for i, b, a in itertools.product(range(n), Basis, (1, -1)):
        local = probability(state, MeasurementSpec.of((i, b, a)))
        for j, b2 in itertools.product(range(n), Basis):
            if j == i:
                continue
            summed = sum(probability(state, MeasurementSpec.of((i, b, a), (j, b2, a2))) for a2 in (1, -1))
            dev = abs(local - summed)
            checked += 1
            if dev > worst:
                worst, worst_case = dev, (i, b.value, a, j, b2.value)
    return ParameterIndependenceReport(n, tolerance, worst, checked, worst_case)


@dataclass(frozen=True)
class OutcomeIndependenceReport:
    n_sites: int
    threshold: float
    #: (site i, outcome a, site j, outcome b) for P(X_j = b | X_i = a)
    witness: tuple[int, int, int, int] | None
    conditional: float
    marginal: float
    deviation: float

    @property
    def found(self) -> bool:
        return self.witness is not None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["witness"] = None if self.witness is None else list(self.witness)
        d["found"] = self.found
        return d


def outcome_independence_check(n: int, threshold: float = OI_THRESHOLD) -> OutcomeIndependenceReport:
    """Look for a remote X outcome whose probability depends on a local X result.

    The witness is the first combination, in (i, j, a, b) order, with the
    largest deviation.
    """
    if n < 2:
        raise ValueError(f"independence checks need n >= 2, got {n}")
    state = build_w_state(n)
    best = None
    for i, j in itertools.permutations(range(n), 2):
        for a, b in itertools.product((1, -1), repeat=2):
            given = MeasurementSpec.of((i, Basis.X, a))
            target = MeasurementSpec.of((j, Basis.X, b))
            cond = conditional_probability(state, given, target)
            marg = probability(state, target)
            dev = abs(cond - marg)
            # 1e-12 slack so float noise cannot reorder equal deviations
            if best is None or dev > best[0] + 1e-12:
                best = (dev, (i, a, j, b), cond, marg)
    dev, witness, cond, marg = best
    if dev <= threshold:
        witness = None
    return OutcomeIndependenceReport(n, threshold, witness, cond, marg, dev)
