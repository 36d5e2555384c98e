"""Zero-probability constraint families satisfied by the W state."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .statevector import Basis, MeasurementSpec, Record, SparseState, probability

DEFAULT_TOLERANCE = 1e-12

Z_PAIR = "z-pair"
X_PAIR = "x-pair"
COMPLETENESS = "completeness"
# user-supplied assertions, only checked structurally for site validity
CUSTOM = "custom"
_FAMILY_RANK = {Z_PAIR: 0, X_PAIR: 1, COMPLETENESS: 2, CUSTOM: 3}


@dataclass(frozen=True)
class ConstraintLabel:
    """Family tag plus the sites (and X sign pattern) that identify a constraint."""

    family: str
    sites: tuple[int, ...] = ()
    signature: tuple[int, ...] = ()

    def sort_key(self) -> tuple:
        # (+,-) sorts before (-,+)
        return (_FAMILY_RANK[self.family], self.sites, tuple(-s for s in self.signature))

    def __str__(self) -> str:
        if self.family == COMPLETENESS:
            return COMPLETENESS
        sites = ",".join(map(str, self.sites))
        if self.family in (Z_PAIR, CUSTOM):
            return f"{self.family}({sites})"
        sig = "".join("+" if s > 0 else "-" for s in self.signature)
        return f"{X_PAIR}({sites};{sig})"


@dataclass(frozen=True)
class ZeroProbConstraint:
    n_sites: int
    spec: MeasurementSpec
    label: ConstraintLabel

    def __post_init__(self) -> None:
        self.spec.check_fits(self.n_sites)
        fam = self.label.family
        recs = self.spec.records
        if fam == Z_PAIR:
            if len(recs) != 2 or any(r.basis is not Basis.Z or r.outcome != -1 for r in recs):
                raise ValueError("z-pair constraint needs exactly two (Z, -1) records")
        elif fam == X_PAIR:
            xs = [r for r in recs if r.basis is Basis.X]
            zs = [r for r in recs if r.basis is Basis.Z]
            if (
                len(recs) != self.n_sites
                or len(xs) != 2
                or xs[0].outcome == xs[1].outcome
                or any(r.outcome != 1 for r in zs)
            ):
                raise ValueError("x-pair constraint needs two opposite X records and Z=+1 elsewhere")
        elif fam == COMPLETENESS:
            if len(recs) != self.n_sites or any(r.basis is not Basis.Z or r.outcome != 1 for r in recs):
                raise ValueError("completeness constraint needs Z=+1 on every site")
        elif fam == CUSTOM:
            pass
        else:
            raise ValueError(f"unknown constraint family {fam!r}")

    def to_dict(self) -> dict:
        return {
            "label": {
                "family": self.label.family,
                "sites": list(self.label.sites),
                "signature": list(self.label.signature),
            },
            "n_sites": self.n_sites,
            "records": [
                {"site": r.site, "basis": r.basis.value, "outcome": r.outcome}
                for r in self.spec.records
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> ZeroProbConstraint:
        lab = data["label"]
        spec = MeasurementSpec(
            tuple(Record(r["site"], Basis(r["basis"]), r["outcome"]) for r in data["records"])
        )
        label = ConstraintLabel(lab["family"], tuple(lab["sites"]), tuple(lab["signature"]))
        return cls(data["n_sites"], spec, label)


def custom_constraint(n: int, spec: MeasurementSpec) -> ZeroProbConstraint:
    """Assert an arbitrary spec has probability zero."""
    label = ConstraintLabel(CUSTOM, tuple(sorted(spec.sites)))
    return ZeroProbConstraint(n, spec, label)


def _need_pairs(n: int) -> None:
    if not isinstance(n, int) or n < 2:
        raise ValueError(f"pair constraints need n >= 2, got {n!r}")


def z_pair_constraints(n: int) -> list[ZeroProbConstraint]:
    """No two sites may both be found occupied."""
    _need_pairs(n)
    out = []
    for i, j in itertools.combinations(range(n), 2):
        spec = MeasurementSpec.of((i, Basis.Z, -1), (j, Basis.Z, -1))
        out.append(ZeroProbConstraint(n, spec, ConstraintLabel(Z_PAIR, (i, j))))
    return out


def x_pair_constraints(n: int) -> list[ZeroProbConstraint]:
    """Opposite X outcomes on {r, s} are impossible when every other site is empty.

    One constraint per unordered pair and sign pattern, n(n-1) in total.
    """
    _need_pairs(n)
    out = []
    for r, s in itertools.combinations(range(n), 2):
        for sig in ((1, -1), (-1, 1)):
            recs = [(r, Basis.X, sig[0]), (s, Basis.X, sig[1])]
            recs += [(k, Basis.Z, 1) for k in range(n) if k not in (r, s)]
            label = ConstraintLabel(X_PAIR, (r, s), sig)
            out.append(ZeroProbConstraint(n, MeasurementSpec.of(*recs), label))
    return out


def completeness_constraint(n: int) -> ZeroProbConstraint:
    """All sites empty at once is impossible: the photon is somewhere."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"completeness constraint needs n >= 1, got {n!r}")
    spec = MeasurementSpec.of(*[(k, Basis.Z, 1) for k in range(n)])
    return ZeroProbConstraint(n, spec, ConstraintLabel(COMPLETENESS))


def all_constraints(n: int, use_completeness: bool = True) -> list[ZeroProbConstraint]:
    """Every constraint family for `n` sites, canonically sorted by label.

    For n = 1 the pair families are empty.
    """
    out = []
    if n >= 2:
        out += z_pair_constraints(n) + x_pair_constraints(n)
    if use_completeness:
        out.append(completeness_constraint(n))
    return sorted(out, key=lambda c: c.label.sort_key())


@dataclass(frozen=True)
class ConstraintReport:
    n_sites: int
    labels: tuple[ConstraintLabel, ...]
    values: tuple[float, ...]
    tolerance: float
    max_violation: float = field(init=False)
    passed: bool = field(init=False)

    def __post_init__(self) -> None:
        worst = max(self.values, default=0.0)
        object.__setattr__(self, "max_violation", worst)
        object.__setattr__(self, "passed", worst <= self.tolerance)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {
            "n_sites": self.n_sites,
            "tolerance": self.tolerance,
            "max_violation": self.max_violation,
            "verdict": self.verdict,
            "constraints": [
                {"label": str(lab), "family": lab.family, "probability": v}
                for lab, v in zip(self.labels, self.values)
            ],
        }


def verify_constraints(
    state: SparseState,
    constraints: list[ZeroProbConstraint],
    tolerance: float = DEFAULT_TOLERANCE,
) -> ConstraintReport:
    if not tolerance > 0 or math.isnan(tolerance):
        raise ValueError(f"tolerance must be positive, got {tolerance}")
    for c in constraints:
        if c.n_sites != state.n_sites:
            raise ValueError(
                f"constraint {c.label} is for {c.n_sites} sites, state has {state.n_sites}"
            )
    values = tuple(probability(state, c.spec) for c in constraints)
    return ConstraintReport(state.n_sites, tuple(c.label for c in constraints), values, tolerance)
