"""Heisenberg-picture mode algebra over labeled circuit inputs.

Each optical mode is written as an exact linear combination of the circuit's
input quadratures plus a classical offset.  Pushing these expansions through
beam splitters, homodyne taps, feed-forward and distribution trees gives
closed-form output moments, and makes designed noise cancellations testable
as coefficient arithmetic instead of small numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

import numpy as np

#: a coefficient sum this small relative to its constituent terms can only be
#: the few-ulp residue of a designed cancellation; it is snapped to exact zero
CANCELLATION_TOL = 1e-14

# input preparation kinds
COHERENT = "coherent"
CONJUGATE = "conjugate"
VACUUM = "vacuum"
EPR = "epr"

Key = tuple[str, str]  # (input label, "x" | "p")


@dataclass(frozen=True)
class QuadratureExpansion:
    """Sparse linear form over input quadratures plus a classical offset.

    Absent keys are exactly zero.  Instances are value-like: operations
    return new expansions and never mutate.
    """

    coeffs: Mapping[Key, float] = field(default_factory=dict)
    offset: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "coeffs", {k: float(v) for k, v in dict(self.coeffs).items() if v != 0.0}
        )

    @classmethod
    def unit(cls, label: str, axis: str) -> "QuadratureExpansion":
        return cls({(label, axis): 1.0})

    def coefficient(self, label: str, axis: str) -> float:
        return self.coeffs.get((label, axis), 0.0)

    def labels(self) -> set[str]:
        return {label for label, _ in self.coeffs}

    def scaled(self, factor: float) -> "QuadratureExpansion":
        if factor == 0.0:
            return QuadratureExpansion()
        return QuadratureExpansion(
            {k: factor * v for k, v in self.coeffs.items()}, factor * self.offset
        )

    def plus(
        self, other: "QuadratureExpansion", factor: float = 1.0, snap: bool = True
    ) -> "QuadratureExpansion":
        """Return self + factor * other with cancellation snapping.

        When two terms cancel by construction, floating-point arithmetic
        leaves a few-ulp residue; ``snap`` turns it into a true 0.0 so the
        cancellation is exact rather than merely small.
        """
        out = dict(self.coeffs)
        for key, value in other.coeffs.items():
            term = factor * value
            base = out.get(key, 0.0)
            total = base + term
            if snap and total != 0.0 and abs(total) < CANCELLATION_TOL * max(
                abs(base), abs(term)
            ):
                total = 0.0
            if total == 0.0:
                out.pop(key, None)
            else:
                out[key] = total
        return QuadratureExpansion(out, self.offset + factor * other.offset)


@dataclass(frozen=True)
class ModeExpansion:
    """A mode's X and P quadratures as expansions over circuit inputs."""

    x: QuadratureExpansion
    p: QuadratureExpansion

    @classmethod
    def for_input(cls, label: str) -> "ModeExpansion":
        return cls(QuadratureExpansion.unit(label, "x"), QuadratureExpansion.unit(label, "p"))


def mix(
    a: ModeExpansion, b: ModeExpansion, t_amp: float, r_amp: float
) -> tuple[ModeExpansion, ModeExpansion]:
    """Real two-mode mixer: outputs (t a + r b, -r a + t b) on X and P alike."""
    if abs(t_amp * t_amp + r_amp * r_amp - 1.0) > 1e-12:
        raise ValueError("amplitudes must satisfy t^2 + r^2 = 1")
    out_a = ModeExpansion(
        a.x.scaled(t_amp).plus(b.x, r_amp), a.p.scaled(t_amp).plus(b.p, r_amp)
    )
    out_b = ModeExpansion(
        b.x.scaled(t_amp).plus(a.x, -r_amp), b.p.scaled(t_amp).plus(a.p, -r_amp)
    )
    return out_a, out_b


def beam_split(
    a: ModeExpansion, b: ModeExpansion, transmission: float
) -> tuple[ModeExpansion, ModeExpansion]:
    """Beam splitter with power transmission T in [0, 1]."""
    if not 0.0 <= transmission <= 1.0:
        raise ValueError("transmission must be in [0, 1]")
    return mix(a, b, math.sqrt(transmission), math.sqrt(1.0 - transmission))


def homodyne_expansion(
    mode: ModeExpansion,
    quadrature: str,
    eta: float = 1.0,
    noise_label: str | None = None,
) -> QuadratureExpansion:
    """Measured photocurrent for one quadrature at detector efficiency eta.

    An inefficient detector mixes in a fresh vacuum:
    sqrt(eta) * signal + sqrt(1 - eta) * detector vacuum.
    """
    if not 0.0 < eta <= 1.0:
        raise ValueError("eta must be in (0, 1]")
    if quadrature not in ("x", "p"):
        raise ValueError(f"quadrature must be 'x' or 'p', got {quadrature!r}")
    signal = mode.x if quadrature == "x" else mode.p
    if eta == 1.0:
        return signal
    if noise_label is None:
        raise ValueError("noise_label is required when eta < 1")
    return signal.scaled(math.sqrt(eta)).plus(
        QuadratureExpansion.unit(noise_label, quadrature), math.sqrt(1.0 - eta)
    )


def feed_forward(
    target: ModeExpansion,
    xm: QuadratureExpansion,
    pm: QuadratureExpansion,
    gain: float,
    p_gain: float | None = None,
) -> ModeExpansion:
    """Displace ``target`` by the measured records scaled with the gain(s).

    ``p_gain`` defaults to ``gain``; a sign-flipped P gain realizes a
    phase-conjugating displacement.
    """
    gp = gain if p_gain is None else p_gain
    return ModeExpansion(target.x.plus(xm, gain), target.p.plus(pm, gp))


def distribution_matrix(m: int) -> np.ndarray:
    """Orthogonal matrix spreading one bright mode over ``m`` output ports.

    Realized by a chain of m-1 beam splitters where splitter k taps off
    1/(m-k+1) of the remaining beam.  Every row carries sqrt(1/m) of the
    bright input (column 0); the vacuum-port columns follow the cascade sign
    pattern: each row ends in one positive tail entry, the last row is all
    negative.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    o = np.zeros((m, m))
    o[:, 0] = math.sqrt(1.0 / m)
    for k in range(m):
        for j in range(1, k + 1):
            o[k, j] = -math.sqrt(1.0 / ((m - j + 1) * (m - j)))
        if k < m - 1:
            o[k, k + 1] = math.sqrt((m - k - 1.0) / (m - k))
    return o


def combine(
    branches: Sequence[ModeExpansion], weights: Sequence[float]
) -> ModeExpansion:
    """Weighted sum of mode expansions (used to apply mixing-matrix rows)."""
    if len(branches) != len(weights):
        raise ValueError("branches and weights must have equal length")
    x = QuadratureExpansion()
    p = QuadratureExpansion()
    for branch, w in zip(branches, weights):
        w = float(w)
        x = x.plus(branch.x, w)
        p = p.plus(branch.p, w)
    return ModeExpansion(x, p)


def distribute(
    mode: ModeExpansion, m: int, fresh_labels: Sequence[str]
) -> list[ModeExpansion]:
    """Split ``mode`` into ``m`` symmetric outputs using m-1 fresh vacua."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if len(fresh_labels) != m - 1:
        raise ValueError(f"need {m - 1} fresh vacuum labels, got {len(fresh_labels)}")
    branches = [mode] + [ModeExpansion.for_input(label) for label in fresh_labels]
    rows = distribution_matrix(m)
    return [combine(branches, rows[k]) for k in range(m)]


def commutator_form(mode: ModeExpansion) -> float:
    """Canonical commutator of a mode in units of 2i.

    Evaluates sum_l (x_l^X p_l^P - x_l^P p_l^X) over input labels; a
    physical mode gives exactly 1.
    """
    labels = mode.x.labels() | mode.p.labels()
    return sum(
        mode.x.coefficient(l, "x") * mode.p.coefficient(l, "p")
        - mode.x.coefficient(l, "p") * mode.p.coefficient(l, "x")
        for l in labels
    )


@dataclass(frozen=True)
class InputSpec:
    """How one labeled input mode is prepared.

    ``coherent`` and ``conjugate`` carry a reference amplitude (x, p); the
    conjugate preparation has mean (x, -p).  An ``epr`` arm names its partner
    label and the shared squeezing parameter r.
    """

    kind: str
    x: float = 0.0
    p: float = 0.0
    partner: str | None = None
    r: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in (COHERENT, CONJUGATE, VACUUM, EPR):
            raise ValueError(f"unknown input kind {self.kind!r}")
        if self.kind == EPR:
            if self.partner is None:
                raise ValueError("EPR arm requires a partner label")
            if self.r < 0:
                raise ValueError("squeezing parameter r must be >= 0")
        elif self.partner is not None:
            raise ValueError("partner is only meaningful for EPR arms")

    @property
    def mean(self) -> tuple[float, float]:
        if self.kind == COHERENT:
            return (self.x, self.p)
        if self.kind == CONJUGATE:
            return (self.x, -self.p)
        return (0.0, 0.0)


def coherent_input(x: float, p: float) -> InputSpec:
    return InputSpec(COHERENT, x, p)


def conjugate_input(x: float, p: float) -> InputSpec:
    """Phase-conjugate preparation of reference amplitude (x, p)."""
    return InputSpec(CONJUGATE, x, p)


def vacuum_input() -> InputSpec:
    return InputSpec(VACUUM)


def epr_input(partner: str, r: float) -> InputSpec:
    return InputSpec(EPR, partner=partner, r=r)


InputCatalog = dict[str, InputSpec]


def validate_catalog(catalog: InputCatalog) -> None:
    """Check EPR partnering: each arm has exactly one matching partner."""
    for label, spec in catalog.items():
        if spec.kind != EPR:
            continue
        partner = catalog.get(spec.partner)
        if partner is None:
            raise ValueError(f"EPR arm {label!r} names missing partner {spec.partner!r}")
        if partner.kind != EPR or partner.partner != label or partner.r != spec.r:
            raise ValueError(f"EPR arms {label!r} and {spec.partner!r} are mismatched")


class Moments(NamedTuple):
    mean_x: float
    mean_p: float
    var_x: float
    var_p: float


def _key_mean(catalog: InputCatalog, key: Key) -> float:
    label, axis = key
    try:
        spec = catalog[label]
    except KeyError:
        raise ValueError(f"unknown input label {label!r}") from None
    mean = spec.mean
    return mean[0] if axis == "x" else mean[1]


def _key_covariance(catalog: InputCatalog, key_a: Key, key_b: Key) -> float:
    (la, qa), (lb, qb) = key_a, key_b
    try:
        spec_a = catalog[la]
    except KeyError:
        raise ValueError(f"unknown input label {la!r}") from None
    if lb not in catalog:
        raise ValueError(f"unknown input label {lb!r}")
    if la == lb:
        if qa != qb:
            return 0.0
        return math.cosh(2 * spec_a.r) if spec_a.kind == EPR else 1.0
    if spec_a.kind == EPR and spec_a.partner == lb:
        # X arms are anti-correlated, P arms correlated: the squeezed
        # combinations are X1 + X2 and P1 - P2
        if qa != qb:
            return 0.0
        s = math.sinh(2 * spec_a.r)
        return -s if qa == "x" else s
    return 0.0


def _expansion_mean(expansion: QuadratureExpansion, catalog: InputCatalog) -> float:
    return expansion.offset + sum(
        c * _key_mean(catalog, key) for key, c in expansion.coeffs.items()
    )


def _expansion_covariance(
    a: QuadratureExpansion, b: QuadratureExpansion, catalog: InputCatalog
) -> float:
    total = 0.0
    for key_a, ca in a.coeffs.items():
        for key_b, cb in b.coeffs.items():
            cov = _key_covariance(catalog, key_a, key_b)
            if cov != 0.0:
                total += ca * cb * cov
    return total


def evaluate_moments(mode: ModeExpansion, catalog: InputCatalog) -> Moments:
    """First and second moments of a mode for the catalogued inputs.

    Means come from the catalog (a conjugate preparation contributes its
    p-flipped mean); variances contract the expansion coefficients against
    unit vacuum variances and the EPR cross-correlations.
    """
    return Moments(
        mean_x=float(_expansion_mean(mode.x, catalog)),
        mean_p=float(_expansion_mean(mode.p, catalog)),
        var_x=float(_expansion_covariance(mode.x, mode.x, catalog)),
        var_p=float(_expansion_covariance(mode.p, mode.p, catalog)),
    )


def cross_covariance(mode: ModeExpansion, catalog: InputCatalog) -> float:
    """Covariance between a mode's X and P quadratures (0 for these circuits)."""
    return float(_expansion_covariance(mode.x, mode.p, catalog))
