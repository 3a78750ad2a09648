"""Builders and parameter solvers for the phase-conjugate-input cloners.

Covers the irreversible n+n -> m machine (variable tap splitter, dual
homodyne of the tapped beam mixed with the conjugate rail, feed-forward
displacement, distribution tree), its reversible variant with an EPR
ancilla producing m anticlones, the replica concentration stage, and the
standard-cloner fidelity baseline.

A built Circuit is immutable data shared by all evaluation engines: a
catalog describing every input mode, a rail list mapping register positions
to input labels, and an ordered element list.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .heisenberg import (
    InputCatalog,
    InputSpec,
    coherent_input,
    conjugate_input,
    epr_input,
    vacuum_input,
    validate_catalog,
)

SQRT_HALF = math.sqrt(0.5)


class CircuitError(ValueError):
    """Raised for invalid machine parameters or malformed circuits."""


@dataclass(frozen=True)
class ClonerParams:
    """Machine parameters.

    Attributes:
        n: number of conjugate input pairs (n coherent replicas plus n
            phase-conjugate replicas).
        m: number of clones (and of anticlones for the reversible machine).
        eta: homodyne detector efficiency in (0, 1].
        epr_r: ancilla squeezing; None selects the irreversible machine.
        alpha: input amplitude (x, p) shared by all replicas.
    """

    n: int
    m: int
    eta: float = 1.0
    epr_r: float | None = None
    alpha: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise CircuitError("n must be a positive integer")
        if not isinstance(self.m, int) or self.m < 1:
            raise CircuitError("m must be a positive integer")
        if not 0.0 < self.eta <= 1.0:
            raise CircuitError("eta must be in (0, 1]")
        if self.epr_r is not None and self.epr_r < 0:
            raise CircuitError("epr_r must be >= 0")
        alpha = tuple(float(v) for v in self.alpha)
        if len(alpha) != 2:
            raise CircuitError("alpha must be an (x, p) pair")
        object.__setattr__(self, "alpha", alpha)

    @property
    def reversible(self) -> bool:
        return self.epr_r is not None


@dataclass(frozen=True)
class BeamSplitter:
    """Mix rails (a, b) -> (t a + r b, -r a + t b); amplitudes may be signed."""

    rail_a: int
    rail_b: int
    t_amp: float
    r_amp: float


@dataclass(frozen=True)
class Homodyne:
    """Measure one quadrature of a rail into a numbered classical record.

    ``eta`` < 1 mixes the rail with the fresh vacuum on ``loss_rail`` before
    detection.  The measured rail is dead afterwards.
    """

    rail: int
    quadrature: str
    record: int
    eta: float = 1.0
    loss_rail: int | None = None


@dataclass(frozen=True)
class FeedForward:
    """Displace one quadrature of a rail by gain * record."""

    record: int
    rail: int
    quadrature: str
    gain: float


@dataclass(frozen=True)
class Distribute:
    """Spread rails[0] over all listed rails; rails[1:] carry fresh vacua."""

    rails: tuple[int, ...]


Element = Union[BeamSplitter, Homodyne, FeedForward, Distribute]


@dataclass(frozen=True)
class Circuit:
    """An executable machine description, shared by all engines."""

    catalog: InputCatalog
    rails: tuple[str, ...]
    elements: tuple[Element, ...]
    clones: tuple[int, ...]
    anticlones: tuple[int, ...] = ()
    n_records: int = 0
    aux_label: str | None = None
    params: ClonerParams | None = None

    @property
    def n_rails(self) -> int:
        return len(self.rails)

    def validate(self) -> "Circuit":
        """Structural checks: rails exist, no rail measured twice or reused
        after measurement, records defined before consumption."""
        validate_catalog(self.catalog)
        for label in self.rails:
            if label not in self.catalog:
                raise CircuitError(f"rail label {label!r} missing from catalog")
        measured: set[int] = set()
        defined_records: set[int] = set()

        def check_live(rail: int, what: str) -> None:
            if not 0 <= rail < self.n_rails:
                raise CircuitError(f"{what} rail {rail} out of range")
            if rail in measured:
                raise CircuitError(f"{what} uses measured rail {rail}")

        for element in self.elements:
            if isinstance(element, BeamSplitter):
                if element.rail_a == element.rail_b:
                    raise CircuitError("beam splitter rails must be distinct")
                check_live(element.rail_a, "beam splitter")
                check_live(element.rail_b, "beam splitter")
            elif isinstance(element, Homodyne):
                check_live(element.rail, "homodyne")
                if not 0.0 < element.eta <= 1.0:
                    raise CircuitError("homodyne eta must be in (0, 1]")
                if element.quadrature not in ("x", "p"):
                    raise CircuitError("homodyne quadrature must be 'x' or 'p'")
                if element.eta < 1.0:
                    if element.loss_rail is None:
                        raise CircuitError("homodyne with eta < 1 needs a loss rail")
                    check_live(element.loss_rail, "homodyne loss")
                    if element.loss_rail == element.rail:
                        raise CircuitError("loss rail must differ from measured rail")
                if element.record != len(defined_records):
                    raise CircuitError("records must be numbered consecutively from 0")
                defined_records.add(element.record)
                measured.add(element.rail)
            elif isinstance(element, FeedForward):
                check_live(element.rail, "feed-forward")
                if element.quadrature not in ("x", "p"):
                    raise CircuitError("feed-forward quadrature must be 'x' or 'p'")
                if element.record not in defined_records:
                    raise CircuitError(
                        f"feed-forward consumes undefined record {element.record}"
                    )
            elif isinstance(element, Distribute):
                if len(set(element.rails)) != len(element.rails):
                    raise CircuitError("distribution rails must be distinct")
                for rail in element.rails:
                    check_live(rail, "distribution")
            else:  # pragma: no cover - guards future element types
                raise CircuitError(f"unknown element {element!r}")
        if len(defined_records) != self.n_records:
            raise CircuitError("n_records does not match the homodyne count")
        for rail in self.clones + self.anticlones:
            if not 0 <= rail < self.n_rails or rail in measured:
                raise CircuitError(f"output rail {rail} is not live")
        return self


def reflect_amplitude(n: int, m: int) -> float:
    """Signed amplitude reflectivity (m - n) / (m + n) of the tap splitter.

    The sign keeps the signal-budget identity
    sqrt(n) (1 + rho) / sqrt(1 - rho^2) = sqrt(m) valid on both sides of
    m = n; its square is the power reflectivity.
    """
    _check_counts(n, m)
    return (m - n) / (m + n)


def solve_reflectivity(n: int, m: int) -> float:
    """Power reflectivity (m - n)^2 / (m + n)^2 of the tap splitter."""
    amp = reflect_amplitude(n, m)
    return amp * amp


def solve_gain(reflectivity: float, eta: float = 1.0) -> float:
    """Feed-forward gain sqrt(2 R / (eta (1 - R))).

    With this gain the tap-port vacuum cancels exactly in the displaced
    field, for any detector efficiency.
    """
    if not 0.0 <= reflectivity < 1.0:
        raise ValueError("reflectivity must be in [0, 1)")
    if not 0.0 < eta <= 1.0:
        raise ValueError("eta must be in (0, 1]")
    return math.sqrt(2.0 * reflectivity / (eta * (1.0 - reflectivity)))


def solve_epr_gain(reflectivity: float, eta: float = 1.0) -> float:
    """Ancilla-arm feed-forward gain sqrt(2 / (eta (1 - R))).

    This gain gives the displaced ancilla a unit coefficient on its EPR
    partner, so the squeezed combinations set the anticlone noise.  Diverges
    at R -> 1, hence the pole guard.
    """
    if reflectivity < 0.0 or reflectivity >= 1.0 - 1e-12:
        raise ValueError("reflectivity must be in [0, 1 - 1e-12)")
    if not 0.0 < eta <= 1.0:
        raise ValueError("eta must be in (0, 1]")
    return math.sqrt(2.0 / (eta * (1.0 - reflectivity)))


def _check_counts(n: int, m: int) -> None:
    if not isinstance(n, int) or n < 1:
        raise ValueError("n must be a positive integer")
    if not isinstance(m, int) or m < 1:
        raise ValueError("m must be a positive integer")


@dataclass(frozen=True)
class CircuitFragment:
    """A beam-splitter chain plus the rail its bright output lands on."""

    elements: tuple[BeamSplitter, ...]
    bright_rail: int


def _concentration_elements(rails: list[int]) -> list[BeamSplitter]:
    # chain with transmittances (k-1)/k folds equal beams into rails[0]
    # with weight 1/sqrt(len(rails)) each; the other outputs are dark
    elements = []
    for k in range(2, len(rails) + 1):
        elements.append(
            BeamSplitter(
                rails[0],
                rails[k - 1],
                t_amp=math.sqrt((k - 1) / k),
                r_amp=math.sqrt(1.0 / k),
            )
        )
    return elements


def build_concentration(n: int) -> CircuitFragment:
    """Fold n identically prepared rails 0..n-1 into one bright mode.

    The bright output carries every input with weight exactly 1/sqrt(n);
    the n - 1 dark outputs are discarded downstream.
    """
    if not isinstance(n, int) or n < 1:
        raise ValueError("n must be a positive integer")
    return CircuitFragment(tuple(_concentration_elements(list(range(n)))), 0)


def build_pci_cloner(params: ClonerParams) -> Circuit:
    """Irreversible n+n -> m cloner built from linear optics and homodyne.

    Concentrates both rails, taps the coherent rail with the solved
    reflectivity, mixes the tapped beam 50/50 with the conjugate rail,
    measures X and P on the two ports, feeds the records forward onto the
    transmitted beam with the noise-cancelling gain, and distributes it
    into m clones.
    """
    if params.epr_r is not None:
        raise CircuitError("epr_r must be absent for the irreversible machine")
    return _build_machine(params, reversible=False)


def build_reversible_cloner(params: ClonerParams) -> Circuit:
    """Reversible n+n -> m+m machine: an EPR ancilla recovers anticlones.

    EPR arm 1 replaces the tap splitter's vacuum port (it cancels from the
    clones, which are unchanged); the same records displace arm 2 with the
    conjugating gain pair (+g1, -g1), and arm 2 distributes into m
    anticlones.
    """
    if params.epr_r is None:
        raise CircuitError("reversible machine requires epr_r")
    return _build_machine(params, reversible=True)


def _build_machine(params: ClonerParams, reversible: bool) -> Circuit:
    n, m, eta = params.n, params.m, params.eta
    x_in, p_in = params.alpha
    lossy = eta < 1.0

    catalog: InputCatalog = {}
    rails: list[str] = []

    def add_rail(label: str, spec: InputSpec) -> int:
        catalog[label] = spec
        rails.append(label)
        return len(rails) - 1

    a_rails = [add_rail(f"a{i + 1}", coherent_input(x_in, p_in)) for i in range(n)]
    b_rails = [add_rail(f"b{i + 1}", conjugate_input(x_in, p_in)) for i in range(n)]
    if reversible:
        aux_label = "epr1"
        aux = add_rail(aux_label, epr_input("epr2", params.epr_r))
        anc2 = add_rail("epr2", epr_input("epr1", params.epr_r))
    else:
        aux_label = "V1"
        aux = add_rail(aux_label, vacuum_input())
    vd1 = add_rail("VD1", vacuum_input()) if lossy else None
    vd2 = add_rail("VD2", vacuum_input()) if lossy else None
    v_rails = [add_rail(f"v{k + 1}", vacuum_input()) for k in range(m - 1)]
    if reversible:
        w_rails = [add_rail(f"w{k + 1}", vacuum_input()) for k in range(m - 1)]

    rho = reflect_amplitude(n, m)
    tau = math.sqrt(1.0 - rho * rho)
    gain = rho / tau * math.sqrt(2.0 / eta)

    elements: list[Element] = []
    elements += _concentration_elements(a_rails)
    elements += _concentration_elements(b_rails)
    transmitted = a_rails[0]
    conjugate_rail = b_rails[0]
    # tap splitter: aux rail collects the reflected beam, the coherent rail
    # keeps the transmitted one
    elements.append(BeamSplitter(aux, transmitted, t_amp=tau, r_amp=rho))
    # 50/50 combiner: X port on the conjugate rail, P port on the aux rail
    elements.append(BeamSplitter(conjugate_rail, aux, t_amp=SQRT_HALF, r_amp=SQRT_HALF))
    elements.append(Homodyne(conjugate_rail, "x", record=0, eta=eta, loss_rail=vd1))
    elements.append(Homodyne(aux, "p", record=1, eta=eta, loss_rail=vd2))
    elements.append(FeedForward(0, transmitted, "x", gain))
    elements.append(FeedForward(1, transmitted, "p", gain))
    anticlones: tuple[int, ...] = ()
    if reversible:
        g1 = solve_epr_gain(rho * rho, eta)
        elements.append(FeedForward(0, anc2, "x", g1))
        elements.append(FeedForward(1, anc2, "p", -g1))
    clone_rails = (transmitted, *v_rails)
    elements.append(Distribute(clone_rails))
    if reversible:
        anticlones = (anc2, *w_rails)
        elements.append(Distribute(anticlones))

    return Circuit(
        catalog=catalog,
        rails=tuple(rails),
        elements=tuple(elements),
        clones=clone_rails,
        anticlones=anticlones,
        n_records=2,
        aux_label=aux_label,
        params=params,
    ).validate()


def build_standard_cloner_reference(n_inputs: int, m: int) -> float:
    """Closed-form fidelity of the standard n -> m Gaussian cloner.

    Baseline only -- no circuit is built.  Requires m >= n_inputs.
    """
    _check_counts(n_inputs, m)
    if m < n_inputs:
        raise ValueError("standard cloner requires m >= n_inputs")
    return m * n_inputs / (m * n_inputs + m - n_inputs)
