"""Two analytic evaluators for built circuits.

``run_heisenberg`` propagates sparse operator expansions over the input
labels; ``run_phase_space`` propagates a dense mean vector and covariance
matrix, keeping each homodyne record as a classical Gaussian variable that
stays correlated with the optical register so feed-forward is a plain
linear update.  The two share nothing but the circuit description, so their
agreement is a genuine cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import heisenberg as hb
from .circuits import BeamSplitter, Circuit, Distribute, FeedForward, Homodyne
from .gaussian import GaussianState, epr_state, mixing_map


@dataclass(frozen=True)
class EngineMoments:
    """First and second moments of one output rail."""

    mean_x: float
    mean_p: float
    var_x: float
    var_p: float
    cov_xp: float

    def deviation(self, other: "EngineMoments") -> float:
        return max(
            abs(self.mean_x - other.mean_x),
            abs(self.mean_p - other.mean_p),
            abs(self.var_x - other.var_x),
            abs(self.var_p - other.var_p),
        )


def live_rails(circuit: Circuit) -> tuple[int, ...]:
    measured = {e.rail for e in circuit.elements if isinstance(e, Homodyne)}
    return tuple(r for r in range(circuit.n_rails) if r not in measured)


@dataclass(frozen=True)
class HeisenbergResult:
    expansions: dict[int, hb.ModeExpansion]  # live rails only
    moments: dict[int, EngineMoments]
    records: tuple[hb.QuadratureExpansion, ...]


def run_heisenberg(circuit: Circuit) -> HeisenbergResult:
    """Evaluate a circuit by exact expansion over its input quadratures."""
    circuit.validate()
    exps = {i: hb.ModeExpansion.for_input(label) for i, label in enumerate(circuit.rails)}
    records: dict[int, hb.QuadratureExpansion] = {}

    for element in circuit.elements:
        if isinstance(element, BeamSplitter):
            out_a, out_b = hb.mix(
                exps[element.rail_a], exps[element.rail_b], element.t_amp, element.r_amp
            )
            exps[element.rail_a] = out_a
            exps[element.rail_b] = out_b
        elif isinstance(element, Homodyne):
            noise_label = (
                circuit.rails[element.loss_rail] if element.loss_rail is not None else None
            )
            records[element.record] = hb.homodyne_expansion(
                exps.pop(element.rail), element.quadrature, element.eta, noise_label
            )
        elif isinstance(element, FeedForward):
            target = exps[element.rail]
            record = records[element.record]
            if element.quadrature == "x":
                exps[element.rail] = hb.ModeExpansion(
                    target.x.plus(record, element.gain), target.p
                )
            else:
                exps[element.rail] = hb.ModeExpansion(
                    target.x, target.p.plus(record, element.gain)
                )
        elif isinstance(element, Distribute):
            rows = hb.distribution_matrix(len(element.rails))
            branches = [exps[r] for r in element.rails]
            for k, rail in enumerate(element.rails):
                exps[rail] = hb.combine(branches, rows[k])

    moments = {}
    for rail, expansion in exps.items():
        mx, mp, vx, vp = hb.evaluate_moments(expansion, circuit.catalog)
        moments[rail] = EngineMoments(
            mx, mp, vx, vp, hb.cross_covariance(expansion, circuit.catalog)
        )
    return HeisenbergResult(
        expansions=exps,
        moments=moments,
        records=tuple(records[i] for i in sorted(records)),
    )


@dataclass(frozen=True)
class PhaseSpaceResult:
    moments: dict[int, EngineMoments]
    state: GaussianState  # joint state of the live rails, in live_rails order
    live_rails: tuple[int, ...]


class _Register:
    """Mutable workspace: optical mean/covariance plus the record bank.

    A homodyne record is statistically identical to the quadrature it read
    (plus detector vacuum), so it is carried as a classical Gaussian variable
    with its cross-covariances to the optics; feed-forward is then the exact
    linear update q -> q + g * record.
    """

    def __init__(self, circuit: Circuit):
        n = circuit.n_rails
        self.mu = np.zeros(2 * n)
        self.sigma = np.eye(2 * n)
        self.rec_mean: list[float] = []
        self.rec_cov = np.zeros((0, 0))
        self.rec_cross = np.zeros((0, 2 * n))

        rail_of = {label: i for i, label in enumerate(circuit.rails)}
        for i, label in enumerate(circuit.rails):
            spec = circuit.catalog[label]
            if spec.kind == hb.EPR:
                j = rail_of[spec.partner]
                if i < j:
                    idx = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1]
                    self.sigma[np.ix_(idx, idx)] = epr_state(spec.r).cov
            else:
                self.mu[2 * i], self.mu[2 * i + 1] = spec.mean

    def mix(self, a: int, b: int, t: float, r: float) -> None:
        idx = [2 * a, 2 * a + 1, 2 * b, 2 * b + 1]
        s2 = mixing_map(t, r).matrix
        self.mu[idx] = s2 @ self.mu[idx]
        self.sigma[idx, :] = s2 @ self.sigma[idx, :]
        self.sigma[:, idx] = self.sigma[:, idx] @ s2.T
        if self.rec_cross.size:
            self.rec_cross[:, idx] = self.rec_cross[:, idx] @ s2.T

    def distribute(self, rails: tuple[int, ...]) -> None:
        o = hb.distribution_matrix(len(rails))
        x_idx = [2 * r for r in rails]
        p_idx = [2 * r + 1 for r in rails]
        for ids in (x_idx, p_idx):
            self.mu[ids] = o @ self.mu[ids]
            self.sigma[ids, :] = o @ self.sigma[ids, :]
        for ids in (x_idx, p_idx):
            self.sigma[:, ids] = self.sigma[:, ids] @ o.T
            if self.rec_cross.size:
                self.rec_cross[:, ids] = self.rec_cross[:, ids] @ o.T

    def measure(self, element: Homodyne) -> None:
        if element.eta < 1.0:
            self.mix(
                element.rail,
                element.loss_rail,
                math.sqrt(element.eta),
                math.sqrt(1.0 - element.eta),
            )
        j = 2 * element.rail + (1 if element.quadrature == "p" else 0)
        cross_q = self.sigma[j, :].copy()
        cross_r = self.rec_cross[:, j].copy()
        k = len(self.rec_mean)
        rec_cov = np.zeros((k + 1, k + 1))
        rec_cov[:k, :k] = self.rec_cov
        rec_cov[k, :k] = cross_r
        rec_cov[:k, k] = cross_r
        rec_cov[k, k] = self.sigma[j, j]
        self.rec_cov = rec_cov
        self.rec_cross = np.vstack([self.rec_cross, cross_q])
        self.rec_mean.append(float(self.mu[j]))

    def feed_forward(self, element: FeedForward) -> None:
        i, g = element.record, element.gain
        j = 2 * element.rail + (1 if element.quadrature == "p" else 0)
        cross = self.rec_cross[i, :].copy()
        self.mu[j] += g * self.rec_mean[i]
        self.sigma[j, :] += g * cross
        self.sigma[:, j] += g * cross
        self.sigma[j, j] += g * g * self.rec_cov[i, i]
        self.rec_cross[:, j] += g * self.rec_cov[:, i]


def run_phase_space(circuit: Circuit) -> PhaseSpaceResult:
    """Evaluate a circuit by Gaussian mean/covariance propagation."""
    circuit.validate()
    reg = _Register(circuit)
    for element in circuit.elements:
        if isinstance(element, BeamSplitter):
            reg.mix(element.rail_a, element.rail_b, element.t_amp, element.r_amp)
        elif isinstance(element, Homodyne):
            reg.measure(element)
        elif isinstance(element, FeedForward):
            reg.feed_forward(element)
        elif isinstance(element, Distribute):
            reg.distribute(element.rails)

    alive = live_rails(circuit)
    moments = {
        rail: EngineMoments(
            mean_x=float(reg.mu[2 * rail]),
            mean_p=float(reg.mu[2 * rail + 1]),
            var_x=float(reg.sigma[2 * rail, 2 * rail]),
            var_p=float(reg.sigma[2 * rail + 1, 2 * rail + 1]),
            cov_xp=float(reg.sigma[2 * rail, 2 * rail + 1]),
        )
        for rail in alive
    }
    idx = [q for rail in alive for q in (2 * rail, 2 * rail + 1)]
    state = GaussianState(reg.mu[idx], reg.sigma[np.ix_(idx, idx)])
    return PhaseSpaceResult(moments=moments, state=state, live_rails=alive)
