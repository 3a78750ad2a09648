"""Seeded phase-space Monte Carlo oracle.

Every input mode is sampled from its Wigner distribution and pushed through
the circuit as classical quadrature amplitudes; homodyne reads the sampled
value, feed-forward adds it with the gain.  All states, elements, and
measurements here are Gaussian with positive Wigner functions, so this
sampling is distribution-exact: empirical moments converge to the true
quantum moments at the 1/sqrt(shots) rate, making the engine an independent
oracle rather than an approximation scheme.

Randomness comes from numpy's Philox generator (a named, counter-based
algorithm), seeded per run; identical seed and config give bit-identical
estimates.  Shots are drawn serially in a fixed rail order, which makes the
deterministic shot-partition contract trivial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import heisenberg as hb
from .circuits import BeamSplitter, Circuit, Distribute, FeedForward, Homodyne
from .cloning import fidelity_general
from .gaussian import epr_state

DEFAULT_SHOTS = 100_000


@dataclass(frozen=True)
class McConfig:
    """Run configuration: shot count, 64-bit seed, confidence multiplier."""

    shots: int = DEFAULT_SHOTS
    seed: int = 12345
    confidence: float = 3.0

    def __post_init__(self) -> None:
        if not isinstance(self.shots, int) or self.shots < 100:
            raise ValueError("shots must be an integer >= 100")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.confidence <= 0:
            raise ValueError("confidence multiplier must be positive")


@dataclass(frozen=True)
class McOutput:
    """Empirical moments of one output rail with standard errors."""

    mean_x: float
    mean_p: float
    var_x: float
    var_p: float
    se_mean_x: float
    se_mean_p: float
    se_var_x: float
    se_var_p: float

    def __post_init__(self) -> None:
        if self.var_x <= 0 or self.var_p <= 0:
            raise ValueError("variance estimates must be positive")
        if min(self.se_mean_x, self.se_mean_p, self.se_var_x, self.se_var_p) <= 0:
            raise ValueError("standard errors must be positive")


@dataclass(frozen=True)
class McEstimate:
    outputs: dict[int, McOutput]  # keyed by output rail
    shots: int
    seed: int
    confidence: float


def _sample_inputs(
    circuit: Circuit, shots: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Draw Wigner samples for every rail; rows are rails, columns shots."""
    n = circuit.n_rails
    xs = np.empty((n, shots))
    ps = np.empty((n, shots))
    rail_of = {label: i for i, label in enumerate(circuit.rails)}
    for i, label in enumerate(circuit.rails):
        spec = circuit.catalog[label]
        if spec.kind == hb.EPR:
            j = rail_of[spec.partner]
            if i > j:
                continue  # drawn together with the partner arm
            chol = np.linalg.cholesky(epr_state(spec.r).cov)
            z = chol @ rng.standard_normal((4, shots))
            xs[i], ps[i], xs[j], ps[j] = z[0], z[1], z[2], z[3]
        else:
            mean_x, mean_p = spec.mean
            xs[i] = mean_x + rng.standard_normal(shots)
            ps[i] = mean_p + rng.standard_normal(shots)
    return xs, ps


def run_monte_carlo(circuit: Circuit, config: McConfig = McConfig()) -> McEstimate:
    """Propagate Wigner samples through the circuit and return shot statistics.

    Deterministic for a given seed and config.  Statistics are computed for
    the circuit's designated outputs (clones and anticlones).
    """
    circuit.validate()
    rng = np.random.Generator(np.random.Philox(config.seed))
    xs, ps = _sample_inputs(circuit, config.shots, rng)
    records: dict[int, np.ndarray] = {}

    for element in circuit.elements:
        if isinstance(element, BeamSplitter):
            a, b, t, r = element.rail_a, element.rail_b, element.t_amp, element.r_amp
            for rows in (xs, ps):
                out_a = t * rows[a] + r * rows[b]
                out_b = -r * rows[a] + t * rows[b]
                rows[a], rows[b] = out_a, out_b
        elif isinstance(element, Homodyne):
            rows = xs if element.quadrature == "x" else ps
            value = rows[element.rail].copy()
            if element.eta < 1.0:
                value = math.sqrt(element.eta) * value + math.sqrt(
                    1.0 - element.eta
                ) * rows[element.loss_rail]
            records[element.record] = value
        elif isinstance(element, FeedForward):
            rows = xs if element.quadrature == "x" else ps
            rows[element.rail] += element.gain * records[element.record]
        elif isinstance(element, Distribute):
            o = hb.distribution_matrix(len(element.rails))
            idx = list(element.rails)
            for rows in (xs, ps):
                rows[idx, :] = o @ rows[idx, :]

    shots = config.shots
    outputs = {}
    for rail in circuit.clones + circuit.anticlones:
        var_x = float(np.var(xs[rail], ddof=1))
        var_p = float(np.var(ps[rail], ddof=1))
        outputs[rail] = McOutput(
            mean_x=float(np.mean(xs[rail])),
            mean_p=float(np.mean(ps[rail])),
            var_x=var_x,
            var_p=var_p,
            se_mean_x=math.sqrt(var_x / shots),
            se_mean_p=math.sqrt(var_p / shots),
            se_var_x=var_x * math.sqrt(2.0 / (shots - 1)),
            se_var_p=var_p * math.sqrt(2.0 / (shots - 1)),
        )
    return McEstimate(
        outputs=outputs, shots=shots, seed=config.seed, confidence=config.confidence
    )


def estimate_fidelity_ci(
    output: McOutput,
    target_mean: tuple[float, float],
    confidence: float = 3.0,
) -> tuple[float, float, float]:
    """Plug-in fidelity with a delta-method confidence interval.

    Propagates the standard errors of the four empirical moments through the
    overlap formula; the interval is clipped to [0, 1].
    """
    f = fidelity_general(
        target_mean, (output.mean_x, output.mean_p), output.var_x, output.var_p
    )
    ux = 1.0 + output.var_x
    up = 1.0 + output.var_p
    dx = output.mean_x - target_mean[0]
    dp = output.mean_p - target_mean[1]
    grad_var_x = f * (-0.5 / ux + dx * dx / (2.0 * ux * ux))
    grad_var_p = f * (-0.5 / up + dp * dp / (2.0 * up * up))
    grad_mean_x = f * (-dx / ux)
    grad_mean_p = f * (-dp / up)
    se = math.sqrt(
        (grad_var_x * output.se_var_x) ** 2
        + (grad_var_p * output.se_var_p) ** 2
        + (grad_mean_x * output.se_mean_x) ** 2
        + (grad_mean_p * output.se_mean_p) ** 2
    )
    half = confidence * se
    return f, max(0.0, f - half), min(1.0, f + half)
