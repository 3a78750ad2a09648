"""Fidelity formulas and the closed-form reference library.

Every machine in this package produces Gaussian outputs with
quadrature-diagonal covariance, for which the overlap with a coherent
target has a simple closed form.  The reference laws below are what the
simulation engines are checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .circuits import ClonerParams, build_standard_cloner_reference

#: the coherent-overlap fidelity formula presumes no X-P correlation
XP_DIAGONAL_TOL = 1e-10


def fidelity_general(
    mean_in: tuple[float, float],
    mean_out: tuple[float, float],
    var_x: float,
    var_p: float,
) -> float:
    """Overlap of a coherent target with a quadrature-diagonal Gaussian state."""
    if var_x <= 0.0 or var_p <= 0.0:
        raise ValueError("variances must be positive")
    dx = mean_out[0] - mean_in[0]
    dp = mean_out[1] - mean_in[1]
    ux = 1.0 + var_x
    up = 1.0 + var_p
    return 2.0 / math.sqrt(ux * up) * math.exp(-dx * dx / (2.0 * ux) - dp * dp / (2.0 * up))


def fidelity_unity_gain(var_x: float, var_p: float) -> float:
    """Fidelity at unity gain (output mean equals the target mean)."""
    if var_x <= 0.0 or var_p <= 0.0:
        raise ValueError("variances must be positive")
    return 2.0 / math.sqrt((1.0 + var_x) * (1.0 + var_p))


def _check(n: int, m: int, eta: float) -> None:
    if not isinstance(n, int) or n < 1:
        raise ValueError("n must be a positive integer")
    if not isinstance(m, int) or m < 1:
        raise ValueError("m must be a positive integer")
    if not 0.0 < eta <= 1.0:
        raise ValueError("eta must be in (0, 1]")


def ref_clone_variance(n: int, m: int, eta: float = 1.0) -> float:
    """Clone quadrature variance 1 + (m-n)^2 / (2 m^2 n eta).

    Detector loss scales only the excess noise; at n = m the clones are
    exact and the variance stays at shot noise for any eta.
    """
    _check(n, m, eta)
    d = m - n
    return 1.0 + d * d / (2.0 * m * m * n * eta)


def ref_clone_fidelity(n: int, m: int, eta: float = 1.0) -> float:
    """Clone fidelity 4 eta m^2 n / (4 eta m^2 n + (m-n)^2)."""
    _check(n, m, eta)
    d = m - n
    return 4.0 * eta * m * m * n / (4.0 * eta * m * m * n + d * d)


def ref_anticlone_variance(n: int, m: int, r: float, eta: float = 1.0) -> float:
    """Anticlone variance: clone law plus the ancilla term 2 e^{-2r} / m.

    For eta < 1 the record noise also reaches the ancilla arm, adding
    (1-eta) (m+n)^2 / (2 eta m^2 n); the term vanishes at eta = 1.
    """
    _check(n, m, eta)
    if r < 0:
        raise ValueError("r must be >= 0")
    d = m - n
    s = m + n
    return (
        1.0
        + d * d / (2.0 * m * m * n)
        + 2.0 * math.exp(-2.0 * r) / m
        + (1.0 - eta) * s * s / (2.0 * eta * m * m * n)
    )


def ref_anticlone_fidelity(n: int, m: int, r: float, eta: float = 1.0) -> float:
    """Anticlone fidelity 4 m^2 n / (4 m^2 n + (m-n)^2 + 4 m n e^{-2r} [+ loss]).

    Approaches the clone law as r grows: a maximally entangled ancilla is
    what optimal anticlones require.
    """
    _check(n, m, eta)
    if r < 0:
        raise ValueError("r must be >= 0")
    d = m - n
    s = m + n
    return 4.0 * m * m * n / (
        4.0 * m * m * n
        + d * d
        + 4.0 * m * n * math.exp(-2.0 * r)
        + (1.0 - eta) * s * s / eta
    )


@dataclass(frozen=True)
class PciComparison:
    f_pci: float
    f_std: float
    advantage: bool


def compare_pci_vs_standard(n: int, m: int) -> PciComparison:
    """Conjugate-pair cloner versus the standard 2n -> m cloner (eta = 1).

    The fair baseline consumes the same 2n input states, so it requires
    m >= 2n.
    """
    _check(n, m, 1.0)
    if m < 2 * n:
        raise ValueError("comparison requires m >= 2n")
    f_pci = ref_clone_fidelity(n, m)
    f_std = build_standard_cloner_reference(2 * n, m)
    return PciComparison(f_pci=f_pci, f_std=f_std, advantage=f_pci > f_std)


@dataclass(frozen=True)
class CloneReport:
    """Per-output summary with its closed-form reference and deviations."""

    role: str  # "clone" | "anticlone"
    mean_x: float
    mean_p: float
    var_x: float
    var_p: float
    fidelity: float
    ref_variance: float
    ref_fidelity: float
    dev_var_x: float
    dev_var_p: float
    dev_fidelity: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.fidelity <= 1.0:
            raise ValueError("fidelity must lie in [0, 1]")


def output_target(role: str, params: ClonerParams) -> tuple[float, float]:
    """Target mean for fidelity: the input for clones, its conjugate for
    anticlones."""
    x_in, p_in = params.alpha
    if role == "clone":
        return (x_in, p_in)
    if role == "anticlone":
        return (x_in, -p_in)
    raise ValueError(f"unknown output role {role!r}")


def output_reference(role: str, params: ClonerParams) -> tuple[float, float]:
    """Closed-form (variance, fidelity) reference for one output role."""
    if role == "clone":
        return (
            ref_clone_variance(params.n, params.m, params.eta),
            ref_clone_fidelity(params.n, params.m, params.eta),
        )
    if role == "anticlone":
        if params.epr_r is None:
            raise ValueError("anticlone reference requires epr_r")
        return (
            ref_anticlone_variance(params.n, params.m, params.epr_r, params.eta),
            ref_anticlone_fidelity(params.n, params.m, params.epr_r, params.eta),
        )
    raise ValueError(f"unknown output role {role!r}")


def clone_report(
    role: str,
    mean_x: float,
    mean_p: float,
    var_x: float,
    var_p: float,
    cov_xp: float,
    params: ClonerParams,
) -> CloneReport:
    """Assemble the report for one output against its closed-form reference."""
    if abs(cov_xp) > XP_DIAGONAL_TOL:
        raise ValueError("output state is not quadrature-diagonal")
    target = output_target(role, params)
    ref_variance, ref_fidelity = output_reference(role, params)
    fidelity = fidelity_general(target, (mean_x, mean_p), var_x, var_p)
    return CloneReport(
        role=role,
        mean_x=mean_x,
        mean_p=mean_p,
        var_x=var_x,
        var_p=var_p,
        fidelity=fidelity,
        ref_variance=ref_variance,
        ref_fidelity=ref_fidelity,
        dev_var_x=abs(var_x - ref_variance),
        dev_var_p=abs(var_p - ref_variance),
        dev_fidelity=abs(fidelity - ref_fidelity),
    )
