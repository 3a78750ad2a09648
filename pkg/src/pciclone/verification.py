"""Built-in acceptance sweep.

Each check covers one verification criterion: closed-form reproduction of
the clone and anticlone laws, detector-loss degradation, exact vacuum
cancellation, asymptotic limits, the advantage threshold of the
conjugate-pair machine over the standard cloner, cross-engine agreement,
and the structural invariants of every built circuit.  ``run_all_checks``
returns one named pass/fail result per criterion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import heisenberg as hb
from .circuits import (
    BeamSplitter,
    ClonerParams,
    Distribute,
    build_pci_cloner,
    build_reversible_cloner,
    build_standard_cloner_reference,
    reflect_amplitude,
)
from .cloning import (
    compare_pci_vs_standard,
    fidelity_general,
    output_target,
    ref_anticlone_fidelity,
    ref_anticlone_variance,
    ref_clone_fidelity,
    ref_clone_variance,
)
from .engines import run_heisenberg, run_phase_space
from .gaussian import mixing_map, symplectic_form
from .montecarlo import McConfig, estimate_fidelity_ci, run_monte_carlo

ANALYTIC_TOL = 1e-10
DEFAULT_MC_SHOTS = 100_000
DEFAULT_SEED = 42
#: shared nonzero input amplitude so means are exercised everywhere
ALPHA = (2.0, 1.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@lru_cache(maxsize=None)
def _evaluate(params: ClonerParams):
    circuit = (
        build_reversible_cloner(params) if params.reversible else build_pci_cloner(params)
    )
    return circuit, run_heisenberg(circuit), run_phase_space(circuit)


def _grid_single_pair() -> list[ClonerParams]:
    return [ClonerParams(1, m, alpha=ALPHA) for m in range(2, 11)]


def _grid_replica_pairs() -> list[ClonerParams]:
    return [
        ClonerParams(n, m, alpha=ALPHA)
        for n in range(1, 5)
        for m in range(n, 17)
    ]


def _grid_detector_loss() -> list[ClonerParams]:
    return [
        ClonerParams(1, m, eta=eta, alpha=ALPHA)
        for eta in (0.5, 0.8)
        for m in range(2, 9)
    ]


def _grid_anticlone() -> list[ClonerParams]:
    return [
        ClonerParams(1, m, epr_r=r, alpha=ALPHA)
        for m in range(2, 9)
        for r in (0.0, 0.5, 1.0, 2.0, 4.0)
    ]


def full_grid() -> list[ClonerParams]:
    """Every machine exercised by the sweep checks."""
    return (
        _grid_single_pair()
        + _grid_replica_pairs()
        + _grid_detector_loss()
        + _grid_anticlone()
    )


def mc_grid() -> list[ClonerParams]:
    """Representative subset for the Monte Carlo cross-check: every machine
    variant (single pair, replica pairs, lossy detection, reversible)."""
    return _grid_single_pair() + [
        ClonerParams(1, 4, eta=0.5, alpha=ALPHA),
        ClonerParams(1, 6, eta=0.8, alpha=ALPHA),
        ClonerParams(2, 3, alpha=ALPHA),
        ClonerParams(3, 8, alpha=ALPHA),
        ClonerParams(4, 16, alpha=ALPHA),
        ClonerParams(1, 2, epr_r=0.0, alpha=ALPHA),
        ClonerParams(1, 5, epr_r=1.0, alpha=ALPHA),
        ClonerParams(2, 4, epr_r=0.5, alpha=ALPHA),
    ]


def _analytic_law_check(
    name: str,
    grid: list[ClonerParams],
    role: str,
    tol: float,
    perturb_variance: float,
) -> tuple[float, int]:
    """Max deviation of both engines' variances and fidelities from the
    closed forms, over all outputs of all machines in the grid."""
    max_dev = 0.0
    count = 0
    for params in grid:
        circuit, hres, pres = _evaluate(params)
        if role == "clone":
            ref_v = ref_clone_variance(params.n, params.m, params.eta)
            ref_f = ref_clone_fidelity(params.n, params.m, params.eta)
            rails = circuit.clones
        else:
            ref_v = ref_anticlone_variance(params.n, params.m, params.epr_r, params.eta)
            ref_f = ref_anticlone_fidelity(params.n, params.m, params.epr_r, params.eta)
            rails = circuit.anticlones
        target = output_target(role, params)
        for rail in rails:
            count += 1
            for mom in (hres.moments[rail], pres.moments[rail]):
                fid = fidelity_general(
                    target, (mom.mean_x, mom.mean_p), mom.var_x, mom.var_p
                )
                max_dev = max(
                    max_dev,
                    abs(mom.var_x + perturb_variance - ref_v),
                    abs(mom.var_p + perturb_variance - ref_v),
                    abs(fid - ref_f),
                )
    return max_dev, count


def _mc_against_reference(
    params: ClonerParams,
    role: str,
    ref_v: float,
    ref_f: float,
    config: McConfig,
) -> tuple[float, bool]:
    """Worst |z| of the empirical moments against the closed forms, plus
    whether the fidelity interval brackets the reference."""
    circuit, _, _ = _evaluate(params)
    est = run_monte_carlo(circuit, config)
    rails = circuit.clones if role == "clone" else circuit.anticlones
    target = output_target(role, params)
    max_z = 0.0
    ci_ok = True
    for rail in rails:
        out = est.outputs[rail]
        for value, ref, se in (
            (out.var_x, ref_v, out.se_var_x),
            (out.var_p, ref_v, out.se_var_p),
            (out.mean_x, target[0], out.se_mean_x),
            (out.mean_p, target[1], out.se_mean_p),
        ):
            max_z = max(max_z, abs(value - ref) / se)
        _, lo, hi = estimate_fidelity_ci(out, target, config.confidence)
        if not lo <= ref_f <= hi:
            ci_ok = False
    return max_z, ci_ok


def check_clone_law_single_pair(
    mc_shots: int = DEFAULT_MC_SHOTS,
    seed: int = DEFAULT_SEED,
    tol: float = ANALYTIC_TOL,
    confidence: float = 3.0,
    perturb_variance: float = 0.0,
) -> CheckResult:
    """Single-pair clone law for m = 2..10 at ideal detection, both analytic
    engines plus the Monte Carlo oracle."""
    grid = _grid_single_pair()
    max_dev, count = _analytic_law_check(
        "clone-law-single-pair", grid, "clone", tol, perturb_variance
    )
    config = McConfig(shots=mc_shots, seed=seed, confidence=confidence)
    max_z = 0.0
    ci_ok = True
    for params in grid:
        z, ok = _mc_against_reference(
            params,
            "clone",
            ref_clone_variance(params.n, params.m),
            ref_clone_fidelity(params.n, params.m),
            config,
        )
        max_z = max(max_z, z)
        ci_ok = ci_ok and ok
    passed = max_dev <= tol and max_z <= confidence and ci_ok
    return CheckResult(
        "clone-law-single-pair",
        passed,
        f"max analytic dev {max_dev:.2e} (tol {tol:g}), "
        f"max |z| {max_z:.2f} over {count} clones at {mc_shots} shots",
    )


def check_clone_law_replica_pairs(
    tol: float = ANALYTIC_TOL, perturb_variance: float = 0.0
) -> CheckResult:
    """Clone law for n = 1..4 replica pairs, m = n..16."""
    max_dev, count = _analytic_law_check(
        "clone-law-replica-pairs", _grid_replica_pairs(), "clone", tol, perturb_variance
    )
    return CheckResult(
        "clone-law-replica-pairs",
        max_dev <= tol,
        f"max analytic dev {max_dev:.2e} (tol {tol:g}) over {count} clones",
    )


def check_detector_loss_law(
    tol: float = ANALYTIC_TOL, perturb_variance: float = 0.0
) -> CheckResult:
    """Detector-loss law: variance 1 + (m-1)^2/(2 m^2 eta), matching fidelity."""
    max_dev, count = _analytic_law_check(
        "detector-loss-law", _grid_detector_loss(), "clone", tol, perturb_variance
    )
    return CheckResult(
        "detector-loss-law",
        max_dev <= tol,
        f"max analytic dev {max_dev:.2e} (tol {tol:g}) over {count} clones",
    )


def check_vacuum_cancellation() -> CheckResult:
    """The tap-port mode's coefficients vanish identically from every clone."""
    worst = 0.0
    circuits = 0
    for params in full_grid():
        circuit, hres, _ = _evaluate(params)
        circuits += 1
        aux = circuit.aux_label
        for rail in circuit.clones:
            expansion = hres.expansions[rail]
            for coeff in (
                expansion.x.coefficient(aux, "x"),
                expansion.x.coefficient(aux, "p"),
                expansion.p.coefficient(aux, "x"),
                expansion.p.coefficient(aux, "p"),
            ):
                worst = max(worst, abs(coeff))
    return CheckResult(
        "vacuum-cancellation",
        worst == 0.0,
        f"max |tap-port coefficient| = {worst!r} over {circuits} circuits",
    )


def check_asymptotic_limits() -> CheckResult:
    """Closed-form limits at m = 10^5: 4/5 for one pair, 4n/(4n+1) and the
    standard baseline 2n/(2n+1) for n = 1..4."""
    m = 100_000
    devs = [abs(ref_clone_fidelity(1, m) - 0.8)]
    for n in range(1, 5):
        devs.append(abs(ref_clone_fidelity(n, m) - 4 * n / (4 * n + 1)))
        devs.append(
            abs(build_standard_cloner_reference(2 * n, m) - 2 * n / (2 * n + 1))
        )
    worst = max(devs)
    return CheckResult(
        "asymptotic-limits", worst < 1e-4, f"max |F - limit| = {worst:.2e} (tol 1e-4)"
    )


def check_advantage_threshold() -> CheckResult:
    """No advantage at m = 2 (standard cloning is perfect there); strict
    advantage for every m in 3..64."""
    at_two = compare_pci_vs_standard(1, 2)
    ok = (
        not at_two.advantage
        and abs(at_two.f_pci - 16.0 / 17.0) < 1e-12
        and abs(at_two.f_std - 1.0) < 1e-12
    )
    failures = [m for m in range(3, 65) if not compare_pci_vs_standard(1, m).advantage]
    ok = ok and not failures
    return CheckResult(
        "advantage-threshold",
        ok,
        f"m=2: f_pci={at_two.f_pci:.6f}, f_std={at_two.f_std:.6f}, "
        f"advantage={at_two.advantage}; failures in 3..64: {failures}",
    )


def check_anticlone_law(
    tol: float = ANALYTIC_TOL, perturb_variance: float = 0.0
) -> CheckResult:
    """Anticlone law for r in {0, 0.5, 1, 2, 4}; near-clone fidelity at r = 8;
    clone moments invariant to the ancilla squeezing."""
    max_dev, count = _analytic_law_check(
        "anticlone-law", _grid_anticlone(), "anticlone", tol, perturb_variance
    )
    gap = max(
        abs(ref_anticlone_fidelity(1, m, 8.0) - ref_clone_fidelity(1, m))
        for m in range(2, 9)
    )
    max_drift = 0.0
    for m in range(2, 9):
        base = _evaluate(ClonerParams(1, m, epr_r=0.0, alpha=ALPHA))
        for r in (0.5, 1.0, 2.0, 4.0):
            other = _evaluate(ClonerParams(1, m, epr_r=r, alpha=ALPHA))
            for rail in base[0].clones:
                for pick in (1, 2):  # heisenberg and phase-space results
                    a = base[pick].moments[rail]
                    b = other[pick].moments[rail]
                    max_drift = max(max_drift, a.deviation(b))
    passed = max_dev <= tol and gap < 1e-6 and max_drift <= 1e-12
    return CheckResult(
        "anticlone-law",
        passed,
        f"max analytic dev {max_dev:.2e} over {count} anticlones; "
        f"r=8 gap {gap:.2e} (tol 1e-6); clone drift with r {max_drift:.2e} (tol 1e-12)",
    )


def check_cross_engine_agreement(
    mc_shots: int = DEFAULT_MC_SHOTS,
    seed: int = DEFAULT_SEED,
    tol: float = ANALYTIC_TOL,
    confidence: float = 3.0,
) -> CheckResult:
    """Heisenberg vs phase-space moments across the whole sweep; Monte Carlo
    against the analytic moments on the representative subset."""
    max_dev = 0.0
    outputs = 0
    for params in full_grid():
        circuit, hres, pres = _evaluate(params)
        for rail in circuit.clones + circuit.anticlones:
            outputs += 1
            a, b = hres.moments[rail], pres.moments[rail]
            max_dev = max(max_dev, a.deviation(b), abs(a.cov_xp - b.cov_xp))
    config = McConfig(shots=mc_shots, seed=seed, confidence=confidence)
    max_z = 0.0
    for params in mc_grid():
        circuit, _, pres = _evaluate(params)
        est = run_monte_carlo(circuit, config)
        for rail, out in est.outputs.items():
            mom = pres.moments[rail]
            for value, ref, se in (
                (out.var_x, mom.var_x, out.se_var_x),
                (out.var_p, mom.var_p, out.se_var_p),
                (out.mean_x, mom.mean_x, out.se_mean_x),
                (out.mean_p, mom.mean_p, out.se_mean_p),
            ):
                max_z = max(max_z, abs(value - ref) / se)
    passed = max_dev <= tol and max_z <= confidence
    return CheckResult(
        "cross-engine-agreement",
        passed,
        f"max engine dev {max_dev:.2e} (tol {tol:g}) over {outputs} outputs; "
        f"max Monte Carlo |z| {max_z:.2f} over {len(mc_grid())} machines",
    )


def check_structural_invariants() -> CheckResult:
    """Symplectic form and distribution-matrix orthogonality, canonical
    commutators, and the uncertainty principle, on every built circuit."""
    max_symplectic = 0.0
    max_ortho = 0.0
    max_commutator = 0.0
    uncertainty_ok = True
    for params in full_grid():
        circuit, hres, pres = _evaluate(params)
        for element in circuit.elements:
            if isinstance(element, BeamSplitter):
                smap = mixing_map(element.t_amp, element.r_amp)
                omega = symplectic_form(2)
                max_symplectic = max(
                    max_symplectic,
                    float(
                        np.max(np.abs(smap.matrix @ omega @ smap.matrix.T - omega))
                    ),
                )
            elif isinstance(element, Distribute):
                o = hb.distribution_matrix(len(element.rails))
                max_ortho = max(
                    max_ortho,
                    float(np.max(np.abs(o @ o.T - np.eye(len(element.rails))))),
                    float(np.max(np.abs(o[:, 0] - math.sqrt(1.0 / len(element.rails))))),
                )
        for expansion in hres.expansions.values():
            max_commutator = max(
                max_commutator, abs(hb.commutator_form(expansion) - 1.0)
            )
        try:
            pres.state.validate()
        except ValueError:
            uncertainty_ok = False
    passed = (
        max_symplectic <= 1e-12
        and max_ortho <= 1e-12
        and max_commutator <= 1e-12
        and uncertainty_ok
    )
    return CheckResult(
        "structural-invariants",
        passed,
        f"symplectic dev {max_symplectic:.2e}, orthogonality dev {max_ortho:.2e}, "
        f"commutator dev {max_commutator:.2e}, uncertainty ok: {uncertainty_ok}",
    )


def run_all_checks(
    mc_shots: int = DEFAULT_MC_SHOTS,
    seed: int = DEFAULT_SEED,
    tol: float = ANALYTIC_TOL,
    confidence: float = 3.0,
    perturb_variance: float = 0.0,
) -> list[CheckResult]:
    """Run the full acceptance sweep; one result per criterion, in order."""
    return [
        check_clone_law_single_pair(mc_shots, seed, tol, confidence, perturb_variance),
        check_clone_law_replica_pairs(tol, perturb_variance),
        check_detector_loss_law(tol, perturb_variance),
        check_vacuum_cancellation(),
        check_asymptotic_limits(),
        check_advantage_threshold(),
        check_anticlone_law(tol, perturb_variance),
        check_cross_engine_agreement(mc_shots, seed, tol, confidence),
        check_structural_invariants(),
    ]
