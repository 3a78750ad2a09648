"""Command-line runner.

Subcommands:
  simulate  evaluate one scenario file with all three engines, emit a report
  sweep     tabulate the closed-form fidelities over parameter ranges
  verify    run the built-in acceptance sweep

Exit codes: 0 all checks pass, 1 a tolerance check failed, 2 parse error,
3 validation error.  The environment variable PCICLONE_JOBS caps sweep
parallelism.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .circuits import (
    ClonerParams,
    build_pci_cloner,
    build_reversible_cloner,
    build_standard_cloner_reference,
)
from .cloning import (
    clone_report,
    fidelity_general,
    output_reference,
    output_target,
    ref_anticlone_fidelity,
    ref_anticlone_variance,
    ref_clone_fidelity,
    ref_clone_variance,
)
from .engines import EngineMoments, run_heisenberg, run_phase_space
from .montecarlo import DEFAULT_SHOTS, McConfig, estimate_fidelity_ci, run_monte_carlo
from .verification import ANALYTIC_TOL, DEFAULT_SEED, run_all_checks

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PARSE_ERROR = 2
EXIT_VALIDATION_ERROR = 3

JOBS_ENV = "PCICLONE_JOBS"

MACHINES = ("pci", "reversible", "reference-only")
FORMATS = ("json", "csv")


class ScenarioParseError(ValueError):
    """Malformed scenario file: wrong structure or types."""


class ScenarioValidationError(ValueError):
    """Well-formed scenario with out-of-range or inconsistent values."""


@dataclass(frozen=True)
class Scenario:
    machine: str
    n: int
    m: int
    eta: float = 1.0
    epr_r: float | None = None
    alpha: tuple[float, float] = (0.0, 0.0)
    mc: McConfig | None = None
    output_format: str = "json"

    @property
    def params(self) -> ClonerParams:
        return ClonerParams(
            n=self.n,
            m=self.m,
            eta=self.eta,
            epr_r=self.epr_r if self.machine == "reversible" else None,
            alpha=self.alpha,
        )


def _require(data: dict, key: str):
    if key not in data:
        raise ScenarioParseError(f"{key}: required field is missing")
    return data[key]


def _as_int(value, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioParseError(f"{field}: expected an integer, got {value!r}")
    return value


def _as_number(value, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioParseError(f"{field}: expected a number, got {value!r}")
    return float(value)


def scenario_from_dict(data) -> Scenario:
    """Build a Scenario from parsed JSON, naming any offending field."""
    if not isinstance(data, dict):
        raise ScenarioParseError("scenario: top level must be an object")
    known = {"machine", "N", "M", "eta", "epr_r", "alpha", "mc", "outputs"}
    for key in data:
        if key not in known:
            raise ScenarioParseError(f"{key}: unknown field")

    machine = _require(data, "machine")
    if not isinstance(machine, str):
        raise ScenarioParseError(f"machine: expected a string, got {machine!r}")
    if machine not in MACHINES:
        raise ScenarioValidationError(f"machine: must be one of {', '.join(MACHINES)}")

    n = _as_int(_require(data, "N"), "N")
    m = _as_int(_require(data, "M"), "M")
    if n < 1:
        raise ScenarioValidationError("N: must be >= 1")
    if m < 1:
        raise ScenarioValidationError("M: must be >= 1")

    eta = _as_number(data.get("eta", 1.0), "eta")
    if not 0.0 < eta <= 1.0:
        raise ScenarioValidationError("eta: must be in (0, 1]")

    epr_r = data.get("epr_r")
    if epr_r is not None:
        epr_r = _as_number(epr_r, "epr_r")
        if epr_r < 0:
            raise ScenarioValidationError("epr_r: must be >= 0")
    if machine == "reversible" and epr_r is None:
        raise ScenarioValidationError("epr_r: required for the reversible machine")
    if machine == "pci" and epr_r is not None:
        raise ScenarioValidationError("epr_r: must be null for the pci machine")

    alpha_obj = data.get("alpha", {"x": 0.0, "p": 0.0})
    if not isinstance(alpha_obj, dict) or set(alpha_obj) - {"x", "p"}:
        raise ScenarioParseError("alpha: expected an object with keys x and p")
    alpha = (
        _as_number(alpha_obj.get("x", 0.0), "alpha.x"),
        _as_number(alpha_obj.get("p", 0.0), "alpha.p"),
    )

    mc_obj = data.get("mc")
    mc = None
    if mc_obj is not None:
        if not isinstance(mc_obj, dict) or set(mc_obj) - {"shots", "seed"}:
            raise ScenarioParseError("mc: expected an object with keys shots and seed")
        shots = _as_int(mc_obj.get("shots", DEFAULT_SHOTS), "mc.shots")
        seed = _as_int(mc_obj.get("seed", 12345), "mc.seed")
        try:
            mc = McConfig(shots=shots, seed=seed)
        except ValueError as exc:
            raise ScenarioValidationError(f"mc: {exc}") from None

    outputs = data.get("outputs", {"format": "json"})
    if not isinstance(outputs, dict) or set(outputs) - {"format"}:
        raise ScenarioParseError("outputs: expected an object with key format")
    output_format = outputs.get("format", "json")
    if output_format not in FORMATS:
        raise ScenarioValidationError(f"outputs.format: must be one of {', '.join(FORMATS)}")

    return Scenario(
        machine=machine,
        n=n,
        m=m,
        eta=eta,
        epr_r=epr_r,
        alpha=alpha,
        mc=mc,
        output_format=output_format,
    )


def scenario_to_dict(scenario: Scenario) -> dict:
    """Canonical serialization; round-trips through scenario_from_dict."""
    return {
        "machine": scenario.machine,
        "N": scenario.n,
        "M": scenario.m,
        "eta": scenario.eta,
        "epr_r": scenario.epr_r,
        "alpha": {"x": scenario.alpha[0], "p": scenario.alpha[1]},
        "mc": (
            {"shots": scenario.mc.shots, "seed": scenario.mc.seed}
            if scenario.mc is not None
            else None
        ),
        "outputs": {"format": scenario.output_format},
    }


def load_scenario(path: str) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioParseError(f"scenario: invalid JSON ({exc})") from None
    return scenario_from_dict(data)


def _reference_block(scenario: Scenario) -> dict:
    params = scenario.params
    block = {
        "clone_variance": ref_clone_variance(params.n, params.m, params.eta),
        "clone_fidelity": ref_clone_fidelity(params.n, params.m, params.eta),
    }
    if scenario.epr_r is not None:
        block["anticlone_variance"] = ref_anticlone_variance(
            params.n, params.m, scenario.epr_r, params.eta
        )
        block["anticlone_fidelity"] = ref_anticlone_fidelity(
            params.n, params.m, scenario.epr_r, params.eta
        )
    if params.m >= 2 * params.n:
        f_std = build_standard_cloner_reference(2 * params.n, params.m)
        block["standard_fidelity"] = f_std
        block["advantage"] = block["clone_fidelity"] > f_std
    else:
        block["standard_fidelity"] = None
        block["advantage"] = None
    return block


def _moments_dict(mom: EngineMoments, target: tuple[float, float]) -> dict:
    return {
        "mean_x": mom.mean_x,
        "mean_p": mom.mean_p,
        "var_x": mom.var_x,
        "var_p": mom.var_p,
        "fidelity": fidelity_general(
            target, (mom.mean_x, mom.mean_p), mom.var_x, mom.var_p
        ),
    }


def simulate_scenario(scenario: Scenario) -> tuple[dict, bool]:
    """Evaluate a scenario with every engine and cross-check the results.

    Returns the report dictionary and whether all checks passed.
    """
    report: dict = {"scenario": scenario_to_dict(scenario)}
    report["reference"] = _reference_block(scenario)
    if scenario.machine == "reference-only":
        report["outputs"] = []
        report["checks"] = {"tolerance": ANALYTIC_TOL, "passed": True, "failures": []}
        return report, True

    params = scenario.params
    circuit = (
        build_reversible_cloner(params)
        if scenario.machine == "reversible"
        else build_pci_cloner(params)
    )
    hres = run_heisenberg(circuit)
    pres = run_phase_space(circuit)
    estimate = run_monte_carlo(circuit, scenario.mc) if scenario.mc else None

    failures: list[str] = []
    outputs: list[dict] = []
    roles = [("clone", circuit.clones)]
    if circuit.anticlones:
        roles.append(("anticlone", circuit.anticlones))
    for role, rails in roles:
        target = output_target(role, params)
        for index, rail in enumerate(rails):
            h = hres.moments[rail]
            p = pres.moments[rail]
            name = f"{role}[{index}]"
            engine_dev = max(h.deviation(p), abs(h.cov_xp - p.cov_xp))
            if engine_dev > ANALYTIC_TOL:
                failures.append(f"{name}: engine disagreement {engine_dev:.3e}")
            rep = clone_report(role, h.mean_x, h.mean_p, h.var_x, h.var_p, h.cov_xp, params)
            ref_dev = max(rep.dev_var_x, rep.dev_var_p, rep.dev_fidelity)
            if ref_dev > ANALYTIC_TOL:
                failures.append(f"{name}: closed-form deviation {ref_dev:.3e}")
            entry = {
                "rail": rail,
                "role": role,
                "index": index,
                "heisenberg": _moments_dict(h, target),
                "phase_space": _moments_dict(p, target),
                "reference": {"variance": rep.ref_variance, "fidelity": rep.ref_fidelity},
                "deviations": {
                    "engines": engine_dev,
                    "var_x": rep.dev_var_x,
                    "var_p": rep.dev_var_p,
                    "fidelity": rep.dev_fidelity,
                },
            }
            if estimate is not None:
                out = estimate.outputs[rail]
                max_z = max(
                    abs(out.var_x - h.var_x) / out.se_var_x,
                    abs(out.var_p - h.var_p) / out.se_var_p,
                    abs(out.mean_x - h.mean_x) / out.se_mean_x,
                    abs(out.mean_p - h.mean_p) / out.se_mean_p,
                )
                fid, lo, hi = estimate_fidelity_ci(out, target, estimate.confidence)
                if max_z > estimate.confidence:
                    failures.append(f"{name}: Monte Carlo |z| = {max_z:.2f}")
                entry["monte_carlo"] = {
                    "shots": estimate.shots,
                    "seed": estimate.seed,
                    "mean_x": out.mean_x,
                    "mean_p": out.mean_p,
                    "var_x": out.var_x,
                    "var_p": out.var_p,
                    "se_mean_x": out.se_mean_x,
                    "se_mean_p": out.se_mean_p,
                    "se_var_x": out.se_var_x,
                    "se_var_p": out.se_var_p,
                    "fidelity": fid,
                    "fidelity_low": lo,
                    "fidelity_high": hi,
                    "max_z": max_z,
                }
            outputs.append(entry)
    report["outputs"] = outputs
    report["checks"] = {
        "tolerance": ANALYTIC_TOL,
        "passed": not failures,
        "failures": failures,
    }
    return report, not failures


def render_report(report: dict, output_format: str) -> str:
    if output_format == "json":
        return json.dumps(report, indent=2) + "\n"
    # flat csv: one row per output and engine
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    buf.write("# per-output moments and fidelities; reference columns repeat the closed forms\n")
    writer.writerow(
        ["role", "index", "engine", "mean_x", "mean_p", "var_x", "var_p",
         "fidelity", "ref_variance", "ref_fidelity"]
    )
    for entry in report["outputs"]:
        ref = entry["reference"]
        for engine in ("heisenberg", "phase_space", "monte_carlo"):
            block = entry.get(engine)
            if block is None:
                continue
            writer.writerow(
                [entry["role"], entry["index"], engine,
                 repr(block["mean_x"]), repr(block["mean_p"]),
                 repr(block["var_x"]), repr(block["var_p"]),
                 repr(block["fidelity"]),
                 repr(ref["variance"]), repr(ref["fidelity"])]
            )
    return buf.getvalue()


def _parse_range(text: str, field: str) -> list[int]:
    try:
        if ".." in text:
            lo_text, hi_text = text.split("..", 1)
            lo, hi = int(lo_text), int(hi_text)
        else:
            lo = hi = int(text)
    except ValueError:
        raise ScenarioValidationError(f"{field}: expected A..B or a single integer") from None
    if hi < lo:
        raise ScenarioValidationError(f"{field}: empty range {text!r}")
    return list(range(lo, hi + 1))


def _parse_floats(text: str, field: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise ScenarioValidationError(f"{field}: expected a comma-separated float list") from None
    if not values:
        raise ScenarioValidationError(f"{field}: empty list")
    return values


def _max_workers(n_tasks: int) -> int:
    raw = os.environ.get(JOBS_ENV)
    if raw:
        try:
            jobs = int(raw)
        except ValueError:
            raise ScenarioValidationError(f"{JOBS_ENV}: expected an integer") from None
        jobs = max(1, jobs)
    else:
        jobs = min(8, os.cpu_count() or 1)
    return max(1, min(jobs, n_tasks))


SWEEP_HEADER = """\
# phase-conjugate-pair cloning sweep
# n: input pairs; m: clones; eta: homodyne efficiency; r: ancilla squeezing (empty = no ancilla)
# f_pci: clone fidelity 4*eta*m^2*n / (4*eta*m^2*n + (m-n)^2)
# f_std: standard-cloner baseline 2*n*m / (2*n*m + m - 2*n); requires m >= 2n, nan otherwise
# f_anticlone: 4*m^2*n / (4*m^2*n + (m-n)^2 + 4*m*n*exp(-2*r) + (1-eta)*(m+n)^2/eta); empty without r
# advantage: f_pci > f_std (nan when f_std is undefined)
"""


def _sweep_row(task: tuple[int, int, float, float | None]) -> list[str]:
    n, m, eta, r = task
    f_pci = ref_clone_fidelity(n, m, eta)
    if m >= 2 * n:
        f_std = build_standard_cloner_reference(2 * n, m)
        advantage = "true" if f_pci > f_std else "false"
        f_std_text = repr(f_std)
    else:
        f_std_text = "nan"
        advantage = "nan"
    f_anti = "" if r is None else repr(ref_anticlone_fidelity(n, m, r, eta))
    return [
        str(n), str(m), repr(eta), "" if r is None else repr(r),
        repr(f_pci), f_std_text, f_anti, advantage,
    ]


def render_sweep(
    n_range: list[int],
    m_range: list[int],
    etas: list[float],
    rs: list[float] | None,
) -> str:
    """Closed-form sweep table, rows in deterministic parameter order."""
    tasks = [
        (n, m, eta, r)
        for n in n_range
        for m in m_range
        for eta in etas
        for r in (rs if rs is not None else [None])
    ]
    with ThreadPoolExecutor(max_workers=_max_workers(len(tasks))) as pool:
        rows = list(pool.map(_sweep_row, tasks))
    buf = io.StringIO()
    buf.write(SWEEP_HEADER)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "m", "eta", "r", "f_pci", "f_std", "f_anticlone", "advantage"])
    writer.writerows(rows)
    return buf.getvalue()


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_simulate(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    report, passed = simulate_scenario(scenario)
    _write(render_report(report, scenario.output_format), args.out)
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def cmd_sweep(args: argparse.Namespace) -> int:
    n_range = _parse_range(args.n, "--n")
    m_range = _parse_range(args.m, "--m")
    etas = _parse_floats(args.eta, "--eta") if args.eta else [1.0]
    rs = _parse_floats(args.r, "--r") if args.r else None
    for eta in etas:
        if not 0.0 < eta <= 1.0:
            raise ScenarioValidationError("--eta: values must be in (0, 1]")
    if rs is not None:
        for r in rs:
            if r < 0:
                raise ScenarioValidationError("--r: values must be >= 0")
    if any(v < 1 for v in n_range + m_range):
        raise ScenarioValidationError("--n/--m: values must be >= 1")
    _write(render_sweep(n_range, m_range, etas, rs), args.out)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    results = run_all_checks(mc_shots=args.mc_shots, seed=args.seed, tol=args.tol)
    width = max(len(r.name) for r in results)
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{status}  {result.name:<{width}}  {result.detail}")
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pciclone",
        description=(
            "Cloning of coherent states from phase-conjugate input pairs with "
            "linear optics: simulate scenarios, sweep closed forms, verify the build."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="evaluate a scenario file (JSON)")
    sim.add_argument("scenario", help="path to the scenario file")
    sim.add_argument("--out", default=None, help="report path (default: stdout)")
    sim.set_defaults(func=cmd_simulate)

    swp = sub.add_parser("sweep", help="tabulate closed-form fidelities")
    swp.add_argument("--n", required=True, help="input-pair range A..B or single value")
    swp.add_argument("--m", required=True, help="clone-count range A..B or single value")
    swp.add_argument("--eta", default=None, help="comma-separated efficiencies (default: 1.0)")
    swp.add_argument("--r", default=None, help="comma-separated ancilla squeezings (default: none)")
    swp.add_argument("--out", required=True, help="output CSV path")
    swp.set_defaults(func=cmd_sweep)

    ver = sub.add_parser("verify", help="run the built-in acceptance sweep")
    ver.add_argument(
        "--mc-shots", type=int, default=DEFAULT_SHOTS,
        help=f"Monte Carlo shots per machine (default: {DEFAULT_SHOTS})",
    )
    ver.add_argument(
        "--tol", type=float, default=ANALYTIC_TOL,
        help=f"analytic tolerance (default: {ANALYTIC_TOL:g})",
    )
    ver.add_argument(
        "--seed", type=int, default=DEFAULT_SEED,
        help=f"Monte Carlo seed (default: {DEFAULT_SEED})",
    )
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    except ScenarioValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION_ERROR
    except FileNotFoundError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE_ERROR


if __name__ == "__main__":
    sys.exit(main())
