"""``disham`` command line driver.

``disham run FILE`` simulates a scenario and writes one CSV per trajectory;
``disham check FILE`` only parses and validates it.

Exit codes: 0 success, 1 other failure, 2 grazing or tangential contact,
3 the surface is never reached, 4 malformed scenario.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from .dynamics import SampledArc, Trajectory, detect_crossing, simulate_smooth_scenario
from .errors import DishamError, GrazingContact, NoCrossing, ScenarioError
from .scenario import Mode, Scenario, load_scenario
from .transition import (
    ImpactState,
    decisive_points,
    prolong_vinogradov,
    simulate_limit_scenario,
)

__all__ = ["main", "run_scenario", "write_trajectory_csv", "exit_code_for", "compare"]

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_GRAZING = 2
EXIT_NO_CROSSING = 3
EXIT_SCHEMA = 4


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, ScenarioError):
        return EXIT_SCHEMA
    if isinstance(exc, GrazingContact):
        return EXIT_GRAZING
    if isinstance(exc, NoCrossing):
        return EXIT_NO_CROSSING
    return EXIT_FAILURE


def _num(x) -> str:
    return repr(float(x))


def _header(n: int) -> list:
    return (
        ["arc_id", "arc_kind", "param_kind", "param"]
        + [f"q{i + 1}" for i in range(n)]
        + [f"p{i + 1}" for i in range(n)]
        + ["t", "e"]
    )


def write_trajectory_csv(path, trajectory, n: int, error: BaseException | None = None) -> Path:
    """Write ``trajectory`` one sample per row.

    With ``error`` set, a trailer row ``ERROR,<type>,<message>`` follows the
    samples written so far.
    """
    path = Path(path)
    if isinstance(trajectory, SampledArc):
        trajectory = Trajectory(arcs=[trajectory])
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_header(n))
        if trajectory is not None:
            for arc_id, arc in enumerate(trajectory.arcs):
                for param, row in zip(arc.params, arc.states):
                    writer.writerow(
                        [arc_id, arc.kind.value, arc.parameterization.value, _num(param)]
                        + [_num(v) for v in row]
                    )
        if error is not None:
            writer.writerow(["ERROR", type(error).__name__, str(error)])
    return path


def _emit(path, trajectory, n, out) -> Path:
    trajectory.check_continuity(1e-9)
    write_trajectory_csv(path, trajectory, n)
    print(f"wrote {path}", file=out)
    return path


def _smooth_run(scenario: Scenario, delta: float):
    Hd = scenario.smooth_model(delta)
    x0 = scenario.initial_state
    # the smooth model's energy outside the layer can differ from the sharp one
    x0 = x0.replace(e=Hd.value(x0.q, x0.p))
    traj = simulate_smooth_scenario(Hd, x0, scenario.t_end, scenario.config())
    drift = max(arc.energy_drift(Hd) for arc in traj.arcs)
    return traj, drift


def _limit_run(scenario: Scenario) -> Trajectory:
    return simulate_limit_scenario(
        scenario.stack, scenario.initial_state, scenario.t_end, scenario.config()
    )


def _vinogradov_run(scenario: Scenario) -> list:
    pair = scenario.pair
    cfg = scenario.config()
    if scenario.start_side != "MINUS":
        raise ValueError("mode vinogradov needs the particle to start on the minus side")
    x_hit, approach = detect_crossing(pair.h_minus, scenario.initial_state, pair.surface, 0.0, cfg)
    impact = ImpactState(x_hit, "MINUS")
    impact.validate(pair, max(1e-9, 10.0 * cfg.rel_tol * abs(x_hit.e) + cfg.abs_tol))
    out = []
    for traj in prolong_vinogradov(pair, impact, scenario.t_end, cfg):
        if len(approach) > 1:
            traj.arcs.insert(0, approach)
        out.append(traj)
    return out, impact


def compare(scenario: Scenario) -> dict:
    """Smooth runs for every layer width against the zero-width run.

    Returns a dict with ``rows`` (one per width: ``delta``, ``p`` at
    ``t_end``, ``p_error``, ``state_error``, ``drift``), the ``limit``
    trajectory and the ``decisive`` point list (empty when not applicable).
    """
    limit = _limit_run(scenario)
    ref = limit.final_state
    n = scenario.dimension
    rows = []
    for delta in scenario.deltas:
        traj, drift = _smooth_run(scenario, delta)
        end = traj.final_state
        rows.append(
            {
                "delta": delta,
                "p": end.p,
                "p_error": float(np.max(np.abs(end.p - ref.p))),
                "state_error": float(
                    np.max(np.abs(end.as_array()[: 2 * n] - ref.as_array()[: 2 * n]))
                ),
                "drift": drift,
            }
        )
    decisive = []
    impacts = limit.meta.get("impacts", [])
    if (
        len(scenario.levels) == 2
        and scenario.surface.is_configuration_only
        and impacts
        and scenario.start_side == "MINUS"
    ):
        decisive = decisive_points(scenario.pair, ImpactState(impacts[0], "MINUS"))
    return {"rows": rows, "limit": limit, "decisive": decisive}


def _compare_report(scenario: Scenario, result: dict, out_dir: Path, out) -> None:
    n = scenario.dimension
    pcols = [f"p{i + 1}" for i in range(n)]
    header = ["delta"] + pcols + ["p_error", "state_error", "energy_drift"]
    lines = []
    ref = result["limit"].final_state
    lines.append(["0 (limit)"] + [f"{v:.10f}" for v in ref.p] + ["-", "-", "-"])
    for row in result["rows"]:
        lines.append(
            [f"{row['delta']:g}"]
            + [f"{v:.10f}" for v in row["p"]]
            + [f"{row['p_error']:.3e}", f"{row['state_error']:.3e}", f"{row['drift']:.3e}"]
        )
    widths = [max(len(h), *(len(r[i]) for r in lines)) for i, h in enumerate(header)]
    print("  ".join(h.rjust(w) for h, w in zip(header, widths)), file=out)
    for r in lines:
        print("  ".join(c.rjust(w) for c, w in zip(r, widths)), file=out)
    if result["decisive"]:
        print("decisive points:", file=out)
        for dp in result["decisive"]:
            p = ", ".join(f"{v:.10f}" for v in dp.point.p)
            print(f"  {dp.branch.value}  s = {dp.s:.10f}  p = ({p})", file=out)

    path = out_dir / f"{scenario.name}_compare.csv"
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerow(["0"] + [_num(v) for v in ref.p] + ["", "", ""])
        for row in result["rows"]:
            writer.writerow(
                [_num(row["delta"])]
                + [_num(v) for v in row["p"]]
                + [_num(row["p_error"]), _num(row["state_error"]), _num(row["drift"])]
            )
    print(f"wrote {path}", file=out)
    if result["decisive"]:
        path = out_dir / f"{scenario.name}_compare_decisive.csv"
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["branch", "s"] + [f"q{i + 1}" for i in range(n)] + pcols)
            for dp in result["decisive"]:
                writer.writerow(
                    [dp.branch.value, _num(dp.s)]
                    + [_num(v) for v in dp.point.q]
                    + [_num(v) for v in dp.point.p]
                )
        print(f"wrote {path}", file=out)


def run_scenario(scenario: Scenario, out_dir, out=None, err=None) -> int:
    """Run ``scenario`` in its mode, write outputs into ``out_dir``, return the exit code."""
    out = out or sys.stdout
    err = err or sys.stderr
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    n = scenario.dimension
    stem = f"{scenario.name}_{scenario.mode.value}"
    path = out_dir / f"{stem}.csv"
    try:
        if scenario.mode is Mode.LIMIT:
            _emit(path, _limit_run(scenario), n, out)
        elif scenario.mode is Mode.SMOOTH:
            for delta in scenario.deltas:
                path = out_dir / f"{stem}_delta{delta!r}.csv"
                traj, drift = _smooth_run(scenario, delta)
                _emit(path, traj, n, out)
                print(f"  energy drift {drift:.3e}", file=out)
        elif scenario.mode is Mode.VINOGRADOV:
            trajs, _ = _vinogradov_run(scenario)
            seen = {}
            for traj in trajs:
                label = traj.branch.lower()
                seen[label] = seen.get(label, 0) + 1
                suffix = label if seen[label] == 1 else f"{label}{seen[label]}"
                _emit(out_dir / f"{stem}_{suffix}.csv", traj, n, out)
            print(f"{len(trajs)} prolongation(s)", file=out)
        else:
            _compare_report(scenario, compare(scenario), out_dir, out)
    except (DishamError, ValueError) as exc:
        partial = getattr(exc, "partial", None)
        if isinstance(partial, (Trajectory, SampledArc)):
            write_trajectory_csv(path, partial, n, error=exc)
            print(f"wrote partial {path}", file=out)
        print(f"error: {type(exc).__name__}: {exc}", file=err)
        return exit_code_for(exc)
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="disham", description="Trajectories across discontinuous Hamiltonians."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="simulate a scenario and write CSV output")
    run.add_argument("scenario", help="scenario file")
    run.add_argument("--out-dir", default=".", help="output directory (default: current)")
    run.add_argument("--mode", choices=[m.value for m in Mode], type=str.lower)
    run.add_argument("--delta", type=float, action="append", help="layer width, repeatable")
    check = sub.add_parser("check", help="parse and validate a scenario")
    check.add_argument("scenario", help="scenario file")
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    overrides = {}
    if getattr(args, "mode", None):
        overrides["mode"] = args.mode
    if getattr(args, "delta", None):
        overrides["deltas"] = ", ".join(repr(d) for d in args.delta)
    try:
        scenario = load_scenario(args.scenario, overrides)
    except ScenarioError as exc:
        print(f"{args.scenario}: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    for notice in scenario.notices:
        print(f"notice: {notice}", file=sys.stderr)
    if args.command == "check":
        print(
            f"ok: {scenario.name}: dim {scenario.dimension}, {len(scenario.levels)} levels, "
            f"mode {scenario.mode.value}, initial energy {scenario.initial_energy!r}"
        )
        return EXIT_OK
    return run_scenario(scenario, args.out_dir)


if __name__ == "__main__":
    sys.exit(main())
