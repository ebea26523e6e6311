"""Batch front-end: periods, theta evaluation and verification plans.

Subcommands:

  thetalab periods <curve.json>        period data as JSON
  thetalab theta <input.json>          theta value + gradient with bounds
  thetalab verify <plan.json>          run a verification plan; JSONL reports

Complex numbers are [re, im] pairs everywhere.  Exit codes: 0 success /
all verifications passed, 1 verification failure, 2 parse failure or unknown
task id, 3 invariant failure (bad curve, non-positive-definite Im tau).
Runs are deterministic for a fixed plan and seed; wall-clock timings appear
only in the human summary, never in the JSONL stream.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from .curves import CurveSpec, CurveSpecError
from .periods import PeriodData, PeriodError, build_periods
from .homology import HomologyError
from .theta import (Characteristic, RiemannMatrix, ThetaError, theta_eval,
                    theta_grad, truncation_radius)
from . import thomae
from .algebra import INF


def _c2j(z) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _mat2j(m) -> list:
    return [[_c2j(x) for x in row] for row in np.asarray(m)]


def _j2c(pair) -> complex:
    return complex(float(pair[0]), float(pair[1]))


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read JSON from {path}: {exc}", file=sys.stderr)
        raise SystemExit(2)


# ----------------------------------------------------------------------------
# periods


def cmd_periods(args) -> int:
    obj = _load_json(args.curve)
    try:
        curve = CurveSpec.from_json(obj)
    except CurveSpecError as exc:
        if "not distinct" in str(exc):
            print(f"error: branch points not distinct: {exc}", file=sys.stderr)
            return 3
        print(f"error: invalid curve spec: {exc}", file=sys.stderr)
        return 2
    try:
        pd = build_periods(curve, quad_order=args.quad_order)
    except (PeriodError, HomologyError) as exc:
        print(f"error: period construction failed: {exc}", file=sys.stderr)
        return 3
    out = {
        "curve": curve.to_json(),
        "genus": curve.genus,
        "C": _mat2j(pd.C),
        "B_raw": _mat2j(pd.Braw),
        "tau": _mat2j(pd.tau.matrix),
        "aj_branch": {str(k): [_c2j(x) for x in v] for k, v in sorted(pd.aj_branch.items())},
        "K": [_c2j(x) for x in pd.K],
        "K_characteristic": {"eps": [str(x) for x in pd.K_char.eps],
                             "delta": [str(x) for x in pd.K_char.delta]},
        "quad_order": pd.quad_order,
        "invariants": {
            "tau_asymmetry": pd.diagnostics.get("tau_asymmetry"),
            "im_tau_min_eig": pd.diagnostics.get("im_tau_min_eig"),
            "quad_drift": pd.diagnostics.get("quad_drift"),
            "order_n_lattice_dist": pd.diagnostics.get("order_n_lattice_dist"),
            "a1_direct_check": pd.diagnostics.get("a1_direct_check"),
        },
    }
    text = json.dumps(out, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


# ----------------------------------------------------------------------------
# theta


def cmd_theta(args) -> int:
    obj = _load_json(args.input)
    try:
        tau_rows = [[_j2c(x) for x in row] for row in obj["tau"]]
        eps = obj.get("eps", [0] * len(tau_rows))
        delta = obj.get("delta", [0] * len(tau_rows))
        zeta = [_j2c(x) for x in obj.get("zeta", [[0.0, 0.0]] * len(tau_rows))]
    except (KeyError, TypeError, IndexError) as exc:
        print(f"error: malformed theta input: {exc}", file=sys.stderr)
        return 2
    tol = float(obj.get("tol", args.tol))
    try:
        tau = RiemannMatrix(np.array(tau_rows, dtype=complex))
    except ValueError as exc:
        print(f"error: invalid Riemann matrix: {exc}", file=sys.stderr)
        return 3
    try:
        char = Characteristic.of(eps, delta)
        val = theta_eval(char, np.array(zeta), tau, tol)
        grad = theta_grad(char, np.array(zeta), tau, max(tol, 1e-8))
        radius = truncation_radius(tau, tol)
    except (ThetaError, ValueError) as exc:
        print(f"error: theta evaluation failed: {exc}", file=sys.stderr)
        return 3
    out = {
        "value": _c2j(val.value),
        "truncation_bound": val.truncation_bound,
        "gradient": [_c2j(x) for x in grad.values],
        "gradient_bound": grad.truncation_bound,
        "radius": radius,
    }
    print(json.dumps(out, indent=2))
    return 0


# ----------------------------------------------------------------------------
# verify


KNOWN_TASKS = [
    "period_sanity",
    "thomae_const_hyp", "thomae_deriv_hyp", "quotient_hyp", "matrix_form_hyp",
    "alpha_trig", "deriv_trig_t1", "deriv_trig_t2", "quotient_trig",
    "matrix_form_trig", "simple_zeros_trig",
]


def _period_sanity_report(curve: CurveSpec, pd: PeriodData) -> thomae.VerificationReport:
    d = pd.diagnostics
    tau_scale = 1.0 + float(np.max(np.abs(pd.tau.matrix)))
    checks = {
        "tau_asymmetry": (d["tau_asymmetry"], 1e-8),
        "quad_drift": (d["quad_drift"], 1e-9),
        "order_n_lattice_dist": (d["order_n_lattice_dist"], 1e-8 * tau_scale),
        "K_lattice_dist_2K": (d["K_lattice_dist_2K"], 1e-8 * tau_scale),
    }
    passed = all(v <= t for v, t in checks.values()) and d["im_tau_min_eig"] > 0
    return thomae.VerificationReport(
        identity="period_sanity", partition="", s_range=[], lhs=[],
        rhs_modulus=float("nan"), ratios=[], tag=None, spread=0.0,
        passed=passed,
        tolerances={k: t for k, (v, t) in checks.items()},
        details={k: v for k, (v, t) in checks.items()}
        | {"im_tau_min_eig": d["im_tau_min_eig"]})


def _expand_task(task: dict, curve: CurveSpec, pd: PeriodData,
                 alpha_cache: dict, seed: int, defaults: dict):
    """Yield VerificationReports for one task entry."""
    tid = task["id"]
    tol = float(task.get("tol", defaults.get("tol", 1e-6)))
    theta_tol = float(task.get("theta_tol", defaults.get("theta_tol", 1e-10)))
    g = curve.genus

    def alpha_ref():
        if "est" not in alpha_cache:
            alpha_cache["est"] = thomae.estimate_alpha([(curve, pd)], tol=tol,
                                                       theta_tol=theta_tol)
        return alpha_cache["est"].reference_for(0)

    if tid == "period_sanity":
        yield _period_sanity_report(curve, pd)
    elif tid == "thomae_const_hyp":
        for p in thomae.enumerate_partitions_hyp(g, 0):
            yield thomae.verify_thomae_const_hyp(curve, pd, p, tol, theta_tol)
    elif tid == "thomae_deriv_hyp":
        include_inf = bool(task.get("include_infinity", False))
        for p in thomae.enumerate_partitions_hyp(g, 1):
            if INF in p.I and not include_inf:
                continue
            yield thomae.verify_thomae_deriv_hyp(curve, pd, p, tol, theta_tol)
    elif tid == "quotient_hyp":
        ks = task.get("ks", list(range(1, curve.num_branch + 1)))
        for i, k in enumerate(ks):
            yield thomae.verify_quotient_hyp(curve, pd, int(k),
                                             seed=seed + 977 * i,
                                             samples=int(task.get("samples", 3)),
                                             tol=tol, theta_tol=theta_tol)
    elif tid == "matrix_form_hyp":
        count = int(task.get("count", 1))
        for p in thomae.enumerate_partitions_hyp(g, 0)[:count]:
            yield thomae.verify_matrix_form_hyp(curve, pd, p, tol)
    elif tid == "alpha_trig":
        est = thomae.estimate_alpha([(curve, pd)], tol=tol, theta_tol=theta_tol)
        alpha_cache["est"] = est
        rep = thomae.VerificationReport(
            identity="alpha_trig", partition="all-constant-kind", s_range=[],
            lhs=[], rhs_modulus=float("nan"), ratios=[], tag=None,
            spread=est.spread,
            passed=est.spread < tol and all(t.ok for t in est.phases),
            tolerances={"tol": tol, "theta_tol": theta_tol},
            details={"alpha_modulus": est.modulus,
                     "phase_indices": [t.index for t in est.phases],
                     "worst_phase_residual": max(t.phase_residual for t in est.phases)})
        yield rep
    elif tid == "deriv_trig_t1":
        for p in thomae.enumerate_partitions_trig(curve.q, "deriv1"):
            yield thomae.verify_thomae_deriv_trig_t1(curve, pd, alpha_ref(), p,
                                                     tol, theta_tol)
    elif tid == "deriv_trig_t2":
        locs = task.get("infinity_in", [1, 0])
        for loc in locs:
            for p in thomae.enumerate_partitions_trig(curve.q, "deriv2", infinity_in=loc):
                yield thomae.verify_thomae_deriv_trig_t2(curve, pd, alpha_ref(), p,
                                                         tol, theta_tol)
    elif tid == "quotient_trig":
        ks = task.get("ks", list(range(1, curve.num_branch + 1)))
        for i, k in enumerate(ks):
            yield thomae.verify_quotient_trig(curve, pd, int(k),
                                              seed=seed + 977 * i,
                                              samples=int(task.get("samples", 3)),
                                              tol=tol, theta_tol=theta_tol)
    elif tid == "matrix_form_trig":
        count = int(task.get("count", 1))
        for p in thomae.enumerate_partitions_trig(curve.q, "constant")[:count]:
            yield thomae.verify_matrix_form_trig(curve, pd, alpha_ref(), p, tol)
    elif tid == "simple_zeros_trig":
        for p in (thomae.enumerate_partitions_trig(curve.q, "deriv1")
                  + thomae.enumerate_partitions_trig(curve.q, "deriv2", infinity_in=1)
                  + thomae.enumerate_partitions_trig(curve.q, "constant")):
            yield thomae.simple_zero_check(pd, p, theta_tol=theta_tol)
    else:
        raise KeyError(tid)


def cmd_verify(args) -> int:
    plan = _load_json(args.plan)
    try:
        if "curve_file" in plan:
            curve_obj = _load_json(plan["curve_file"])
        else:
            curve_obj = plan["curve"]
        curve = CurveSpec.from_json(curve_obj)
        tasks = plan["tasks"]
        if not isinstance(tasks, list):
            raise KeyError("tasks")
    except (KeyError, TypeError, CurveSpecError) as exc:
        print(f"error: invalid plan: {exc}", file=sys.stderr)
        return 2
    for t in tasks:
        if t.get("id") not in KNOWN_TASKS:
            print(f"error: unknown task id {t.get('id')!r}", file=sys.stderr)
            return 2
    seed = int(args.seed if args.seed is not None else plan.get("seed", 0))
    defaults = dict(plan.get("tolerances", {}))
    if args.tol is not None:
        defaults["tol"] = args.tol
    if args.theta_tol is not None:
        defaults["theta_tol"] = args.theta_tol
    quad_order = int(args.quad_order or plan.get("quad_order", 64))

    t0 = time.time()
    try:
        pd = build_periods(curve, quad_order=quad_order)
    except (PeriodError, HomologyError, CurveSpecError) as exc:
        print(f"error: period construction failed: {exc}", file=sys.stderr)
        return 3
    t_periods = time.time() - t0

    alpha_cache: dict = {}
    needs_alpha = {"alpha_trig", "deriv_trig_t1", "deriv_trig_t2", "matrix_form_trig"}
    if any(t["id"] in needs_alpha for t in tasks):
        alpha_cache["est"] = thomae.estimate_alpha(
            [(curve, pd)], tol=float(defaults.get("tol", 1e-6)),
            theta_tol=float(defaults.get("theta_tol", 1e-10)))

    def run_task(ti: int, task: dict):
        t1 = time.time()
        out = [rep for rep in _expand_task(task, curve, pd, alpha_cache,
                                           seed + 104729 * ti, defaults)]
        return out, time.time() - t1

    reports: list[tuple[int, thomae.VerificationReport]] = []
    timings = []
    if args.jobs and args.jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=args.jobs) as ex:
            futures = [ex.submit(run_task, ti, task) for ti, task in enumerate(tasks)]
            for ti, fut in enumerate(futures):
                out, dt = fut.result()
                reports.extend((ti, rep) for rep in out)
                timings.append(dt)
    else:
        for ti, task in enumerate(tasks):
            out, dt = run_task(ti, task)
            reports.extend((ti, rep) for rep in out)
            timings.append(dt)

    lines = [rep.jsonl() for _, rep in reports]
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("\n".join(lines) + ("\n" if lines else ""))

    # human summary
    n_pass = sum(1 for _, r in reports if r.passed)
    n_fail = len(reports) - n_pass
    print(f"{'identity':<22} {'partition':<42} {'|ratio|-1':>10} "
          f"{'root':>5} {'spread':>9} pass")
    for _, r in reports:
        mod = abs(np.mean(r.ratios)) - 1.0 if r.ratios else float("nan")
        root = r.tag.index if r.tag else "-"
        print(f"{r.identity:<22} {r.partition:<42} {mod:>10.2e} "
              f"{str(root):>5} {r.spread:>9.2e} {'OK' if r.passed else 'FAIL'}")
    print(f"\n{n_pass} passed, {n_fail} failed; periods {t_periods:.2f}s, "
          f"tasks {' '.join(f'{t:.2f}s' for t in timings)}")
    if not args.out:
        for line in lines:
            print(line)
    return 0 if n_fail == 0 else 1


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="thetalab",
                                 description="period matrices, theta functions and "
                                             "Thomae-type identity verification")
    sub = ap.add_subparsers(dest="command", required=True)

    p1 = sub.add_parser("periods", help="build period data for a curve")
    p1.add_argument("curve", help="curve spec JSON file")
    p1.add_argument("--quad-order", type=int, default=64)
    p1.add_argument("--out", default=None)
    p1.set_defaults(func=cmd_periods)

    p2 = sub.add_parser("theta", help="evaluate theta and its gradient")
    p2.add_argument("input", help="JSON with tau, eps, delta, zeta")
    p2.add_argument("--tol", type=float, default=1e-10)
    p2.set_defaults(func=cmd_theta)

    p3 = sub.add_parser("verify", help="run a verification plan")
    p3.add_argument("plan", help="plan JSON file")
    p3.add_argument("--tol", type=float, default=None)
    p3.add_argument("--theta-tol", type=float, default=None)
    p3.add_argument("--quad-order", type=int, default=None)
    p3.add_argument("--seed", type=int, default=None)
    p3.add_argument("--jobs", type=int, default=1,
                    help="worker processes for independent tasks")
    p3.add_argument("--out", default=None, help="JSONL output path")
    p3.set_defaults(func=cmd_verify)

    args = ap.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
