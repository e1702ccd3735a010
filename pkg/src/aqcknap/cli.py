"""Command-line front end.

Exit codes: 0 success, 2 validation error, 3 resource cap, 4 verification
failure, 5 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import encode, knapcore, phasetrans, spectral
from .errors import AqcError, EncodingError, InstanceError, QuadratureError, SpectralError, ValidityRangeError

log = logging.getLogger("aqcknap")

EXIT_OK, EXIT_VALIDATION, EXIT_RESOURCE, EXIT_VERIFY, EXIT_NUMERIC = 0, 2, 3, 4, 5


class VerificationFailed(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    instance: str | None = None
    A: int | None = None
    B: int | None = None
    driver: str = "tf"
    h0: float = 1.0
    grid: int = spectral.DEFAULT_GRID
    encoding: str = encode.LOG
    csv: str | None = None
    svg: str | None = None
    json: str | None = None
    alphas: list[float] = field(default_factory=list)
    mus: list[float] | None = None
    fidelity: str = "derived"
    values: list[int] | None = None
    blind_A: int | None = None
    workers: int | None = None

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        cfg = cls(command=ns.command)
        for name in ("instance", "A", "B", "driver", "h0", "grid", "encoding", "csv", "svg",
                     "json", "fidelity", "blind_A", "workers"):
            if getattr(ns, name, None) is not None:
                setattr(cfg, name, getattr(ns, name))
        if getattr(ns, "values", None):
            cfg.values = ns.values
        if ns.command == "phase":
            cfg.alphas = np.linspace(ns.alpha_min, ns.alpha_max, ns.alpha_steps).tolist()
            if any(getattr(ns, f) is not None for f in ("mu_min", "mu_max", "mu_steps")):
                lo = -3.0 if ns.mu_min is None else ns.mu_min
                hi = 3.0 if ns.mu_max is None else ns.mu_max
                steps = 7 if ns.mu_steps is None else ns.mu_steps
                cfg.mus = np.linspace(lo, hi, steps).tolist()
        if cfg.grid < 2:
            raise ValueError(f"--grid must be at least 2, got {cfg.grid}")
        return cfg


def _emit(text=""):
    print(text)


def _write_json(path, payload):
    if path == "-":
        json.dump(payload, sys.stdout, indent=1)
        sys.stdout.write("\n")
        return
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def _load_instance(cfg):
    if not cfg.instance:
        raise InstanceError("MISSING_INSTANCE", "--instance is required")
    return knapcore.load_instance(cfg.instance)


def _fmt_items(sol):
    return "{" + ",".join(str(j) for j in sol.items) + "}"


# --- commands ---------------------------------------------------------------

def cmd_solve(cfg: RunConfig) -> int:
    inst = _load_instance(cfg)
    dp = knapcore.solve_dp(inst)
    sols = [
        dp.solution,
        knapcore.solve_greedy(inst, "stop"),
        knapcore.solve_greedy(inst, "skip"),
    ]
    if inst.n <= 20:
        brute = knapcore.solve_brute(inst)
        if brute.profit != dp.solution.profit:
            raise VerificationFailed(f"brute force {brute.profit} != dp {dp.solution.profit}")
        sols.append(brute)
    _emit(f"n={inst.n} c={inst.capacity}")
    for sol in sols:
        _emit(f"{sol.method:12s} profit={sol.profit:<6d} weight={sol.weight:<6d} items={_fmt_items(sol)}")
    if cfg.json:
        _write_json(cfg.json, {
            "instance": inst.to_dict(),
            "solutions": [s.to_dict() for s in sols],
            "profile": list(dp.profile),
        })
    return EXIT_OK


def _build(cfg, inst):
    return encode.build_knapsack(inst, cfg.encoding, cfg.A, cfg.B)


def _check_qubits(n, inst=None):
    if n > spectral.MAX_QUBITS:
        hint = ""
        if inst is not None:
            counts = encode.qubit_counts(inst)
            hint = f" (unary needs {counts['unary']}, log needs {counts['log']})"
        raise SpectralError("TOO_MANY_QUBITS", f"{n} qubits > cap {spectral.MAX_QUBITS}{hint}")


def cmd_encode(cfg: RunConfig) -> int:
    inst = _load_instance(cfg)
    model, emap = _build(cfg, inst)
    ising = encode.to_ising(model)
    _emit(f"encoding={emap.kind} qubits={ising.num_qubits} A={emap.A} B={emap.B}"
          + (f" M={emap.M} slack={list(emap.slack_coefficients)}" if emap.kind == encode.LOG else ""))
    _emit(f"fields={sum(1 for h in ising.h if h)} couplings={len(ising.J)} offset={float(ising.offset):g}")
    if cfg.json:
        _write_json(cfg.json, ising.to_dict(emap))
    return EXIT_OK


def _sweep(cfg, ising, label):
    d = spectral.diagonalize_problem(ising)
    driver = spectral.DriverSpec(cfg.driver, cfg.h0)
    curve = spectral.sweep_gap(driver, d, spectral.default_grid(cfg.grid), workers=cfg.workers)
    if cfg.csv:
        spectral.write_gap_csv(cfg.csv, curve)
    if cfg.svg:
        from .plotting import plot_gap_curve

        plot_gap_curve(curve, cfg.svg, title=label)
    _emit(f"min_gap={curve.min_gap:.12g} argmin_s={curve.argmin_s:.12g} T_suggest={curve.t_suggest:.12g}")
    _emit(f"gap(0)={curve.gap[0]:.12g} gap(1)={curve.gap[-1]:.12g} gap_distinct(1)={curve.gap_distinct[-1]:.12g}")
    if curve.continuity_violations:
        log.warning("E0 jumped faster than the norm bound at %d grid steps", curve.continuity_violations)
    return d, curve


def cmd_gap(cfg: RunConfig) -> int:
    inst = _load_instance(cfg)
    model, emap = _build(cfg, inst)
    _check_qubits(model.num_vars, inst)
    ising = encode.to_ising(model)
    _emit(f"encoding={emap.kind} qubits={ising.num_qubits} driver={cfg.driver} h0={cfg.h0:g} grid={cfg.grid}")
    _, curve = _sweep(cfg, ising, f"{emap.kind} encoding, {ising.num_qubits} qubits")
    if cfg.json:
        _write_json(cfg.json, {
            "encoding": emap.to_dict(),
            "min_gap": curve.min_gap,
            "argmin_s": curve.argmin_s,
            "T_suggest": curve.t_suggest,
        })
    return EXIT_OK


def _search_values(cfg):
    if cfg.values:
        return cfg.values
    if cfg.instance:
        with open(cfg.instance) as fh:
            raw = json.load(fh)
        if "values" not in raw:
            raise InstanceError("MISSING_FIELD", "search input needs a 'values' list")
        return [int(v) for v in raw["values"]]
    raise InstanceError("MISSING_INSTANCE", "give --values or --instance")


def cmd_search(cfg: RunConfig) -> int:
    values = _search_values(cfg)
    blind = cfg.blind_A is not None
    B = 1 if cfg.B is None else cfg.B
    model, emap = encode.build_search_model(values, cfg.blind_A if blind else cfg.A, B, blind=blind)
    _check_qubits(model.num_vars)
    ising = encode.to_ising(model)
    _emit(f"values={values} A={emap.A} B={emap.B} mode={'blind' if blind else 'known'} qubits={ising.num_qubits}")
    d, curve = _sweep(cfg, ising, f"search over {len(values)} values")
    ground = [encode.bits_of(int(k), d.num_qubits) for k in spectral.ground_indices(d)]
    best = max(values)
    hits = []
    for bits in ground:
        chosen = [v for v, b in zip(values, bits) if b]
        _emit(f"ground state bits={''.join(map(str, bits))} selects {chosen}")
        hits.append(sum(bits) == 1 and chosen[0] == best)
    _emit(f"decoded maximum: {sorted({v for bits in ground for v, b in zip(values, bits) if b})}")
    if cfg.json:
        _write_json(cfg.json, {
            "values": values,
            "ground_states": [list(b) for b in ground],
            "min_gap": curve.min_gap,
            "argmin_s": curve.argmin_s,
        })
    if not all(hits):
        msg = "ground state is not one-hot at the maximum"
        if blind:
            _emit(f"WARNING: {msg} (A={emap.A} too small for max={best})")
            return EXIT_OK
        raise VerificationFailed(msg)
    return EXIT_OK


def cmd_phase(cfg: RunConfig) -> int:
    if not cfg.alphas:
        raise ValueError("alpha grid is empty")
    rows = phasetrans.tabulate(cfg.alphas, cfg.mus, cfg.fidelity)
    failed = [r for r in rows if "error" in r]
    for r in failed:
        log.warning("quadrature failed at alpha=%g mu=%g: %s", r["alpha"], r["mu"], r["error"])
    if cfg.csv:
        with open(cfg.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(phasetrans.PHASE_HEADER)
            for r in rows:
                w.writerow([f"{r[k]:.12g}" for k in phasetrans.PHASE_HEADER])
    if cfg.svg:
        from .plotting import plot_phase

        plot_phase([r for r in rows if "error" not in r], cfg.svg)
    devs = [r["deviation"] for r in rows if not math.isnan(r["deviation"])]
    mode = "constrained" if cfg.mus is not None else "unconstrained"
    _emit(f"{mode} rows={len(rows)} failed={len(failed)} fidelity={cfg.fidelity}"
          + (f" max_deviation={max(devs):.3g}" if devs else ""))
    if cfg.json:
        _write_json(cfg.json, rows)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    inst = _load_instance(cfg)
    model, emap = _build(cfg, inst)
    _check_qubits(model.num_vars, inst)
    d = spectral.diagonalize_problem(encode.to_ising(model))
    best = knapcore.solve_dp(inst).solution
    try:
        decoded = spectral.ground_state_decode(d, emap)
    except SpectralError as exc:
        if exc.code == "GROUND_STATE_INFEASIBLE":
            _emit(f"FAIL {exc}")
            _emit(f"penalty diagnostics: A={emap.A} B={emap.B} B*max(p)={emap.B * max(inst.profits)} "
                  f"sufficient A={encode.sufficient_penalty(inst.profits, emap.B)}")
            return EXIT_VERIFY
        raise
    ok = all(dec.profit == best.profit for dec in decoded)
    item_sets = sorted({tuple(j + 1 for j, b in enumerate(dec.selection) if b) for dec in decoded})
    status = "PASS" if ok else "FAIL"
    _emit(f"{status} encoding={emap.kind} qubits={d.num_qubits} minimizers={len(decoded)} "
          f"dp_profit={best.profit} decoded_profits={sorted({dec.profit for dec in decoded})}")
    for items in item_sets:
        _emit("items {" + ",".join(map(str, items)) + "}")
    if cfg.json:
        _write_json(cfg.json, {
            "status": status,
            "dp": best.to_dict(),
            "minimizers": [
                {"selection": list(dec.selection), "slack_value": dec.slack_value,
                 "profit": dec.profit, "weight": dec.weight}
                for dec in decoded
            ],
        })
    return EXIT_OK if ok else EXIT_VERIFY


COMMANDS = {
    "solve": cmd_solve,
    "encode": cmd_encode,
    "gap": cmd_gap,
    "search": cmd_search,
    "phase": cmd_phase,
    "verify": cmd_verify,
}


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="aqcknap", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, instance=True, penalties=True, sweep=False):
        if instance:
            sp.add_argument("--instance", metavar="PATH")
        if penalties:
            sp.add_argument("--A", type=int, help="constraint penalty (default max(p)+1)")
            sp.add_argument("--B", type=int, help="objective scale (default 1)")
        if sweep:
            sp.add_argument("--driver", choices=["tf", "xx"], default="tf")
            sp.add_argument("--h0", type=float, default=1.0)
            sp.add_argument("--grid", type=int, default=spectral.DEFAULT_GRID)
            sp.add_argument("--csv", metavar="PATH")
            sp.add_argument("--svg", metavar="PATH", help="figure path; format from suffix")
            sp.add_argument("--workers", type=int)
        sp.add_argument("--json", metavar="PATH", help="machine-readable output ('-' for stdout)")

    def enc(sp):
        sp.add_argument("--encoding", choices=[encode.UNARY, encode.LOG], default=encode.LOG)

    common(sub.add_parser("solve", help="classical DP, greedy and brute force"), penalties=False)
    sp = sub.add_parser("encode", help="export the Ising model")
    common(sp)
    enc(sp)
    sp = sub.add_parser("gap", help="sweep the spectral gap of a knapsack encoding")
    common(sp, sweep=True)
    enc(sp)
    sp = sub.add_parser("search", help="largest-value search Hamiltonian")
    common(sp, sweep=True)
    sp.add_argument("--values", type=_int_list, help="e.g. 1,2,6")
    sp.add_argument("--blind-A", dest="blind_A", type=int, help="use this A without checking it")
    sp = sub.add_parser("phase", help="tabulate the subset-sum phase boundary")
    common(sp, instance=False, penalties=False)
    sp.add_argument("--alpha-min", type=float, default=-10.0)
    sp.add_argument("--alpha-max", type=float, default=10.0)
    sp.add_argument("--alpha-steps", type=int, default=201)
    sp.add_argument("--mu-min", type=float)
    sp.add_argument("--mu-max", type=float)
    sp.add_argument("--mu-steps", type=int)
    sp.add_argument("--fidelity", choices=["paper", "derived"], default="derived")
    sp.add_argument("--csv", metavar="PATH")
    sp.add_argument("--svg", metavar="PATH")
    sp = sub.add_parser("verify", help="check the ground state against the DP optimum")
    common(sp)
    enc(sp)
    return p


def run(cfg: RunConfig) -> int:
    try:
        return COMMANDS[cfg.command](cfg)
    except (InstanceError, EncodingError, ValidityRangeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SpectralError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.code == "TOO_MANY_QUBITS":
            return EXIT_RESOURCE
        if exc.code == "GROUND_STATE_INFEASIBLE":
            return EXIT_VERIFY
        return EXIT_NUMERIC
    except QuadratureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except VerificationFailed as exc:
        print(f"FAIL {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except AqcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = RunConfig.from_args(ns)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
