"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 numerical contract violation,
3 Monte Carlo disagreement with the analytic verdicts.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import criteria, gaussian, sampler, states
from .errors import ContractViolation, DegenerateError, DomainError

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_DISAGREE = 0, 1, 2, 3
AGREE_TOL = 1e-10


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class SweepSpec:
    name: str
    min: float
    max: float
    count: int
    spacing: str = "linear"

    def __post_init__(self):
        if self.count < 2:
            raise UsageError(f"{self.name}: count must be >= 2")
        if not self.min < self.max:
            raise UsageError(f"{self.name}: min must be < max")
        if self.spacing == "log" and self.min <= 0:
            raise UsageError(f"{self.name}: log spacing needs min > 0")
        if self.spacing not in ("linear", "log"):
            raise UsageError(f"{self.name}: unknown spacing {self.spacing!r}")

    def values(self) -> list[float]:
        if self.spacing == "log":
            return [float(v) for v in np.geomspace(self.min, self.max, self.count)]
        return [float(v) for v in np.linspace(self.min, self.max, self.count)]


def fmt(x) -> str:
    """Shortest round-trip decimal; empty for missing values."""
    if x is None:
        return ""
    return repr(float(x))


def _emit_json(obj, out) -> None:
    out.write(json.dumps(obj) + "\n")


def _emit_table(header: list[str], rows: list[list], fmt_name: str, out) -> None:
    if fmt_name == "json":
        for row in rows:
            _emit_json(dict(zip(header, row)), out)
        return
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])


def _werner(args) -> states.WernerLossParams:
    try:
        return states.WernerLossParams(args.p, args.eta)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


# --- commands ---------------------------------------------------------------

def cmd_negativity(args, out) -> int:
    prm = _werner(args)
    matrix = criteria.negativity(states.lossy_state_closed_form(prm))
    formula = criteria.negativity_formula(prm)
    _emit_json(
        {
            "p": prm.p,
            "eta": prm.eta,
            "negativity_matrix": matrix,
            "negativity_formula": formula,
            "agree": abs(matrix - formula) <= AGREE_TOL,
        },
        out,
    )
    return EXIT_OK


def cmd_sweep_negativity(args, out) -> int:
    ps = SweepSpec("p", args.p_min, args.p_max, args.p_count).values()
    etas = SweepSpec("eta", args.eta_min, args.eta_max, args.eta_count).values()
    for v in ps + etas:
        if not 0 <= v <= 1:
            raise UsageError("p and eta must lie in [0, 1]")
    rows = []
    for p in ps:
        for eta in etas:
            rows.append([p, eta, criteria.negativity(states.lossy_state_closed_form(p, eta))])
    _emit_table(["p", "eta", "negativity"], rows, args.format, out)
    return EXIT_OK


def cmd_epr(args, out) -> int:
    prm = _werner(args)
    rho = states.lossy_state_closed_form(prm)
    chosen = criteria.InferenceConvention.parse(args.convention)
    reports = {c.value: criteria.epr_criterion(rho, c).to_json_dict() for c in criteria.InferenceConvention}
    _emit_json(
        {
            "p": prm.p,
            "eta": prm.eta,
            "report": reports[chosen.value],
            "comparison": reports,
            "threshold_eta": criteria.epr_threshold_qubit(prm.p, chosen) if prm.p > 0 else None,
        },
        out,
    )
    return EXIT_OK


def cmd_entanglement(args, out) -> int:
    prm = _werner(args)
    rho = states.lossy_state_closed_form(prm)
    body = {
        "p": prm.p,
        "eta": prm.eta,
        "negativity": criteria.negativity(rho),
        "collective_spin": criteria.collective_spin_criterion(rho).to_json_dict(),
    }
    if prm.eta > 0:
        ht = criteria.hofmann_takeuchi_projected(states.project_two_photon(rho))
        body["report"] = ht.to_json_dict()
    else:
        body["report"] = None
    _emit_json(body, out)
    return EXIT_OK


def cmd_macro_threshold(args, out) -> int:
    nbs = SweepSpec("nb", args.nb_min, args.nb_max, args.nb_count, args.spacing).values()
    if nbs[0] <= 0:
        raise UsageError("<N^B> values must be positive")
    ent = gaussian.entanglement_threshold_curve(nbs)
    epr = gaussian.epr_threshold_curve(nbs)
    rows = [[nb, e, p] for (nb, e), (_, p) in zip(ent, epr)]
    _emit_table(["nb", "eta_min_entanglement", "eta_min_epr"], rows, args.format, out)
    return EXIT_OK


def cmd_macro(args, out) -> int:
    try:
        prm = gaussian.SqueezeLossParams(args.r, args.eta)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    m = gaussian.spin_moments(prm)
    body = {
        "r": prm.r,
        "eta": prm.eta,
        "jz2_local": m.jz2_local,
        "jz_cross": m.jz_cross,
        "n_b": m.n_b,
        "collective_var": m.collective_var,
        "entanglement": gaussian.macroscopic_entanglement_check(prm).to_json_dict(),
    }
    if prm.r > 0 and prm.eta > 0:
        inf = gaussian.inferred_variance_gaussian(prm)
        body["inferred_variance"] = inf.variance
        body["gain"] = inf.gain
        body["epr"] = gaussian.macroscopic_epr_check(prm).to_json_dict()
    _emit_json(body, out)
    return EXIT_OK


def cmd_validate(args, out) -> int:
    prm = _werner(args)
    try:
        cfg = sampler.SampleConfig(args.n, args.seed)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    reports = sampler.estimate_criteria_suite(prm, cfg, n_boot=args.n_boot)
    ok = all(r.agree for r in reports)
    _emit_json(
        {
            "p": prm.p,
            "eta": prm.eta,
            "n": cfg.n_samples,
            "seed": cfg.seed,
            "negativity": criteria.negativity(states.lossy_state_closed_form(prm)),
            "reports": [r.to_json_dict() for r in reports],
            "all_agree": ok,
        },
        out,
    )
    return EXIT_OK if ok else EXIT_DISAGREE


# --- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="spinepr", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def point(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--p", type=float, required=True, help="Werner mixing probability")
        sp.add_argument("--eta", type=float, required=True, help="detection efficiency")
        return sp

    sp = point("negativity", "negativity of the lossy Werner state")
    sp.set_defaults(func=cmd_negativity)

    sp = sub.add_parser("sweep-negativity", help="negativity over a (p, eta) grid")
    for name in ("p", "eta"):
        sp.add_argument(f"--{name}-min", type=float, default=0.0)
        sp.add_argument(f"--{name}-max", type=float, default=1.0)
        sp.add_argument(f"--{name}-count", type=int, default=21)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.set_defaults(func=cmd_sweep_negativity)

    sp = point("epr", "EPR criterion on the lossy Werner state")
    sp.add_argument(
        "--convention",
        choices=("all-outcomes", "detected-only", "all_outcomes", "detected_only"),
        default="all-outcomes",
    )
    sp.set_defaults(func=cmd_epr)

    sp = point("entanglement", "projected Hofmann-Takeuchi and collective spin criteria")
    sp.set_defaults(func=cmd_entanglement)

    sp = sub.add_parser("macro-threshold", help="minimum efficiencies versus <N^B>")
    sp.add_argument("--nb-min", type=float, default=1e-4)
    sp.add_argument("--nb-max", type=float, default=1e6)
    sp.add_argument("--nb-count", type=int, default=41)
    sp.add_argument("--spacing", choices=("log", "linear"), default="log")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.set_defaults(func=cmd_macro_threshold)

    sp = sub.add_parser("macro", help="moments and criteria of the macroscopic state")
    sp.add_argument("--r", type=float, required=True, help="squeezing parameter")
    sp.add_argument("--eta", type=float, required=True)
    sp.set_defaults(func=cmd_macro)

    sp = point("validate", "Monte Carlo check of the analytic verdicts")
    sp.add_argument("--n", type=int, default=100_000, help="samples per axis")
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--n-boot", type=int, default=sampler.N_BOOTSTRAP)
    sp.set_defaults(func=cmd_validate)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    buf = io.StringIO()
    try:
        code = args.func(args, buf)
    except (UsageError, DomainError) as exc:
        parser.print_usage(sys.stderr)
        print(f"spinepr: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ContractViolation, DegenerateError) as exc:
        print(f"spinepr: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    out.write(buf.getvalue())
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
