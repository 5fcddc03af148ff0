"""Command-line front end.

Exit status: 0 success, 1 input or config error, 2 numerical or domain failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import bounds, predictor, relations, scenarios
from .errors import DomainError, InputError, NumericalFailure
from .inputs import PLANCK_MASS_GEV, InputSet, TopMode, load_config_file
from .rgflow import CouplingState, IntegratorOptions, integrate

CONFIG_ENV = "HIGGSRG_CONFIG"


class _Parser(argparse.ArgumentParser):
    # Usage errors are input errors (exit 1), not argparse's default 2.
    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--config", metavar="FILE", default=d, help=f"input config (overrides ${CONFIG_ENV})")
    p.add_argument("--format", choices=("text", "json"), default=d if suppress else "text")
    p.add_argument("--output", metavar="PATH", default=d, help="write the document here instead of stdout")


def _input_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--top-mode", choices=[m.value for m in TopMode])
    p.add_argument("--top-mass", type=float, metavar="GEV")
    p.add_argument("--top-mass-error", type=float, metavar="GEV")


def _convention_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--bc-convention", choices=[c.value for c in relations.BoundaryConvention], default="gt2")
    p.add_argument("--mh-coefficient", type=int, choices=predictor.MH_COEFFICIENTS, default=32)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="higgsrg", description="One-loop RG running and Higgs-mass prediction.")
    _global_flags(ap, suppress=False)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("critical-scale", help="scale where the gauge relations become consistent")
    _global_flags(p, suppress=True)
    p.add_argument("--right-handed-neutrino", action="store_true")

    p = sub.add_parser("predict", help="Higgs mass from the critical-scale boundary condition")
    _global_flags(p, suppress=True)
    _input_flags(p)
    _convention_flags(p)
    p.add_argument("--error-method", choices=[m.value for m in predictor.ErrorMethod], default="envelope")
    p.add_argument("--mc-samples", type=int, default=10000, metavar="N")
    p.add_argument("--seed", type=int, default=0, metavar="N")

    p = sub.add_parser("bounds", help="lower and upper Higgs-mass bounds for a free lambda(t_c)")
    _global_flags(p, suppress=True)
    _input_flags(p)
    p.add_argument("--mh-coefficient", type=int, choices=predictor.MH_COEFFICIENTS, default=32)
    p.add_argument("--coth-rate", choices=[r.value for r in bounds.CothRate], default="inv-pi2")
    p.add_argument("--lower-method", choices=[m.value for m in bounds.LowerMethod], default="corners")

    p = sub.add_parser("flow", help="export a coupling trajectory as CSV")
    _global_flags(p, suppress=True)
    _input_flags(p)
    p.add_argument("--from-t", type=float, default=0.0)
    p.add_argument("--to-t", type=float, default=None, help="default: the critical scale")
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--lambda0", type=float, default=None, help="lambda at t = 0 (default: predicted)")

    p = sub.add_parser("relations", help="commutant parameters and consistency defects")
    _global_flags(p, suppress=True)
    _input_flags(p)
    p.add_argument("--at-t", type=float, default=None, help="evaluate here (default: the critical scale)")
    p.add_argument("--right-handed-neutrino", action="store_true")

    p = sub.add_parser("scenario", help="alternative boundary relations and the gravity estimate")
    _global_flags(p, suppress=True)
    _input_flags(p)
    p.add_argument("name", choices=("ccm-ratio", "gut-scale", "gravity"))
    p.add_argument("--sigma", type=float, default=1e-26, metavar="CM2")
    p.add_argument("--planck-mass", type=float, default=PLANCK_MASS_GEV, metavar="GEV")
    return ap


def _load_inputs(args) -> InputSet:
    path = getattr(args, "config", None) or os.environ.get(CONFIG_ENV)
    try:
        inputs = load_config_file(path) if path else InputSet.default()
    except OSError as exc:
        raise InputError(f"cannot read config {path!r}: {exc.strerror}") from None
    mode = getattr(args, "top_mode", None)
    mass = getattr(args, "top_mass", None)
    merr = getattr(args, "top_mass_error", None)
    if mode is not None:
        if TopMode(mode) is TopMode.CUSTOM and mass is None and merr is None:
            inputs = inputs.with_top_mode(mode)
        elif TopMode(mode) is not TopMode.CUSTOM:
            if mass is not None or merr is not None:
                raise InputError("--top-mass/--top-mass-error need --top-mode custom")
            inputs = inputs.with_top_mode(mode)
    if mass is not None or merr is not None:
        inputs = inputs.with_top_mass(inputs.mT.value if mass is None else mass, merr)
    return inputs


def _content(args) -> relations.HyperchargeContent:
    if getattr(args, "right_handed_neutrino", False):
        return relations.STANDARD_CONTENT.with_right_handed_neutrino()
    return relations.STANDARD_CONTENT


def _conventions(args) -> predictor.Conventions:
    return predictor.Conventions(
        boundary=getattr(args, "bc_convention", "gt2"),
        mh_coefficient=args.mh_coefficient,
    )


# --- commands: each returns (document dict, text lines) or a raw string -----


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def cmd_critical_scale(args):
    inputs = _load_inputs(args)
    tc, dtc, Ec, dEc = relations.critical_point(inputs, _content(args))
    doc = {"tc": tc, "tc_err": dtc, "Ec_GeV": Ec, "Ec_err_GeV": dEc}
    text = [
        f"critical scale t_c       = {_fmt(tc)} ± {_fmt(dtc)}",
        f"critical energy E_c [GeV] = {_fmt(Ec)} ± {_fmt(dEc)}",
    ]
    return doc, text


def cmd_predict(args):
    inputs = _load_inputs(args)
    rep = predictor.predict(
        inputs, _conventions(args), args.error_method, n_samples=args.mc_samples, seed=args.seed
    )
    doc = rep.to_dict()
    doc["top_mode"] = inputs.top_mode.value
    text = [
        f"top-mass input [GeV]      = {_fmt(inputs.mT.value)} ± {_fmt(inputs.mT.abs_error)} ({inputs.top_mode.value})",
        f"critical scale t_c       = {_fmt(rep.tc)} ± {_fmt(rep.tc_err)}",
        f"critical energy E_c [GeV] = {_fmt(rep.Ec_GeV)} ± {_fmt(rep.Ec_err_GeV)}",
        f"top Yukawa gt(0)          = {_fmt(rep.gt0)}",
        f"top Yukawa gt(t_c)        = {_fmt(rep.gt_tc)}",
        f"quartic lambda(0)         = {_fmt(rep.lambda0)} ± {_fmt(rep.lambda0_err)}",
        f"Higgs mass mH [GeV]       = {_fmt(rep.mH_GeV)} ± {_fmt(rep.mH_err_GeV)}",
        f"boundary convention       = {rep.convention}, mass coefficient {rep.mh_coefficient}",
        f"error method              = {rep.error_method}",
    ]
    return doc, text


def cmd_bounds(args):
    inputs = _load_inputs(args)
    conv = predictor.Conventions(mh_coefficient=args.mh_coefficient)
    rep = bounds.compute_bounds(inputs, args.coth_rate, conv, args.lower_method)
    doc = rep.to_dict()
    text = [
        f"lower bound mH [GeV]      = {_fmt(rep.mH_lower_GeV)} (lambda(t_c) = 0, {args.lower_method})",
        f"upper bound mH [GeV]      = {_fmt(rep.mH_upper_GeV)}",
        f"asymptotic lambda(0)      = {_fmt(rep.lambda_as0)} (coth rate {rep.coth_rate})",
        f"top mode                  = {rep.top_mode}",
    ]
    return doc, text


def cmd_flow(args):
    inputs = _load_inputs(args)
    opts = IntegratorOptions(step_size=args.step)
    tc = relations.critical_point(inputs)[0]
    to_t = tc if args.to_t is None else args.to_t
    lam0 = args.lambda0
    if lam0 is None:
        lam0 = predictor.run_pipeline(
            np.array([inputs.gauge]), inputs.mT.value, inputs.mW.value, tc
        ).lambda0[0]
    start = CouplingState(0.0, *inputs.gauge, inputs.gt0, float(lam0))
    if args.from_t != 0.0:
        start = integrate(start, args.from_t, opts).final
    traj = integrate(start, to_t, opts)
    return traj.to_csv(inputs.mZ.value, args.stride)


def cmd_relations(args):
    inputs = _load_inputs(args)
    rep = _content(args)
    tc = relations.critical_scale(*inputs.inverse_squares, rep)
    t = tc if args.at_t is None else args.at_t
    yq, yl = relations.hypercharge_sums(rep)
    start = CouplingState(0.0, *inputs.gauge, inputs.gt0, 0.0)
    gt_t = integrate(start, t, active={"gauge", "top"}).final.gt
    sol = relations.solve_commutant(t, inputs, rep, gt_tc=gt_t)
    doc = {
        "t": t,
        "tc": tc,
        "yq": str(yq),
        "yl": str(yl),
        "A": sol.A,
        "trX": sol.trX,
        "g1_relation_residual": sol.residual,
        "lambda_ymh": sol.lambda_ymh,
        "lambda_boundary_gt2": relations.lambda_boundary(gt_t, "gt2"),
        "lambda_boundary_gt": relations.lambda_boundary(gt_t, "gt"),
        "physical": sol.physical,
        **{f"diag_{k}": v for k, v in sol.diagnostics.items()},
    }
    text = [
        f"evaluated at t            = {_fmt(t)} (critical scale {_fmt(tc)})",
        f"hypercharge sums yq, yl   = {yq}, {yl}",
        f"commutant A, trX          = {_fmt(sol.A)}, {_fmt(sol.trX)}",
        f"g1 relation residual      = {_fmt(sol.residual)}",
        f"relative coupling YMH     = {_fmt(sol.lambda_ymh)}",
        f"lambda(t) from gt2 / gt   = {_fmt(doc['lambda_boundary_gt2'])} / {_fmt(doc['lambda_boundary_gt'])}",
    ]
    for k, v in sol.diagnostics.items():
        text.append(f"  diagnostic {k:<14} = {_fmt(v)}")
    if not sol.physical:
        text.append("warning: unphysical commutant (trX <= 0 or A <= 0)")
    return doc, text


def cmd_scenario(args):
    inputs = _load_inputs(args)
    if args.name == "ccm-ratio":
        res = scenarios.ccm_ratio(inputs)
    elif args.name == "gut-scale":
        res = scenarios.gut_scale(inputs)
    else:
        rep = predictor.predict(inputs)
        res = scenarios.gravity_estimate(rep.mH_GeV, rep.lambda0, args.planck_mass, args.sigma)
    doc = res.to_dict()
    text = [f"scenario {res.name}"]
    text += [f"  {k:<20} = {_fmt(v)}" for k, v in res.computed.items()]
    text += [f"  reference {k:<10} = {_fmt(v)}" for k, v in res.reference.items()]
    text.append(f"  verdict              = {res.verdict.value} ({res.criterion.value}, threshold {_fmt(res.threshold)})")
    return doc, text


COMMANDS = {
    "critical-scale": cmd_critical_scale,
    "predict": cmd_predict,
    "bounds": cmd_bounds,
    "flow": cmd_flow,
    "relations": cmd_relations,
    "scenario": cmd_scenario,
}


def _render(result, fmt: str) -> str:
    if isinstance(result, str):
        return result
    doc, text = result
    if fmt == "json":
        return json.dumps(doc, indent=2) + "\n"
    width = max((len(ln.split(" = ", 1)[0].rstrip()) for ln in text if " = " in ln), default=0)
    lines = []
    for ln in text:
        if " = " in ln:
            label, value = ln.split(" = ", 1)
            ln = f"{label.rstrip():<{width}} = {value}"
        lines.append(ln)
    return "\n".join(lines) + "\n"


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        out = _render(COMMANDS[args.command](args), args.format)
        if args.output:
            Path(args.output).write_text(out)
        else:
            sys.stdout.write(out)
        return 0
    except InputError as exc:
        print(f"higgsrg: input error: {exc}", file=sys.stderr)
        return 1
    except (DomainError, NumericalFailure) as exc:
        print(f"higgsrg: numerical failure: {exc}", file=sys.stderr)
        return 2


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
