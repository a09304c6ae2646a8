"""Command-line front end: problem files in, JSON verdicts out.

Exit codes: 0 feasible/positive/valid, 1 infeasible/not-positive/invalid,
2 unknown, 3 input error.  All scalars travel as strings ("p/q" or decimal)
so exact values survive the round trip.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from .alternating import CAMeasure, ca_backward_extend, has_ca_extension
from .backward import ExtensionClass, classify_backward, extend_with_index
from .errors import MomentKitError
from .extremal import (reciprocal_extremes_compact, reciprocal_inf_half_open,
                       reciprocal_inf_ray, unbounded_reciprocal_witness)
from .measure import AtomicMeasure
from .numeric import format_scalar, parse_scalar
from .oracle import OracleConfig, grid_classify, sweep_reciprocal
from .positivity import (Compact, HalfOpen, PositivityClass, Ray, classify, index)
from .principal import PrincipalKind, minimal_measure_half_open, minimal_measure_ray, principal_compact
from .completion import (SolveStatus, flat_che_completion, kappa_infinite_probe,
                         solve_che, solve_subnormal, stampfli_check)
from .tree import BranchClass, FullWeights, GeometricSumTail, MeasureTail, \
    FullBranch, PartialWeights, verify_che_certificate, verify_subnormal_certificate

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_UNKNOWN = 2
EXIT_INPUT = 3


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return format_scalar(x)


def _parse_seq(items, exact):
    return [parse_scalar(str(v), exact) for v in items]


def _domain(obj, exact):
    kind = obj.get("domain", "ray")
    if kind == "ray":
        return Ray()
    if kind in ("half-open", "half_open", "(0,1]"):
        return HalfOpen()
    if kind == "compact":
        return Compact(parse_scalar(str(obj["a"]), exact),
                       parse_scalar(str(obj["b"]), exact))
    raise ValueError(f"unknown domain {kind!r}")


def _measure_json(mu):
    if hasattr(mu, "to_json"):
        return mu.to_json()
    return repr(mu)


def _partial_weights(obj, exact) -> PartialWeights:
    if "trunk_sq" in obj:
        trunk_sq = _parse_seq(obj["trunk_sq"], exact)
    else:
        trunk = _parse_seq(obj.get("trunk", []), exact)
        trunk_sq = [t * t for t in trunk]
    classes = []
    if "branch_l1_sq_sum" in obj:
        classes.append(BranchClass(parse_scalar(str(obj["branch_l1_sq_sum"]), exact),
                                   (), None))
    for spec in obj.get("classes", []):
        first = parse_scalar(str(spec["first_sq"]), exact)
        tail = _parse_seq(spec.get("tail_sq", []), exact)
        classes.append(BranchClass(first, tuple(tail), spec.get("count", 1)))
    for br in obj.get("branches_sq", []):
        vals = _parse_seq(br, exact)
        classes.append(BranchClass(vals[0], tuple(vals[1:]), 1))
    for br in obj.get("branches", []):
        vals = _parse_seq(br, exact)
        classes.append(BranchClass(vals[0] * vals[0],
                                   tuple(v * v for v in vals[1:]), 1))
    return PartialWeights(trunk_sq, classes)


def _k_arg(obj):
    k = obj.get("K", "auto")
    if k == "auto":
        return "auto"
    return [Fraction(str(v)) for v in k]


def _solve_payload(outcome) -> tuple:
    payload = {"status": outcome.status.value}
    if outcome.reason:
        payload["reason"] = outcome.reason
    if outcome.certificate is not None:
        payload["certificate"] = outcome.certificate.to_json()
    code = {SolveStatus.FEASIBLE: EXIT_OK, SolveStatus.INFEASIBLE: EXIT_NEGATIVE,
            SolveStatus.UNKNOWN: EXIT_UNKNOWN}[outcome.status]
    return payload, code


def _run_classify(obj, exact, options):
    seq = _parse_seq(obj["sequence"], exact)
    domain = _domain(obj, exact)
    eps = float(options["tolerance"])
    verdict = classify(seq, domain, eps=eps, q_max=options["grid_q"])
    payload = {"class": verdict.kind.value}
    if verdict.is_positive:
        payload["index"] = _fmt(index(seq, domain, eps=eps, q_max=options["grid_q"]))
    code = EXIT_OK if verdict.is_positive else EXIT_NEGATIVE
    return payload, code


def _run_principal(obj, exact, options):
    seq = _parse_seq(obj["sequence"], exact)
    domain = _domain(obj, exact)
    if isinstance(domain, Compact):
        kind = PrincipalKind.UPPER if obj.get("kind", "lower") == "upper" else PrincipalKind.LOWER
        mu = principal_compact(seq, domain.a, domain.b, kind)
    elif isinstance(domain, Ray):
        mu = minimal_measure_ray(seq)
        if not isinstance(mu, AtomicMeasure):
            return {"family": "minimal measures parametrized by the reciprocal moment",
                    "atom_count": mu.atom_count}, EXIT_OK
    else:
        mu = minimal_measure_half_open(seq)
    return {"measure": _measure_json(mu)}, EXIT_OK


def _run_t_value(obj, exact, options):
    seq = _parse_seq(obj["sequence"], exact)
    domain = _domain(obj, exact)
    if isinstance(domain, Ray):
        payload = {"t_inf": _fmt(reciprocal_inf_ray(seq))}
        if "sup_target" in obj:
            a, b = unbounded_reciprocal_witness(seq, parse_scalar(str(obj["sup_target"]), exact))
            payload["sup_witness"] = {"a": _fmt(a), "b": _fmt(b)}
    elif isinstance(domain, HalfOpen):
        payload = {"t_one": _fmt(reciprocal_inf_half_open(seq))}
    else:
        bounds = reciprocal_extremes_compact(seq, domain.a, domain.b)
        payload = {"t_lo": _fmt(bounds.t_lo), "t_hi": _fmt(bounds.t_hi),
                   "attained_lo": _measure_json(bounds.attained_lo),
                   "attained_hi": _measure_json(bounds.attained_hi)}
    return payload, EXIT_OK


def _run_backward(obj, exact, options):
    seq = _parse_seq(obj["sequence"], exact)
    domain = _domain(obj, exact)
    if "x" in obj:
        verdict = classify_backward(seq, parse_scalar(str(obj["x"]), exact), domain)
        payload = {"class": verdict.kind.value, "threshold": _fmt(verdict.threshold)}
        if verdict.measure is not None:
            payload["measure"] = _measure_json(verdict.measure)
        code = EXIT_OK if verdict.kind is not ExtensionClass.NOT_EXTENSION else EXIT_NEGATIVE
        return payload, code
    sequence, measure = extend_with_index(
        seq, int(obj["r"]), Fraction(str(obj["K"])),
        _parse_seq(obj.get("free", []), exact), domain)
    payload = {"extension": sequence.to_json()}
    if measure is not None:
        payload["measure"] = _measure_json(measure)
    return payload, EXIT_OK


def _run_ca(obj, exact, options):
    seq = _parse_seq(obj["sequence"], exact)
    verdict = has_ca_extension(seq)
    payload = {"has_extension": verdict.has_extension}
    if verdict.measure is not None:
        payload["measure"] = verdict.measure.to_json()
    if not verdict.has_extension:
        return payload, EXIT_NEGATIVE
    if "prefix" in obj:
        result = ca_backward_extend(seq, _parse_seq(obj["prefix"], exact))
        payload["backward"] = {"ok": result.ok}
        if result.rho is not None:
            payload["backward"]["measure"] = result.rho.to_json()
            payload["backward"]["zero_mass_is_zero"] = result.zero_mass_is_zero
        if result.violated:
            payload["backward"]["violated"] = result.violated
        if not result.ok:
            return payload, EXIT_NEGATIVE
    return payload, EXIT_OK


def _run_subnormal(obj, exact, options):
    return _solve_payload(solve_subnormal(_partial_weights(obj, exact), _k_arg(obj)))


def _run_che(obj, exact, options):
    return _solve_payload(solve_che(_partial_weights(obj, exact), _k_arg(obj)))


def _run_flat_che(obj, exact, options):
    return _solve_payload(flat_che_completion(_partial_weights(obj, exact)))


def _run_probe(obj, exact, options):
    trunk_sq = _parse_seq(obj["trunk_sq"], exact)
    pw = _partial_weights({**obj, "trunk_sq": []}, exact)
    report = kappa_infinite_probe(trunk_sq, pw.classes, int(obj["kappa_max"]),
                                  _k_arg(obj))
    payload = {"verdict": report.verdict,
               "per_kappa": [{"kappa": k, "status": s, "norm_sq": n}
                             for k, s, n in report.per_kappa]}
    if report.uniform_norm_sq is not None:
        payload["uniform_norm_sq"] = report.uniform_norm_sq
    code = {"FeasibleTowardInfinity": EXIT_OK, "Infeasible": EXIT_NEGATIVE,
            "Unknown": EXIT_UNKNOWN}[report.verdict]
    return payload, code


def _run_stampfli(obj, exact, options):
    if "weights_sq" in obj:
        vals = _parse_seq(obj["weights_sq"], exact)
        verdict = stampfli_check(*vals, squared=True)
    else:
        vals = _parse_seq(obj["weights"], exact)
        verdict = stampfli_check(*vals)
    payload = {"holds": verdict.holds, "lhs": _fmt(verdict.lhs), "rhs": _fmt(verdict.rhs)}
    return payload, EXIT_OK if verdict.holds else EXIT_NEGATIVE


def _rebuild_measure(obj, exact):
    from .measure import MomentRecurrence
    from .numeric import Polynomial
    if "recurrence" in obj:
        poly = Polynomial(_parse_seq(obj["recurrence"], exact))
        window = _parse_seq(obj["window"], exact)
        hint = None
        if "atoms_approx" in obj:
            hint = AtomicMeasure.from_json(obj["atoms_approx"], exact)
        return MomentRecurrence(poly, int(obj["first_index"]), window, hint)
    return AtomicMeasure.from_json(obj, exact)


def _run_verify(obj, exact, options):
    cert = obj["certificate"]
    trunk_sq = _parse_seq(cert["trunk_sq"], exact)
    kind = cert["kind"]
    classes = []
    measures = []
    for row, measure_obj in zip(cert["weights_sq"], cert["measures"]):
        first = parse_scalar(str(row[0]), exact)
        p = int(obj.get("p", cert.get("p", len(row))))
        prefix = _parse_seq(row[1:p], exact)
        mu = _rebuild_measure(measure_obj, exact)
        if kind == "subnormal":
            gen = MeasureTail(prefix, mu)
        else:
            zero_mass = parse_scalar(str(measure_obj.get("zero_mass", "0")), exact)
            mu = CAMeasure(zero_mass, mu) if isinstance(mu, AtomicMeasure) else mu
            if not isinstance(mu, CAMeasure):
                from .completion import RecurrentCAMeasure
                mu = RecurrentCAMeasure(mu)
            gen = GeometricSumTail(prefix, mu)
        classes.append(FullBranch(first, gen, 1))
        measures.append(mu)
    full = FullWeights(trunk_sq, classes)
    depth = int(options.get("depth", 12))
    try:
        if kind == "subnormal":
            verify_subnormal_certificate(full, measures, depth)
        else:
            verify_che_certificate(full, measures, depth)
    except MomentKitError as exc:
        return {"valid": False, "error": str(exc)}, EXIT_NEGATIVE
    return {"valid": True, "depth": depth}, EXIT_OK


def _run_oracle_verify(obj, exact, options):
    seq = _parse_seq(obj["sequence"], True)
    domain = _domain(obj, True)
    cfg = OracleConfig(resolution=int(obj.get("resolution", 700)),
                       grid_q=int(options.get("grid_q", 10)),
                       seed=int(options.get("seed", 0)))
    verdict = grid_classify(seq, domain, cfg)
    payload = {"grid_class": verdict.value}
    if verdict is not PositivityClass.NOT_POSITIVE and not isinstance(domain, Compact):
        lo, hi = sweep_reciprocal(seq, domain, cfg)
        payload["sweep_min"] = lo
        payload["sweep_max"] = hi
    code = EXIT_OK if verdict is not PositivityClass.NOT_POSITIVE else EXIT_NEGATIVE
    return payload, code


_HANDLERS = {
    "classify": _run_classify,
    "principal": _run_principal,
    "t-value": _run_t_value,
    "backward": _run_backward,
    "ca": _run_ca,
    "subnormal": _run_subnormal,
    "che": _run_che,
    "flat-che": _run_flat_che,
    "probe-kappa-inf": _run_probe,
    "stampfli": _run_stampfli,
    "verify": _run_verify,
    "oracle": _run_oracle_verify,
}


def run(path, flags=None) -> tuple:
    """Process one problem file; returns (payload dict, exit code)."""
    flags = flags or argparse.Namespace(float=False, tolerance=1e-9, depth=12,
                                        grid_q=12, seed=0)
    started = time.time()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        return {"error": {"kind": "input", "message": str(exc)}}, EXIT_INPUT
    exact = obj.get("arithmetic", "float" if flags.float else "exact") == "exact"
    options = {"tolerance": flags.tolerance, "depth": flags.depth,
               "grid_q": flags.grid_q, "seed": flags.seed}
    options.update(obj.get("options", {}))
    kind = obj.get("kind")
    handler = _HANDLERS.get(kind)
    if handler is None:
        return {"error": {"kind": "input",
                          "message": f"unknown problem kind {kind!r}"}}, EXIT_INPUT
    try:
        payload, code = handler(obj, exact, options)
    except MomentKitError as exc:
        return {"error": {"kind": type(exc).__name__, "message": str(exc)}}, EXIT_NEGATIVE
    except (KeyError, ValueError, TypeError) as exc:
        return {"error": {"kind": "input", "message": f"{type(exc).__name__}: {exc}"}}, EXIT_INPUT
    payload["elapsed_s"] = round(time.time() - started, 6)
    return payload, code


def _process_one(args):
    path, flags_dict = args
    ns = argparse.Namespace(**flags_dict)
    payload, code = run(path, ns)
    out_path = Path(path).with_suffix(".result.json")
    out_path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return str(out_path), code


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="momentkit",
        description="truncated moment problems, backward extensions, and "
                    "weighted-shift completion certificates")
    ap.add_argument("problem", nargs="?", help="problem file (JSON)")
    mode = ap.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="float", action="store_false",
                      help="exact rational arithmetic (default)")
    mode.add_argument("--float", dest="float", action="store_true",
                      help="floating arithmetic with tolerance")
    ap.set_defaults(float=False)
    ap.add_argument("--tolerance", type=float, default=1e-9)
    ap.add_argument("--depth", type=int, default=12,
                    help="certificate verification depth")
    ap.add_argument("--grid-q", dest="grid_q", type=int, default=12)
    ap.add_argument("--seed", type=int, default=0)
    fmt = ap.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="pretty", action="store_false",
                     help="compact JSON output (default)")
    fmt.add_argument("--pretty", dest="pretty", action="store_true")
    ap.set_defaults(pretty=False)
    ap.add_argument("--batch", metavar="DIR",
                    help="process every *.json problem in a directory")
    args = ap.parse_args(argv)

    if args.batch:
        files = sorted(p for p in Path(args.batch).glob("*.json")
                       if not p.name.endswith(".result.json"))
        flags_dict = {"float": args.float, "tolerance": args.tolerance,
                      "depth": args.depth, "grid_q": args.grid_q, "seed": args.seed}
        worst = EXIT_OK
        with ProcessPoolExecutor() as pool:
            for out_path, code in pool.map(_process_one,
                                           [(str(f), flags_dict) for f in files]):
                print(out_path)
                worst = max(worst, code)
        return worst

    if not args.problem:
        ap.error("a problem file (or --batch DIR) is required")
    payload, code = run(args.problem, args)
    indent = 2 if args.pretty else None
    print(json.dumps(payload, indent=indent))
    return code


if __name__ == "__main__":
    sys.exit(main())
