"""Command-line front end.

Subcommands:

  classify   run the sign-condition battery, decay checks and the
             polynomial detector on a spec; exit 0 pass / 1 fail /
             2 inconclusive
  transform  compare the coefficient image against quadrature on a list
             of points; exit 1 if any difference exceeds the combined
             bounds
  measures   emit the measure chain for a series spec as CSV with
             positivity verdicts
  selftest   run the acceptance battery

Specs are JSON, read from --spec FILE or stdin ("-"):

  {"coeffs": ["1", "0.25", ...], "name": "..."}     series coefficients
  {"hyper": {"a": "1", "b": "2", "c": "3", "lambda": "0.5"}}
  {"closed_form": "1/(x+1)"}
  {"measure": {"atom0": "0", "grid": [...], "density": [...]}}

Numbers cross the wire as decimal strings so they round exactly once at
the working precision.  Identical spec, flags and seed produce
byte-identical reports.  Usage and parse errors exit with code 3.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import dataclass

import mpmath
from mpmath import mpf

from . import acceptance
from .am_series import AMSeries, new_am_series
from .errors import AmlaplaceError, SpecParseError
from .handles import ClosedForm, parse_closed_form
from .hyper_gallery import hyper_params, phi_1f2
from .laplace_image import eval_image, laplace_coeffs
from .measure_chain import (
    GridMeasure,
    default_measure_grid,
    laplace_of_measure,
    measure_from_json,
    mu_step,
    positivity_check,
    sigma_j,
)
from .precision import to_mpf, use_bits
from .quad_engine import laplace_numeric
from .widder_ops import (
    check_conditions,
    cm_order_detect,
    decay_check,
    detect_polynomial,
    make_report,
)

_EXIT_PASS = 0
_EXIT_FAIL = 1
_EXIT_INCONCLUSIVE = 2
_EXIT_ERROR = 3


@dataclass(frozen=True)
class LoadedSpec:
    kind: str                      # series | hyper | closed_form | measure
    series: AMSeries | None = None
    handle: ClosedForm | None = None
    measure: GridMeasure | None = None
    lam: mpf | None = None
    name: str = ""


def _read_spec(path: str) -> dict:
    if path == "-":
        text = sys.stdin.read()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc


def _load_spec(obj: dict) -> LoadedSpec:
    if not isinstance(obj, dict):
        raise SpecParseError("spec must be a JSON object")
    name = obj.get("name", "")
    if "coeffs" in obj:
        return LoadedSpec("series", series=new_am_series(obj["coeffs"]), name=name)
    if "hyper" in obj:
        h = obj["hyper"]
        try:
            params = hyper_params(
                h["a"], h["b"], h["c"], h.get("lambda")
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise SpecParseError(f"bad hyper spec: {exc}") from exc
        lam = to_mpf(params.lam) if params.lam is not None else None
        return LoadedSpec("hyper", series=phi_1f2(params), lam=lam, name=name)
    if "closed_form" in obj:
        return LoadedSpec(
            "closed_form", handle=parse_closed_form(obj["closed_form"]), name=name
        )
    if "measure" in obj:
        return LoadedSpec("measure", measure=measure_from_json(obj["measure"]), name=name)
    raise SpecParseError(
        "spec needs one of: coeffs, hyper, closed_form, measure"
    )


def _parse_grid(text: str) -> tuple:
    try:
        return tuple(mpf(part.strip()) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise SpecParseError(f"bad grid value: {exc}") from exc


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


# ---------------------------------------------------------------------------

def cmd_classify(args) -> int:
    spec = _load_spec(_read_spec(args.spec))
    if spec.kind == "measure":
        raise SpecParseError("classify expects a function spec, not a measure")
    if spec.kind == "closed_form":
        target = spec.handle
    else:
        target = laplace_coeffs(spec.series)
    grid = _parse_grid(args.grid) if args.grid else None

    report = check_conditions(target, args.kmax, x_grid=grid, depth=args.depth)
    entries = list(report.entries)
    entries.extend(decay_check(target, min(args.kmax, 4)).entries)
    if args.order is not None:
        verdict = cm_order_detect(target, args.order, x_grid=grid)
        entries.extend(verdict.entries)
    combined = make_report(entries, report.abs_tol, report.rel_tol)

    detection = detect_polynomial(target)
    if args.format == "csv":
        _emit(combined.to_csv(), args.out)
    else:
        obj = json.loads(combined.to_json())
        obj["polynomial"] = {
            "order": detection.order,
            "leading": mpmath.nstr(detection.leading, 30)
            if detection.leading is not None
            else None,
        }
        if spec.name:
            obj["name"] = spec.name
        _emit(json.dumps(obj, indent=2, sort_keys=True), args.out)
    return {
        "pass": _EXIT_PASS,
        "fail": _EXIT_FAIL,
        "inconclusive": _EXIT_INCONCLUSIVE,
    }[combined.summary]


def cmd_transform(args) -> int:
    spec = _load_spec(_read_spec(args.spec))
    if spec.kind not in ("series", "hyper"):
        raise SpecParseError("transform needs a coefficients or hyper spec")
    series = spec.series
    ips = laplace_coeffs(series)
    xs = _parse_grid(args.x)
    tol = mpf(args.quad_tol)
    rows = []
    all_ok = True
    for x in xs:
        image = eval_image(ips, x)
        numeric = laplace_numeric(series, x, tol)
        diff = abs(image.value - numeric.value)
        allowance = image.abs_error_bound + numeric.abs_error_bound
        ok = diff <= allowance
        all_ok = all_ok and ok
        rows.append(
            {
                "x": mpmath.nstr(x, 30),
                "series": mpmath.nstr(image.value, 30),
                "quadrature": mpmath.nstr(numeric.value, 30),
                "diff": mpmath.nstr(diff, 30),
                "series_bound": mpmath.nstr(image.abs_error_bound, 30),
                "quad_bound": mpmath.nstr(numeric.abs_error_bound, 30),
                "within_bounds": ok,
            }
        )
    if args.format == "csv":
        out = io.StringIO()
        header = list(rows[0].keys()) if rows else []
        out.write(",".join(header) + "\n")
        for row in rows:
            out.write(",".join(str(row[h]) for h in header) + "\n")
        _emit(out.getvalue(), args.out)
    else:
        _emit(json.dumps(rows, indent=2, sort_keys=True), args.out)
    return _EXIT_PASS if all_ok else _EXIT_FAIL


def cmd_measures(args) -> int:
    spec = _load_spec(_read_spec(args.spec))
    out = io.StringIO()
    if spec.kind == "measure":
        m = spec.measure
        verdict = positivity_check(m)
        out.write("t,density,cdf\n")
        for t, d, c in zip(m.grid, m.density, m.cdf):
            out.write(
                f"{mpmath.nstr(t, 30)},{mpmath.nstr(d, 30)},{mpmath.nstr(c, 30)}\n"
            )
        out.write(f"verdict,measure,{'pass' if verdict.passed else 'fail'}\n")
        _emit(out.getvalue(), args.out)
        return _EXIT_PASS if verdict.passed else _EXIT_FAIL
    if spec.kind not in ("series", "hyper"):
        raise SpecParseError("measures needs a series, hyper or measure spec")
    series = spec.series
    k = args.k
    grid = default_measure_grid(mpf(args.grid_t), args.grid_m)

    from .am_series import derivative_series, eval_phi

    sigmas = [sigma_j(series, j, grid) for j in range(0, k)]
    stepped = mu_step(sigmas[-1], k)
    verdicts = [positivity_check(m) for m in sigmas] + [positivity_check(stepped)]

    header = ["t"]
    for j in range(k):
        header += [f"sigma{j}_density", f"sigma{j}_cdf", f"oracle{j}_cdf"]
    header += [f"mu{k}_density", f"oracle_mu{k}_density"]
    out.write(",".join(header) + "\n")
    oracle_top = derivative_series(series, k)
    oracles = [derivative_series(series, j) for j in range(k)]
    for i, t in enumerate(grid):
        row = [mpmath.nstr(t, 30)]
        for j in range(k):
            row.append(mpmath.nstr(sigmas[j].density[i], 30))
            row.append(mpmath.nstr(sigmas[j].cdf[i], 30))
            row.append(mpmath.nstr(t ** j * eval_phi(oracles[j], t).value, 30))
        row.append(mpmath.nstr(stepped.density[i], 30))
        row.append(mpmath.nstr(t ** k * eval_phi(oracle_top, t).value, 30))
        out.write(",".join(row) + "\n")
    names = [f"sigma_{j}" for j in range(k)] + [f"mu_{k}"]
    ok = True
    for name, verdict in zip(names, verdicts):
        out.write(f"verdict,{name},{'pass' if verdict.passed else 'fail'}\n")
        ok = ok and verdict.passed
    _emit(out.getvalue(), args.out)
    return _EXIT_PASS if ok else _EXIT_FAIL


def cmd_selftest(args) -> int:
    results = acceptance.run_all(seed=args.seed, quick=args.quick, stream=sys.stdout)
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return _EXIT_PASS if passed == len(results) else _EXIT_FAIL


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="amlaplace",
        description="Checks and transforms for nonnegative-coefficient "
        "series and their inverse-power images.",
    )
    parser.add_argument("--prec", type=int, default=256,
                        help="working precision in bits (default 256)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_classify = sub.add_parser("classify", help="run the sign-condition battery")
    p_classify.add_argument("--spec", default="-", help="JSON spec file or - for stdin")
    p_classify.add_argument("--kmax", type=int, default=6)
    p_classify.add_argument("--depth", type=int, default=8,
                            help="derivative sampling depth for the monotonicity condition")
    p_classify.add_argument("--grid", default=None,
                            help="comma-separated x values (default: built-in geometric grid)")
    p_classify.add_argument("--order", type=int, default=None,
                            help="also test complete monotonicity of this order")
    p_classify.add_argument("--format", choices=("json", "csv"), default="json")
    p_classify.add_argument("--out", default=None)
    p_classify.set_defaults(func=cmd_classify)

    p_transform = sub.add_parser("transform", help="series vs quadrature table")
    p_transform.add_argument("--spec", default="-")
    p_transform.add_argument("--x", default="0.5,1,2,10")
    p_transform.add_argument("--quad-tol", default="1e-25")
    p_transform.add_argument("--format", choices=("json", "csv"), default="json")
    p_transform.add_argument("--out", default=None)
    p_transform.set_defaults(func=cmd_transform)

    p_measures = sub.add_parser("measures", help="measure chain CSV")
    p_measures.add_argument("--spec", default="-")
    p_measures.add_argument("--k", type=int, default=2)
    p_measures.add_argument("--grid-t", default="40")
    p_measures.add_argument("--grid-m", type=int, default=2048)
    p_measures.add_argument("--out", default=None)
    p_measures.set_defaults(func=cmd_measures)

    p_selftest = sub.add_parser("selftest", help="run the acceptance battery")
    p_selftest.add_argument("--quick", action="store_true")
    p_selftest.add_argument("--seed", type=int, default=acceptance.DEFAULT_SEED)
    p_selftest.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    use_bits(args.prec)
    try:
        return args.func(args)
    except SpecParseError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return _EXIT_ERROR
    except AmlaplaceError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _EXIT_ERROR


def console_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
