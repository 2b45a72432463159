"""Command line: single evaluations, randomised identity sweeps, region scans
and rapidity solving.

Complex numbers are written a+bi / a-bi on input and output; JSON carries
them as [re, im].  Exit codes: 0 all checks pass, 1 a verification failed,
2 usage or domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import chiral_potts as cp
from .branched import delta, p0, p_func, sector_index
from .context import DEFAULT_CONFIG, UnityContext, as_complex
from .errors import CyclicHypError
from .series import HypSpec, is_cyclic, is_saalschutz, phi_condition, phi_eval
from .summation import (
    SummationInput,
    classify_region,
    closed_form,
    derived_quantities,
    phase_exponent,
)
from .sweeps import (
    SAMPLERS,
    SCHEMA_VERSION,
    SKIPPABLE,
    SweepConfig,
    Summary,
    allowed_phases,
    encode,
    run_sweep,
    summation_point,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def parse_complex(text: str) -> complex:
    """Parse 'a+bi', 'a-bi', 'a', 'bi', 'i', '-i' (Python's 'j' also accepted)."""
    s = text.strip().replace(" ", "").replace("j", "i")
    if not s:
        raise argparse.ArgumentTypeError("empty complex number")
    try:
        if s.endswith("i"):
            body = s[:-1]
            # split off the imaginary part at the last sign not inside an exponent
            cut = None
            for pos in range(len(body) - 1, -1, -1):
                if body[pos] in "+-" and (pos == 0 or body[pos - 1] not in "eE"):
                    cut = pos
                    break
            if cut is None:
                return complex(0, float(body) if body else 1.0)
            real = body[:cut]
            imag = body[cut:]
            if imag in ("+", "-"):
                imag += "1"
            return complex(float(real) if real else 0.0, float(imag))
        return complex(float(s), 0.0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def format_complex(z) -> str:
    """Shortest round-tripping decimals, e.g. 0.3-0.1i."""
    z = as_complex(z)
    sign = "-" if math.copysign(1.0, z.imag) < 0 else "+"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


def parse_n_range(text: str) -> tuple:
    """'3', '2..7' or '2,3,5'."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            values = tuple(range(int(lo), int(hi) + 1))
        else:
            values = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad N range {text!r}") from None
    if not values or min(values) < 2:
        raise argparse.ArgumentTypeError("N must be >= 2")
    return values


def _envelope(command: str, body: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "numeric_config": DEFAULT_CONFIG.as_dict(), **body}


def _dump(obj) -> str:
    return json.dumps(encode(obj), sort_keys=False)


class _Sink:
    """stdout or --output file."""

    def __init__(self, path):
        self.path = path
        self.fh = open(path, "w", newline="") if path else sys.stdout

    def write_line(self, text: str):
        self.fh.write(text + "\n")

    def close(self):
        if self.path:
            self.fh.close()
        else:
            self.fh.flush()


# ---- eval --------------------------------------------------------------------


def _eval_series(args, ctx):
    alphas = args.alpha or []
    betas = args.beta or []
    if len(alphas) != len(betas) or not alphas:
        raise ValueError("give the same non-zero number of --alpha and --beta")
    meta = {}
    if args.z is not None:
        z = args.z
    elif len(alphas) == 1:
        k = args.k or 0
        z = complex(ctx.root(k)) * complex(delta(betas[0], ctx)) / complex(delta(alphas[0], ctx))
        meta["k"] = k % ctx.N
    else:
        z = 1 + 0j
        for a, b in zip(alphas, betas):
            z *= complex(delta(b, ctx)) / complex(delta(a, ctx))
        z *= complex(ctx.root(args.k or 0))
        meta["k"] = (args.k or 0) % ctx.N
    spec = HypSpec(alphas, betas, z, ctx)
    value = complex(phi_eval(spec))
    cyc = is_cyclic(spec)
    saal = is_saalschutz(spec)
    meta.update(
        {
            "z": z,
            "cyclic": cyc.ok,
            "cyclic_residual": cyc.residual,
            "saalschutz": saal.ok,
            "condition": phi_condition(spec),
            "sectors_alpha": [sector_index(a, ctx) for a in alphas],
            "sectors_beta": [sector_index(b, ctx) for b in betas],
        }
    )
    return value, meta


def _eval_closed(args, ctx):
    if not args.alpha or not args.beta or len(args.alpha) != 1 or len(args.beta) != 1:
        raise ValueError("closed-form needs exactly one --alpha and one --beta")
    inp = SummationInput.from_values(args.alpha[0], args.beta[0], args.k or 0, ctx)
    d = derived_quantities(inp)
    tag = classify_region(inp)
    value = closed_form(inp)
    point = summation_point(args.alpha[0], args.beta[0], args.k or 0, ctx, ctx.config.identity_rtol)
    meta = {
        "m": d.m,
        "n": d.n,
        "k": d.k,
        "gamma": d.gamma,
        "delta": d.delta_q,
        "epsilon": d.epsilon,
        "region": tag.label,
        "phase_exponent": phase_exponent(tag, d.m, d.n, d.k, ctx.N),
        "direct_sum": point["direct"],
        "relative_residual": point["residual"],
        "oracle_phase": point["phase_oracle"],
    }
    return value, meta


def _eval_weight(args, ctx):
    if args.kprime is None:
        raise ValueError("weight needs --kprime")
    moduli = cp.Moduli.from_kprime(args.kprime)
    p = cp.solve_rapidity(moduli, args.tp, ctx, cp.LambdaChoice(args.choice))
    q = cp.solve_rapidity(moduli, args.tq, ctx, cp.LambdaChoice(args.choice))
    if args.n is None:
        raise ValueError("weight needs --n")
    f = cp.weight_W if args.weight_kind == "W" else cp.weight_Wbar
    value = complex(f(p, q, args.n))
    return value, {"kind": args.weight_kind, "n": args.n, "kprime": args.kprime, "p": _point_json(p), "q": _point_json(q)}


def _eval_p(args, ctx):
    z = args.z if args.z is not None else 0j
    value = complex(p_func(z, ctx))
    meta = {"z": z}
    for name, fn in (("p0", p0), ("delta", delta)):
        try:
            meta[name] = complex(fn(z, ctx))
        except CyclicHypError as exc:
            meta[name] = f"undefined: {exc}"
    return value, meta


def _eval_order(args, ctx):
    if args.kprime is None or args.n is None:
        raise ValueError("order-param needs --n and --kprime")
    value = cp.order_parameter(args.n, ctx.N, args.kprime)
    return value, {"n": args.n, "exponent": args.n * (ctx.N - args.n) / (2 * ctx.N**2), "kprime": args.kprime}


_EVAL = {
    "series": _eval_series,
    "closed-form": _eval_closed,
    "weight": _eval_weight,
    "p": _eval_p,
    "order-param": _eval_order,
}


def cmd_eval(args) -> int:
    ctx = UnityContext(args.N)
    value, meta = _EVAL[args.kind](args, ctx)
    sink = _Sink(args.output)
    try:
        if args.json:
            sink.write_line(_dump(_envelope("eval", {"kind": args.kind, "N": args.N, "value": value, "meta": meta})))
        else:
            if isinstance(value, float):
                sink.write_line(f"{value!r}")
            else:
                sink.write_line(format_complex(value))
            for key, v in meta.items():
                sink.write_line(f"  {key}: {_human(v)}")
    finally:
        sink.close()
    return EXIT_OK


def _human(v) -> str:
    if isinstance(v, complex):
        return format_complex(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_human(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_human(x)}" for k, x in v.items()) + "}"
    return str(v)


def _point_json(p: cp.RapidityPoint) -> dict:
    return {
        "x": complex(p.x),
        "y": complex(p.y),
        "mu": complex(p.mu),
        "lambda": complex(p.lam),
        "t": complex(p.t),
        "choice": p.choice.value,
        "indices": list(p.indices),
    }


# ---- verify ------------------------------------------------------------------


def cmd_verify(args) -> int:
    cfg = SweepConfig(
        args.N,
        args.samples,
        args.seed,
        args.tolerance,
        (args.min_mag, args.max_mag),
    )
    summary = Summary(args.identity)
    sink = _Sink(args.output)
    try:
        if args.json and not args.summary_only:
            sink.write_line(_dump(_envelope("verify", {"type": "header", "identity": args.identity, "config": _cfg_json(cfg)})))
        for rep in run_sweep(args.identity, cfg, args.jobs):
            summary.add(rep)
            if args.json and not args.summary_only:
                sink.write_line(_dump(rep.to_json()))
            elif not args.json and not rep.passed and not args.summary_only:
                sink.write_line(f"FAIL {rep.identity} N={rep.N} #{rep.index} residual={rep.residual:.3e}")
        body = summary.to_json()
        if args.json:
            sink.write_line(_dump(_envelope("verify", {**body, "config": _cfg_json(cfg)})))
        else:
            status = "PASS" if summary.ok else "FAIL"
            sink.write_line(
                f"{status} {args.identity}: {summary.passed}/{summary.total} passed, "
                f"max residual {summary.max_residual:.3e}, {summary.rejected} rejected draws, "
                f"{summary.escalated} escalated to extended precision"
            )
            for N, slot in body["per_N"].items():
                sink.write_line(f"  N={N}: {slot['samples']} samples, {slot['failures']} failures, max residual {slot['max_residual']:.3e}")
            for region, slot in body.get("per_region", {}).items():
                sink.write_line(f"  region {region}: {slot['samples']} samples, {slot['failures']} failures")
            if "phase_disagreements" in body:
                sink.write_line(
                    f"  classifier/oracle phase disagreements: {body['phase_disagreements']}, "
                    f"phases outside the allowed set: {body['phase_not_allowed']}"
                )
    finally:
        sink.close()
    return EXIT_OK if summary.ok else EXIT_FAIL


def _cfg_json(cfg: SweepConfig) -> dict:
    return {
        "N": list(cfg.n_values),
        "samples": cfg.samples,
        "seed": cfg.seed,
        "tolerance": cfg.tolerance,
        "magnitude": list(cfg.magnitude),
    }


# ---- scan-regions --------------------------------------------------------------


def _axis(lo: float, hi: float, steps: int) -> list:
    if steps == 1:
        return [lo]
    return [lo + (hi - lo) * i / (steps - 1) for i in range(steps)]


def scan_regions(alpha: complex, k: int, ctx: UnityContext, re_range, im_range, steps: int) -> list:
    """Rows (beta, beta^N, region, classifier phase, oracle phase, agree, status)."""
    rows = []
    N = ctx.N
    im_pos = (alpha**N).imag > 0
    for im in reversed(_axis(*im_range, steps)):
        for re_ in _axis(*re_range, steps):
            beta = complex(re_, im)
            row = {"beta": beta, "betaN": beta**N}
            try:
                r = summation_point(alpha, beta, k, ctx, ctx.config.identity_rtol)
            except SKIPPABLE as exc:
                row.update(region="", phase_classifier=None, phase_oracle=None, agree=None, status=f"skipped: {type(exc).__name__}")
            else:
                ok_phase = r["phase_oracle"] in allowed_phases(im_pos, r["m"], r["n"], r["k"], N)
                row.update(
                    region=r["region"],
                    phase_classifier=r["phase_classifier"],
                    phase_oracle=r["phase_oracle"],
                    agree=r["agree"] and ok_phase,
                    status="ok",
                )
            rows.append(row)
    return rows


def cmd_scan(args) -> int:
    ctx = UnityContext(args.N)
    if args.N > 1 and (args.alpha**args.N).imag == 0:
        raise ValueError("Im alpha^N = 0: the region picture is undefined")
    rows = scan_regions(args.alpha, args.k, ctx, (args.re_min, args.re_max), (args.im_min, args.im_max), args.steps)
    disagreements = sum(1 for r in rows if r["agree"] is False)
    skipped = sum(1 for r in rows if r["status"] != "ok")
    counts = {}
    for r in rows:
        if r["status"] == "ok":
            counts[r["region"]] = counts.get(r["region"], 0) + 1
    sink = _Sink(args.output)
    try:
        if args.json:
            sink.write_line(
                _dump(
                    _envelope(
                        "scan-regions",
                        {
                            "N": args.N,
                            "alpha": args.alpha,
                            "k": args.k,
                            "rows": rows,
                            "region_counts": {k: counts[k] for k in sorted(counts)},
                            "skipped": skipped,
                            "disagreements": disagreements,
                        },
                    )
                )
            )
        else:
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["beta_re", "beta_im", "betaN_re", "betaN_im", "region", "phase_classifier", "phase_oracle", "agree", "status"])
            for r in rows:
                w.writerow(
                    [
                        repr(r["beta"].real),
                        repr(r["beta"].imag),
                        repr(r["betaN"].real),
                        repr(r["betaN"].imag),
                        r["region"],
                        "" if r["phase_classifier"] is None else r["phase_classifier"],
                        "" if r["phase_oracle"] is None else r["phase_oracle"],
                        "" if r["agree"] is None else str(r["agree"]).lower(),
                        r["status"],
                    ]
                )
            sink.fh.write(buf.getvalue())
    finally:
        sink.close()
    return EXIT_OK if disagreements == 0 else EXIT_FAIL


# ---- rapidity ----------------------------------------------------------------


def cmd_rapidity(args) -> int:
    ctx = UnityContext(args.N)
    moduli = cp.Moduli.from_kprime(args.kprime)
    p = cp.solve_rapidity(moduli, args.t, ctx, cp.LambdaChoice(args.choice), args.x_index, args.mu_index)
    res = p.residuals()
    ok = max(res.values()) < ctx.config.identity_rtol
    sink = _Sink(args.output)
    try:
        if args.json:
            sink.write_line(_dump(_envelope("rapidity", {"N": args.N, "kprime": args.kprime, "point": _point_json(p), "residuals": res, "pass": ok})))
        else:
            for key, v in _point_json(p).items():
                sink.write_line(f"{key}: {_human(v)}")
            for key, v in res.items():
                sink.write_line(f"residual {key}: {v:.3e}")
    finally:
        sink.close()
    return EXIT_OK if ok else EXIT_FAIL


# ---- parser --------------------------------------------------------------------


def _common(p: argparse.ArgumentParser):
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--output", metavar="PATH", help="write to PATH instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cyclichyp",
        description="Cyclic hypergeometric functions at roots of unity and the chiral Potts model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate one quantity")
    ev.add_argument("kind", choices=sorted(_EVAL))
    ev.add_argument("--N", type=int, required=True)
    ev.add_argument("--alpha", type=parse_complex, action="append", help="repeat for several parameters")
    ev.add_argument("--beta", type=parse_complex, action="append")
    ev.add_argument("--z", type=parse_complex)
    ev.add_argument("--k", type=int)
    ev.add_argument("--n", type=int)
    ev.add_argument("--kprime", type=float)
    ev.add_argument("--tp", type=parse_complex, default=0.3 + 0.2j)
    ev.add_argument("--tq", type=parse_complex, default=-0.4 + 0.5j)
    ev.add_argument("--choice", choices=["inside", "outside"], default="inside")
    ev.add_argument("--weight-kind", choices=["W", "Wbar"], default="W")
    _common(ev)
    ev.set_defaults(func=cmd_eval)

    ver = sub.add_parser("verify", help="randomised identity sweep")
    ver.add_argument("identity", choices=sorted(SAMPLERS))
    ver.add_argument("--N", type=parse_n_range, default=(3,), help="e.g. 3, 2..7 or 2,3,5")
    ver.add_argument("--samples", type=int, default=100)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--tolerance", type=float, default=1e-10)
    ver.add_argument("--min-mag", type=float, default=0.1)
    ver.add_argument("--max-mag", type=float, default=3.0)
    ver.add_argument("--jobs", type=int, default=1, help="worker processes; output order is unaffected")
    ver.add_argument("--summary-only", action="store_true")
    _common(ver)
    ver.set_defaults(func=cmd_verify)

    sc = sub.add_parser("scan-regions", help="classifier against oracle phase on a beta grid")
    sc.add_argument("--N", type=int, required=True)
    sc.add_argument("--alpha", type=parse_complex, required=True)
    sc.add_argument("--k", type=int, default=0)
    sc.add_argument("--re-min", type=float, default=-2.0)
    sc.add_argument("--re-max", type=float, default=2.0)
    sc.add_argument("--im-min", type=float, default=-2.0)
    sc.add_argument("--im-max", type=float, default=2.0)
    sc.add_argument("--steps", type=int, default=41)
    _common(sc)
    sc.set_defaults(func=cmd_scan)

    ra = sub.add_parser("rapidity", help="solve the curve for given t")
    ra.add_argument("--N", type=int, required=True)
    ra.add_argument("--kprime", type=float, required=True)
    ra.add_argument("--t", type=parse_complex, required=True)
    ra.add_argument("--choice", choices=["inside", "outside"], default="inside")
    ra.add_argument("--x-index", type=int, default=0)
    ra.add_argument("--mu-index", type=int, default=0)
    _common(ra)
    ra.set_defaults(func=cmd_rapidity)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CyclicHypError, ValueError) as exc:
        msg = {"error": type(exc).__name__, "message": str(exc)}
        if getattr(args, "json", False):
            print(_dump(_envelope(args.command, msg)), file=sys.stderr)
        else:
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
