"""Command-line front end.

Every command echoes its full configuration in the output header, so a run
can be reproduced from its own output.  Exit codes: 2 for unparseable norm
or alpha specs, 3 when a comparison stays ambiguous, 4 when the precision
cap is exhausted.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import exactnum as en
from .critdet import OCT2_DELTA, _same_polygon, critdet, critical_determinant
from .dynamics import SCHEMA_VERSION, label_grid, simulate, _CODES
from .fcf import CapExceeded, munu, s_expand
from .norms import INF, NormParseError, Octagon1, Octagon2, PNorm, PreconditionViolated, parse_norm
from .regcf import AlphaParseError, PrefixExhausted, RationalAlpha, parse_alpha
from .spectrum import D_F, delta_limsup, min_delta_p

EXIT_PARSE, EXIT_AMBIGUOUS, EXIT_PRECISION = 2, 3, 4
SEARCH_ERR = 1e-9  # stated accuracy of numerically searched constants
OCT_MIN_DELTA = OCT2_DELTA  # both octagons share the minimum (3*sqrt2 + 2)/8


@dataclass
class RunConfig:
    command: str
    norm: str
    alpha: str | None = None
    terms: int | None = None
    grid: int | None = None
    samples: int | None = None
    seed: int | None = None
    bins: int | None = None
    threshold: str | None = None
    workers: int | None = None
    max_bits: int = en.DEFAULT_MAX_BITS
    format: str = "json"
    out: str | None = None

    def echo(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if v is not None and k != "out"}
        return d


def fmt(x) -> str:
    """Exact string, certified enclosure, or a searched float with its stated accuracy."""
    if isinstance(x, (float, np.floating)):
        return en.format_approx(float(x), SEARCH_ERR)
    return en.format_scalar(x)


def _point(P) -> list[str]:
    return [fmt(c) for c in P]


# ---------------------------------------------------------------------------
# commands


def cmd_expand(cfg: RunConfig) -> tuple[list[str], list[list]]:
    F, alpha = parse_norm(cfg.norm), parse_alpha(cfg.alpha)
    cf = s_expand(F, alpha, cfg.terms)
    Delta = critical_determinant(F)
    header = ["m", "n", "eps", "a", "p", "q", "nu", "mu", "delta", "singularized"]
    rows = []
    for m in range(len(cf.convergents)):
        p, q = cf.convergents[m]
        mu, nu = munu(cf, m)
        eps, a = ("", cf.a0) if m == 0 else cf.terms[m - 1]
        sing = cf.gap(m) == 2
        rows.append([m, cf.retained[m], eps, a, p, q, fmt(nu), fmt(mu), fmt(Delta * D_F(F, mu, nu)), int(sing)])
    return header, rows


def cmd_delta(cfg: RunConfig) -> dict:
    F, alpha = parse_norm(cfg.norm), parse_alpha(cfg.alpha)
    r = delta_limsup(F, alpha, cfg.terms)
    return {
        "value": fmt(r.value),
        "status": r.status,
        "limit_points": [{"mu": fmt(a), "nu": fmt(b), "delta": fmt(c)} for a, b, c in r.limit_points],
        "lower_bound": fmt(r.lower_bound),
        "terms_used": r.terms_used,
        "alpha_shift": r.alpha_shift,
        "window_max": None if r.window_max is None else fmt(r.window_max),
    }


def cmd_critdet(cfg: RunConfig) -> dict:
    F = parse_norm(cfg.norm)
    r = critdet(F)
    out = {"delta": fmt(r.delta), "pair": [_point(P) for P in r.pair], "branch": r.branch}
    exact = critical_determinant(F)
    if not isinstance(exact, float) and r.branch == "General":
        out["delta_closed_form"] = fmt(exact)
    return out


def cmd_mindelta(cfg: RunConfig) -> dict:
    F = parse_norm(cfg.norm)
    if isinstance(F, PNorm):
        p = F.p
        value = min_delta_p(p)
        if p != INF and p <= 2:
            note = "equals Delta_p; attained by alpha with eventually increasing partial quotients, e.g. cf-arith:0;2,4"
        else:
            note = "attained at alpha = (-1+sqrt5)/2 (surd:-1,1,5,2)"
        return {"value": fmt(value), "attained_at": note}
    if _same_polygon(F, Octagon1()):
        return {"value": fmt(OCT_MIN_DELTA), "attained_at": "alpha = sqrt2 - 1 (surd:-1,1,2,1)"}
    if _same_polygon(F, Octagon2()):
        return {"value": fmt(OCT_MIN_DELTA), "attained_at": "equals Delta; attained at (e-1)/(e+1) (cf-arith:0;2,4)"}
    raise PreconditionViolated("no closed form for the minimum of delta_F for this norm")


def cmd_region(cfg: RunConfig) -> tuple[list[str], list[list]]:
    F = parse_norm(cfg.norm)
    n = cfg.grid
    U, V, codes = label_grid(F, n)
    rows = [[fmt(Fraction(float(u))), fmt(Fraction(float(v))), _CODES[int(c)].value] for u, v, c in zip(U, V, codes)]
    return ["u", "v", "label"], rows


def cmd_simulate(cfg: RunConfig):
    rep = simulate(cfg.norm, cfg.samples, cfg.terms, cfg.seed, bins=cfg.bins,
                   threshold=float(Fraction(cfg.threshold)), workers=cfg.workers)
    total = sum(rep.histogram_counts)
    hist = [
        [fmt(Fraction(i, cfg.bins)), fmt(Fraction(i + 1, cfg.bins)), fmt(Fraction(c, total))]
        for i, c in enumerate(rep.histogram_counts)
    ]
    doc = {
        "norm": rep.norm,
        "samples": rep.samples,
        "terms_per_sample": rep.terms_per_sample,
        # statistical bar: three standard errors of the sample means
        "mean_delta": en.format_approx(rep.mean_delta, 3 * rep.mean_stderr),
        "mean_stderr": en.format_approx(rep.mean_stderr, rep.mean_stderr / 100),
        "histogram": hist,
        "max_delta_fraction": fmt(Fraction(round(rep.max_delta_fraction * rep.samples), rep.samples)),
        "threshold": cfg.threshold,
        "seed": rep.seed,
        "redraws": rep.redraws,
    }
    return doc, (["lo", "hi", "mass"], hist)


# ---------------------------------------------------------------------------
# output


def _csv(cfg: RunConfig, header, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# schema_version: {SCHEMA_VERSION}\n")
    buf.write(f"# config: {json.dumps(cfg.echo(), sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(cfg: RunConfig, payload) -> str:
    doc = {"schema_version": SCHEMA_VERSION, "config": cfg.echo(), "result": payload}
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def render(cfg: RunConfig) -> str:
    c = cfg.command
    if c in ("expand", "region"):
        header, rows = (cmd_expand if c == "expand" else cmd_region)(cfg)
        if cfg.format == "csv":
            return _csv(cfg, header, rows)
        return _json(cfg, [dict(zip(header, r)) for r in rows])
    if c == "simulate":
        doc, (header, rows) = cmd_simulate(cfg)
        if cfg.format == "csv":
            return _csv(cfg, header, rows)
        return _json(cfg, doc)
    payload = {"delta": cmd_delta, "critdet": cmd_critdet, "mindelta": cmd_mindelta}[c](cfg)
    if cfg.format == "csv":
        flat = [[k, json.dumps(v, ensure_ascii=False) if not isinstance(v, str) else v] for k, v in payload.items()]
        return _csv(cfg, ["field", "value"], flat)
    return _json(cfg, payload)


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="normcf", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, fmt_default="json"):
        p.add_argument("--norm", required=True, help="p:<x|inf> | oct1 | oct2 | compose(A;B;C)")
        p.add_argument("--format", choices=("csv", "json"), default=fmt_default)
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--max-bits", type=int, default=en.DEFAULT_MAX_BITS,
                       help="precision cap in bits (env NORMCF_MAX_BITS)")

    p = sub.add_parser("expand", help="norm-associated continued fraction")
    common(p, "csv")
    p.add_argument("--alpha", required=True)
    p.add_argument("--terms", type=int, default=20)

    p = sub.add_parser("delta", help="delta_F(alpha) with attainment data")
    common(p)
    p.add_argument("--alpha", required=True)
    p.add_argument("--terms", type=int, default=200)

    p = sub.add_parser("critdet", help="critical determinant of the unit ball")
    common(p)

    p = sub.add_parser("mindelta", help="least value of delta_F over irrational alpha")
    common(p)

    p = sub.add_parser("region", help="labelled grid of the natural-extension domain")
    common(p, "csv")
    p.add_argument("--grid", type=int, default=256)

    p = sub.add_parser("simulate", help="Monte-Carlo statistics of delta_F(alpha; m)")
    common(p)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--terms", type=int, default=20000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--threshold", default="99/100")
    p.add_argument("--workers", type=int, default=1)
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=ns.command, norm=ns.norm, format=ns.format, out=ns.out, max_bits=ns.max_bits)
    for k in ("alpha", "terms", "grid", "samples", "seed", "bins", "threshold", "workers"):
        if hasattr(ns, k):
            setattr(cfg, k, getattr(ns, k))
    return cfg


def run(cfg: RunConfig) -> str:
    en.DEFAULT_MAX_BITS = cfg.max_bits
    return render(cfg)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    cfg = config_from_args(ns)
    try:
        text = run(cfg)
    except (NormParseError, AlphaParseError, RationalAlpha, PreconditionViolated) as e:
        print(f"normcf: {e}", file=sys.stderr)
        return EXIT_PARSE
    except en.AmbiguousComparison as e:
        print(f"normcf: ambiguous: {e}", file=sys.stderr)
        return EXIT_AMBIGUOUS
    except (en.PrecisionExhausted, CapExceeded, PrefixExhausted) as e:
        print(f"normcf: precision exhausted: {e}", file=sys.stderr)
        return EXIT_PRECISION
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
