"""Command-line entry point.

Exit codes: 0 success, 1 a property check failed, 2 usage error.
Every run writes its resolved configuration next to the report, so
``--config <out>/<command>.config.json`` repeats it exactly.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import embed as emb
from .errors import QuasigenError
from .genfunc import (
    GeneralizedFunctionRep,
    classify,
    cutfourier_bound,
    fourier_char_bound,
    gorny_check,
    gorny_corpus,
)
from .io import read_rep, to_jsonable, write_json, write_rep
from .mollifier import CutoffFamily, build_mollifier, verify_decay
from .specgrid import Grid, from_samples
from .weights import (
    assoc,
    check_conditions,
    compare,
    counting_function,
    make_weight_sequence,
)

EXIT_OK, EXIT_VERDICT, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: list[str]
    params: dict[str, Any]
    seed: int = 0
    jobs: int | None = None
    out: str | None = None
    extra: dict[str, Any] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# argument parsing helpers


def parse_range(text: str) -> list[int]:
    """``"1..64"``, ``"1..64:2"`` (step) or ``"4,16"``."""
    try:
        if ".." in text:
            body, _, step = text.partition(":")
            a, b = body.split("..")
            return list(range(int(a), int(b) + 1, int(step or 1)))
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"bad index range {text!r}") from None


def parse_interval(text: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"bad interval {text!r}; expected a,b") from None
    if not a < b:
        raise UsageError(f"empty interval {text!r}")
    return a, b


def parse_grid(text: str) -> Grid:
    try:
        kv = dict(item.split("=") for item in text.split(","))
        return Grid(float(kv.get("X", 8.0)), int(kv.get("N", 4096)), int(kv.get("d", 1)))
    except (ValueError, TypeError):
        raise UsageError(f"bad grid {text!r}; expected X=8,N=4096") from None


def parse_seq(text: str):
    """``factorial``, ``gevrey:S``, ``product:RULE`` or a JSON file with a weight spec."""
    if text.endswith(".json"):
        return make_weight_sequence(json.loads(Path(text).read_text()))
    kind, _, arg = text.partition(":")
    if kind == "factorial":
        return make_weight_sequence("factorial")
    if kind == "gevrey":
        return make_weight_sequence({"kind": "gevrey", "s": float(arg or 2)})
    if kind == "product":
        return make_weight_sequence({"kind": "product", "base": "factorial", "rj": {"rule": arg or "log"}})
    raise UsageError(f"unknown sequence {text!r}")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"bad number list {text!r}") from None


# ---------------------------------------------------------------------------
# commands; each returns (report, ok)


def cmd_weights_check(a, cfg):
    W = parse_seq(a.seq)
    rpt = check_conditions(W, a.depth)
    return {"sequence": W.to_spec(), "report": rpt}, bool(rpt.m1.holds and rpt.m2.holds)


def cmd_weights_assoc(a, cfg):
    W = parse_seq(a.seq)
    ts = np.asarray(_floats(a.t))
    return {"sequence": W.to_spec(), "t": ts, "M": assoc(W, ts), "m": counting_function(W, ts)}, True


def cmd_weights_compare(a, cfg):
    W1, W2 = parse_seq(a.seq), parse_seq(a.other)
    return {"first": W1.to_spec(), "second": W2.to_spec(), "comparison": compare(W1, W2, a.depth)}, True


def _family(a) -> CutoffFamily:
    return CutoffFamily(a.r / 2, a.r)


def cmd_mollifier_build(a, cfg):
    grid = parse_grid(a.grid)
    M = build_mollifier(parse_range(a.n), grid, _family(a), jobs=cfg.jobs)
    certs = {c: verify_decay(M, c) for c in _floats(a.c)}
    if cfg.out:
        rep = GeneralizedFunctionRep(grid, M.n_values, M.spectra, M.family.support * M.n_values)
        write_rep(Path(cfg.out) / "mollifier", rep, {"family": {"plateau": M.family.plateau, "support": M.r}})
    return {"grid": grid.to_spec(), "n_values": M.n_values, "certificates": certs}, all(
        c.confirmed for c in certs.values()
    )


def cmd_mollifier_verify_decay(a, cfg):
    grid = parse_grid(a.grid)
    M = build_mollifier(parse_range(a.n), grid, _family(a), jobs=cfg.jobs)
    cert = verify_decay(M, a.c_value, a.max_order)
    return {"certificate": cert}, cert.confirmed


def cmd_embed(a, cfg):
    spec = json.loads(Path(a.functional).read_text())
    f = emb.CompactFunctional.from_json(spec)
    grid = parse_grid(a.grid)
    M = build_mollifier(parse_range(a.n), grid, jobs=cfg.jobs)
    rep = emb.embed(f, M)
    if cfg.out:
        write_rep(Path(cfg.out) / "embedded", rep, {"functional": spec})
    return {"functional": spec, "n_values": rep.n_values, "bands": rep.bands, "magnitudes": rep.magnitudes()}, True


def _input_rep(a) -> GeneralizedFunctionRep:
    if not a.input:
        raise UsageError("--input DIR is required")
    path = Path(a.input)
    if not (path / "rep.json").exists():
        raise UsageError(f"--input {path}: no rep.json found")
    return read_rep(path)


def cmd_classify(a, cfg):
    rep = _input_rep(a)
    rpt = classify(rep, parse_interval(a.K), a.mode, max_order=a.order)
    if a.json:
        write_json(a.json, {"report": rpt})
    return {"report": rpt}, True


def cmd_support(a, cfg):
    rep = _input_rep(a)
    region = parse_interval(a.region) if a.region else None
    est = emb.support(rep, a.rho, region)
    return {"support": est}, True


def cmd_gorny(a, cfg):
    if a.corpus != "default":
        raise UsageError(f"unknown corpus {a.corpus!r}")
    rows = []
    for case in gorny_corpus(cfg.seed, a.size):
        r = gorny_check(case.f, case.K, case.Kp, case.k, case.m)
        rows.append({"label": case.label, "K": case.K, "Kp": case.Kp, "k": case.k, "m": case.m,
                     "lhs": r.lhs, "rhs": r.rhs, "holds": r.holds})
    violations = sum(not r["holds"] for r in rows)
    return {"seed": cfg.seed, "cases": rows, "violations": violations}, violations == 0


def cmd_fourier_bound(a, cfg):
    grid = parse_grid(a.grid)
    out: dict[str, Any] = {}
    ok = True
    if a.kind in ("char", "both"):
        M = build_mollifier(parse_range(a.n), grid, jobs=cfg.jobs)
        rows = {int(n): fourier_char_bound(M.theta(int(n)), a.h, a.max_order) for n in M.n_values}
        ok &= all(r.holds for r in rows.values())
        out["char"] = rows
    if a.kind in ("cut", "both"):
        fam = CutoffFamily()
        # band-limited windows: the sampled sine is not periodic on the box
        phis = {"1": (np.ones_like(grid.x), 0.0), "sin": (np.sin(grid.x), 1.0)}
        rows = {}
        for name, (vals, band) in phis.items():
            phi = from_samples(grid, vals, band=band)
            for n in parse_range(a.cut_n):
                rows[f"{name}/{n}"] = cutfourier_bound(fam.member(n), phi, a.h)
        ok &= all(r.holds for r in rows.values())
        out["cut"] = rows
    return out, ok


def cmd_extend(a, cfg):
    omega, omega_p = parse_interval(a.omega), parse_interval(a.omega_prime)
    if a.input:
        rep = _input_rep(a)
    else:
        rep = GeneralizedFunctionRep.from_samples(
            parse_grid(a.grid), parse_range(a.n), lambda n, x: n * np.exp(-(x**2))
        )
    K = parse_interval(a.K) if a.K else omega_p
    ext = emb.soft_extend(rep, omega, omega_p, K, jobs=cfg.jobs)
    G = ext.rep.grid
    mod = classify(ext.rep, (-G.X, G.X), "moderate")
    if cfg.out:
        write_rep(Path(cfg.out) / "extended", ext.rep)
    report = {
        "a": ext.a, "h": ext.h, "H": ext.H, "p_values": ext.p_values,
        "lowpass_inactive": ext.lowpass_inactive, "defect": ext.defect, "moderate": mod,
    }
    return report, bool(ext.defect.confirmed and mod.verdict)


def cmd_demo(a, cfg):
    if a.which != "impossibility":
        raise UsageError(f"unknown demo {a.which!r}")
    r = emb.impossibility_demo(n_values=parse_range(a.n))
    print(r.banner, file=sys.stderr)
    return {"demo": r}, bool(r.lower > 0 and r.pairing_below_tol is not False)


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message: str):  # usage errors name the offending flag; exit 2
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    def globals_(suppress: bool) -> argparse.ArgumentParser:
        # sub-level copies must not reset values given before the subcommand
        g = _Parser(add_help=False)
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        g.add_argument("--config", default=d(None), help="JSON file with option defaults")
        g.add_argument("--out", default=d(None), help="output directory")
        g.add_argument("--jobs", type=int, default=d(os.cpu_count()))
        g.add_argument("--seed", type=int, default=d(0))
        return g

    common = globals_(True)
    p = _Parser(prog="quasigen", parents=[globals_(False)], description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(sp, name: str, func: Callable, **kw):
        q = sp.add_parser(name, parents=[common], **kw)
        q.set_defaults(func=func)
        return q

    w = sub.add_parser("weights", parents=[common]).add_subparsers(dest="action", required=True, parser_class=_Parser)
    q = add(w, "check", cmd_weights_check)
    q.add_argument("--seq", default="factorial")
    q.add_argument("--depth", type=int, default=128)
    q = add(w, "assoc", cmd_weights_assoc)
    q.add_argument("--seq", default="factorial")
    q.add_argument("--t", default="1,2,5,10,20,50")
    q = add(w, "compare", cmd_weights_compare)
    q.add_argument("--seq", default="gevrey:2")
    q.add_argument("--other", default="factorial")
    q.add_argument("--depth", type=int, default=128)

    m = sub.add_parser("mollifier", parents=[common]).add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name, func in (("build", cmd_mollifier_build), ("verify-decay", cmd_mollifier_verify_decay)):
        q = add(m, name, func)
        q.add_argument("--n", default="1..64")
        q.add_argument("--grid", default="X=8,N=4096")
        q.add_argument("--r", type=float, default=2.0)
        if name == "build":
            q.add_argument("--c", default="1.0", help="comma-separated decay thresholds")
        else:
            q.add_argument("--c", dest="c_value", type=float, default=1.0)
            q.add_argument("--max-order", type=int, default=0)

    q = add(sub, "embed", cmd_embed)
    q.add_argument("--functional", required=True)
    q.add_argument("--n", default="1..64")
    q.add_argument("--grid", default="X=8,N=4096")

    q = add(sub, "classify", cmd_classify)
    q.add_argument("--input")
    q.add_argument("--K", default="-1,1")
    q.add_argument("--mode", default="moderate",
                   choices=["moderate", "negligible", "negligible-zeroth", "negligible-full"])
    q.add_argument("--order", type=int, default=20)
    q.add_argument("--json")

    q = add(sub, "support", cmd_support)
    q.add_argument("--input")
    q.add_argument("--rho", type=float, default=0.25)
    q.add_argument("--region")

    q = add(sub, "gorny", cmd_gorny)
    q.add_argument("--corpus", default="default")
    q.add_argument("--size", type=int, default=50)

    q = add(sub, "fourier-bound", cmd_fourier_bound)
    q.add_argument("--kind", choices=["char", "cut", "both"], default="both")
    q.add_argument("--n", default="4,16")
    q.add_argument("--cut-n", default="1..8")
    q.add_argument("--h", type=float, default=1.0)
    q.add_argument("--max-order", type=int, default=12)
    q.add_argument("--grid", default="X=8,N=4096")

    q = add(sub, "extend", cmd_extend)
    q.add_argument("--omega", default="-2,2")
    q.add_argument("--omega-prime", default="-1,1")
    q.add_argument("--K")
    q.add_argument("--input")
    q.add_argument("--n", default="1..64")
    q.add_argument("--grid", default="X=8,N=4096")

    q = add(sub, "demo", cmd_demo)
    q.add_argument("which", choices=["impossibility"])
    q.add_argument("--n", default="8..64")
    return p


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        data = json.loads(Path(known.config).read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"--config {known.config}: {exc}") from None
    params = data.get("params", data)
    for key in ("seed", "jobs"):
        if key in data:
            params.setdefault(key, data[key])
    stack = [parser]
    while stack:
        ps = stack.pop()
        ps.set_defaults(**{k.replace("-", "_"): v for k, v in params.items()})
        for act in ps._actions:
            if isinstance(act, argparse._SubParsersAction):
                stack.extend(act.choices.values())


_NEG_LIST = re.compile(r"^-\d[\d.eE+-]*(,[-\d.eE+]+)+$")


def _glue_negative_lists(argv: list[str]) -> list[str]:
    """``--K -1,1`` becomes ``--K=-1,1`` so argparse does not read a flag."""
    out: list[str] = []
    for tok in argv:
        if _NEG_LIST.match(tok) and out and out[-1].startswith("--") and "=" not in out[-1]:
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def dispatch(argv: Sequence[str] | None = None) -> int:
    argv = _glue_negative_lists(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        command = [args.command] + ([args.action] if getattr(args, "action", None) else [])
        skip = {"func", "command", "action", "config", "out", "jobs", "seed"}
        params = {k: v for k, v in vars(args).items() if k not in skip}
        cfg = RunConfig(command, params, args.seed, args.jobs, args.out)
        report, ok = args.func(args, cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuasigenError, ValueError, TypeError, KeyError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    payload = {"command": " ".join(command), "ok": ok, **report}
    if cfg.out:
        stem = "-".join(command)
        write_json(Path(cfg.out) / f"{stem}.json", payload)
        write_json(Path(cfg.out) / f"{stem}.config.json",
                   {"params": params, "seed": cfg.seed}, timestamp=False)
    print(json.dumps(to_jsonable({"command": payload["command"], "ok": ok}), sort_keys=True))
    return EXIT_OK if ok else EXIT_VERDICT


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
