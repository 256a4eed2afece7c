"""Command-line entry point: ``spectral-ifs <command> [options]``.

Every command prints one JSON report to stdout (and writes it, plus any CSV
data, into ``--out`` when given). Exit codes: 0 all checks pass, 1 some
check failed, 2 bad input, 3 a resource cap was hit. Wall time goes to
stderr so that reports stay byte-identical across runs.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import cuntz, cycles, example_p, ifs, spectrum, transfer, triple as triple_mod
from .errors import CapExceededError, InvalidTripleError, SpectralIFSError

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


@dataclass
class RunConfig:
    command: str
    triple: str | None = None
    example_p: int | None = None
    depth: int | None = None
    radius: float | None = None
    mu_depth: int = 50
    grid: int = 5
    iters: int = 10
    tol: float = 1e-2
    out: str | None = None
    seed: int = 0
    extra: dict | None = None

    def validate(self) -> None:
        for name in ("depth", "radius", "mu_depth", "grid", "iters"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ValueError(f"--{name.replace('_', '-')} must be positive")
        if not 0 < self.tol < 1:
            raise ValueError("--tol must lie in (0, 1)")


def _load(cfg: RunConfig) -> triple_mod.HadamardTriple:
    if cfg.triple and cfg.example_p is not None:
        raise ValueError("give --triple or --example-p, not both")
    if cfg.triple:
        return triple_mod.load_triple(cfg.triple)
    if cfg.example_p is not None:
        return example_p.example_triple(cfg.example_p)
    raise ValueError("one of --triple or --example-p is required")


def _frac(x) -> str:
    return str(Fraction(x))


def _out_dir(cfg: RunConfig) -> Path | None:
    if cfg.out is None:
        return None
    d = Path(cfg.out)
    d.mkdir(parents=True, exist_ok=True)
    return d


def cmd_check(cfg: RunConfig) -> dict:
    T = _load(cfg)
    res: dict = {"triple": T.to_json()}
    try:
        res["expansive"] = triple_mod.is_expansive(T.R)
    except SpectralIFSError as exc:
        res["expansive"] = None
        res["expansive_error"] = str(exc)
    res["hadamard"] = triple_mod.check_hadamard(T)
    res["regularity_rank"] = triple_mod.regularity_rank(T)
    try:
        res["dual_lattice"] = [[_frac(c) for c in v] for v in triple_mod.dual_lattice(T).vectors]
    except SpectralIFSError as exc:
        res["dual_lattice"] = None
        res["dual_lattice_error"] = str(exc)
    ok = bool(res["expansive"]) and res["hadamard"]["is_hadamard"] and res["regularity_rank"] == T.d
    return {"results": res, "pass": ok}


def cmd_cycles(cfg: RunConfig) -> dict:
    T = _load(cfg)
    found = cycles.find_extreme_cycles(T)
    checks = [cycles.verify_cycle(T, C) for C in found]
    res = {"count": len(found), "cycles": [C.to_json(T) for C in found],
           "verified": [c.reason for c in checks]}
    if cfg.depth:
        oracle = cycles.cycles_by_word_enumeration(T, cfg.depth)
        short = [C for C in found if C.length <= cfg.depth]
        res["oracle_p_max"] = cfg.depth
        res["oracle_agrees"] = short == oracle
    ok = all(checks) and res.get("oracle_agrees", True)
    return {"results": res, "pass": ok}


def _parse_lattice(text: str, d: int) -> triple_mod.LatticeBasis:
    rows = [[Fraction(c) for c in r.split(",")] for r in text.split(";")]
    if len(rows) != d or any(len(r) != d for r in rows):
        raise ValueError(f"--lattice needs {d} vectors of length {d}")
    return triple_mod.LatticeBasis(tuple(map(tuple, rows)))


def cmd_spectrum(cfg: RunConfig) -> dict:
    T = _load(cfg)
    extra = cfg.extra or {}
    radius = cfg.radius if cfg.radius is not None else (None if cfg.depth else 40)
    if extra.get("lattice"):
        S = spectrum.lattice_spectrum(_parse_lattice(extra["lattice"], T.d), radius or 40)
    else:
        found = cycles.find_extreme_cycles(T)
        which = extra.get("cycle", "all")
        chosen = found if which == "all" else [found[int(which)]]
        parts = [spectrum.generate_lambda(T, C, depth=cfg.depth, radius=radius) for C in chosen]
        S = parts[0].union(*parts[1:]) if len(parts) > 1 else parts[0]
    samples = spectrum.sample_grid(T.d, cfg.grid)
    target = None
    if extra.get("target") == "harmonic" and cfg.example_p is not None:
        target = lambda t: float(example_p.harmonic_target(cfg.example_p, t))  # noqa: E731
    rep = spectrum.verification_report(T, S, samples, target, cfg.mu_depth)
    rep["provenance"] = S.provenance
    out = _out_dir(cfg)
    if out:
        S.write_csv(out / "spectrum.csv")
    ok = rep["max_completeness_defect"] < cfg.tol and rep["max_orth_defect"] < 1e-8
    return {"results": rep, "pass": ok}


def _initial(name: str, T, p):
    if name == "one":
        return transfer.constant(1.0)
    if name == "mu2":
        return lambda t: np.abs(ifs.mu_hat(T, t)) ** 2
    if name == "hQ":
        return lambda t: example_p.h_Q(t, p if p is not None else 0)
    if name == "harmonic":
        if p is None:
            raise ValueError("--init harmonic needs --example-p")
        return lambda t: example_p.harmonic_target(p, t)
    raise ValueError(f"unknown --init {name!r}")


def cmd_transfer(cfg: RunConfig) -> dict:
    T = _load(cfg)
    extra = cfg.extra or {}
    f = _initial(extra.get("init", "one"), T, cfg.example_p)
    rng = np.random.default_rng(cfg.seed)
    half = cfg.radius if cfg.radius is not None else 3.0
    samples = rng.uniform(-half, half, size=(1000, T.d))
    hr = transfer.harmonic_defect(T, f, samples, tol=1e-9)
    res: dict = {"init": extra.get("init", "one"), "harmonic": hr.to_json()}
    if cfg.iters and cfg.grid >= 2 and T.d <= 2:
        f0 = transfer.GridFunction.sample(f, half, cfg.grid, T.d)
        it = transfer.iterate_transfer(T, f0, cfg.iters)
        res["sup_deltas"] = it.sup_deltas
        out = _out_dir(cfg)
        if out:
            it.final.write(out / "transfer_grid.csv")
    ok = hr.sign in ("harmonic", "subharmonic")
    return {"results": res, "pass": ok}


def cmd_example(cfg: RunConfig) -> dict:
    p = cfg.example_p if cfg.example_p is not None else 3
    rep = example_p.conformance_suite(p, depth=cfg.mu_depth)
    rep["doubling_orbits"] = {"value": example_p.doubling_orbits(p), "pass": True}
    return {"results": rep, "pass": all(v["pass"] for v in rep.values())}


def cmd_attractor(cfg: RunConfig) -> dict:
    T = _load(cfg)
    extra = cfg.extra or {}
    fam = ifs.MapFamily.of(T, extra.get("which", "B"))
    depth = cfg.depth if cfg.depth is not None else 6
    n_chaos = int(extra.get("points") or 0)
    pts = ifs.chaos_game(fam, n_chaos, cfg.seed) if n_chaos else ifs.attractor_points(fam, depth)
    arr = np.array(pts, dtype=float).reshape(-1, T.d)
    res = {"which": fam.side, "mode": "chaos" if n_chaos else "exact", "depth": None if n_chaos else depth,
           "count": len(arr), "bbox": [arr.min(axis=0).tolist(), arr.max(axis=0).tolist()]}
    out = _out_dir(cfg)
    if out:
        ifs.write_points_csv(out / f"attractor_{fam.side}.csv", arr)
    return {"results": res, "pass": True}


def cmd_cuntz(cfg: RunConfig) -> dict:
    extra = cfg.extra or {}
    n_max = cfg.depth if cfg.depth is not None else 4
    res: dict = {}
    ok = True
    if cfg.triple or cfg.example_p is not None:
        T = _load(cfg)
        action = spectrum.ExponentialAction(T)
        reps = []
        for C in cycles.find_extreme_cycles(T):
            S = spectrum.generate_lambda(T, C, depth=n_max)
            r = cuntz.cuntz_defect(action, list(S), strict=False)
            reps.append({"word": list(C.word), "iso_defect": r.iso_defect,
                         "completeness_defect": r.completeness_defect, "states": r.n_states})
            ok &= r.iso_defect == 0 and r.completeness_defect == 0
        res["exponential"] = reps
    w = extra.get("word")
    if w:
        N = int(extra.get("alphabet") or max(map(int, w)) + 1)
        r = cuntz.cuntz_defect(cuntz.PermutativeAction(N), cuntz.truncated_basis(w, N, n_max), strict=False)
        res["permutative"] = {"word": w, "iso_defect": r.iso_defect, "completeness_defect": r.completeness_defect,
                              "states": r.n_states}
        ok &= r.iso_defect == 0 and r.completeness_defect == 0
        if extra.get("word2"):
            res["intertwiners"] = cuntz.phi_fixed_space(w, extra["word2"]).to_json()
    return {"results": res, "pass": bool(ok)}


COMMANDS = {
    "check": cmd_check,
    "cycles": cmd_cycles,
    "spectrum": cmd_spectrum,
    "transfer": cmd_transfer,
    "example": cmd_example,
    "attractor": cmd_attractor,
    "cuntz": cmd_cuntz,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--triple", metavar="PATH", help="JSON file {d, R, B, L}")
    src.add_argument("--example-p", "--p", type=int, metavar="INT", dest="example_p",
                     help="use the built-in two-dimensional family with odd p")
    common.add_argument("--depth", type=int)
    common.add_argument("--radius", type=float)
    common.add_argument("--mu-depth", type=int, default=50)
    common.add_argument("--grid", type=int, default=5, help="points per axis")
    common.add_argument("--iters", type=int, default=10)
    common.add_argument("--tol", type=float, default=1e-2)
    common.add_argument("--out", metavar="DIR")
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="spectral-ifs", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="standing hypotheses of a triple")
    sub.add_parser("cycles", parents=[common], help="B-extreme L-cycles (--depth: oracle word length)")
    sp = sub.add_parser("spectrum", parents=[common], help="generate and certify a candidate spectrum")
    sp.add_argument("--cycle", default="all", help="cycle index or 'all'")
    sp.add_argument("--lattice", help="external lattice basis, e.g. '1,0;0,1/3'")
    sp.add_argument("--target", choices=["one", "harmonic"], default="one")
    tp = sub.add_parser("transfer", parents=[common], help="transfer operator diagnostics")
    tp.add_argument("--init", choices=["one", "mu2", "hQ", "harmonic"], default="one")
    ep = sub.add_parser("example", parents=[common], help="closed-form conformance report")
    ep.add_argument("--check", choices=["all"], default="all")
    ap = sub.add_parser("attractor", parents=[common], help="attractor point clouds")
    ap.add_argument("--which", choices=["B", "L"], default="B")
    ap.add_argument("--points", type=int, help="chaos-game sample size instead of exact points")
    cp = sub.add_parser("cuntz", parents=[common], help="Cuntz relation and intertwiner checks")
    cp.add_argument("--word", help="minimal word for a permutative representation, e.g. 01")
    cp.add_argument("--word2", help="second word: report the intertwiner space")
    cp.add_argument("--alphabet", type=int)
    return parser


_EXTRA = ("cycle", "lattice", "target", "init", "which", "points", "word", "word2", "alphabet", "check")


def config_from_args(args: argparse.Namespace) -> RunConfig:
    extra = {k: getattr(args, k) for k in _EXTRA if hasattr(args, k)}
    return RunConfig(args.command, args.triple, args.example_p, args.depth, args.radius, args.mu_depth,
                     args.grid, args.iters, args.tol, args.out, args.seed, extra)


def _json_default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def run(cfg: RunConfig) -> tuple[int, dict]:
    cfg.validate()
    payload = COMMANDS[cfg.command](cfg)
    report = {"command": cfg.command, "config": asdict(cfg), "results": payload["results"],
              "pass": bool(payload["pass"])}
    return (EXIT_PASS if report["pass"] else EXIT_FAIL), report


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = config_from_args(args)
    start = time.perf_counter()
    try:
        code, report = run(cfg)
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (InvalidTripleError, ValueError, OSError, KeyError, TypeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SpectralIFSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    text = json.dumps(report, indent=2, sort_keys=True, default=_json_default) + "\n"
    sys.stdout.write(text)
    out = _out_dir(cfg)
    if out:
        (out / f"{cfg.command}_report.json").write_text(text)
    print(f"wall time: {time.perf_counter() - start:.3f} s", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
