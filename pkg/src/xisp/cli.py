"""Command-line front end: norm certification, constructions, sessions and verification."""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import __version__, schreier
from .config import FAITHFUL, SCALED, ConfigError, InfeasibleAtBudget, SpaceConfig
from .constructions import build_dependent_sequence, build_exact_pair, hi_demo
from .functionals import CodingRegistry, term_to_json
from .normsearch import Budget, MalformedInstance, norm_certificate
from .scc import generate_basic_scc, validate_basic_scc
from .schreier import SearchTooLarge
from .suites import DEFAULT_SEED, SUITES, run_suite
from .tsirelson import SupportTooLarge, tsirelson_norm
from .vectors import RationalVector

SESSION_ENV = "XISP_SESSION"

EXIT_OK, EXIT_VERIFY, EXIT_MALFORMED, EXIT_INFEASIBLE = 0, 1, 2, 3


class Malformed(ValueError):
    """Bad user input; reported with exit code 2."""


# -- sessions --------------------------------------------------------------------

class Session:
    """A manifest (config echo, registry path, seed, version) plus its live registry.

    Replaying the same manifest and inputs reproduces outputs byte for byte.
    """

    def __init__(self, path: Path | None, cfg: SpaceConfig, seed: int):
        self.path = path
        self.cfg = cfg
        self.seed = seed
        self.registry_path: Path | None = None
        self.registry = CodingRegistry(cfg)
        if path is None:
            return
        if path.exists():
            manifest = _read_json(path)
            stored = SpaceConfig.from_json(manifest.get("config", {}))
            if stored.to_json() != cfg.to_json():
                raise Malformed(f"session {path} was opened with mode {stored.mode!r}; "
                                f"rerun with matching --mode/--strict")
            self.seed = int(manifest.get("seed", seed))
            self.registry_path = path.parent / manifest["registry"]
            if self.registry_path.exists():
                self.registry = CodingRegistry.load(self.registry_path, cfg)
        else:
            self.registry_path = path.with_name(path.stem + ".registry.json")

    def manifest(self) -> dict:
        return {"config": self.cfg.to_json(),
                "registry": self.registry_path.name if self.registry_path else None,
                "seed": self.seed, "version": __version__}

    def save(self) -> None:
        if self.path is None:
            return
        self.registry.save(self.registry_path)
        self.path.write_text(_dumps(self.manifest()))


# -- helpers ---------------------------------------------------------------------

def _dumps(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _read_json(path) -> object:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise Malformed(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise Malformed(f"{path}: invalid JSON ({exc})") from None


def _read_vector(path) -> RationalVector:
    data = _read_json(path)
    try:
        return RationalVector.from_json(data)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise Malformed(f"{path}: {exc}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise Malformed(f"expected comma separated integers, got {text!r}") from None


def _config(args) -> SpaceConfig:
    try:
        return SpaceConfig(mode=args.mode, strict=args.strict)
    except ConfigError as exc:
        raise Malformed(str(exc)) from None


def _pool_map(fn, items, jobs: int):
    """Map in a process pool when jobs > 1; results come back in input order."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _tnorm_one(path: str) -> dict:
    value, witness = tsirelson_norm(_read_vector(path))
    return {"value": str(value), "witness": term_to_json(witness.term) if witness.term is not None else None}


def _norm_one(job) -> dict:
    path, budget, cfg_json = job
    cfg = SpaceConfig.from_json(cfg_json)
    cert = norm_certificate(_read_vector(path), Budget.parse(budget), cfg)
    return cert.to_json(cfg)


def _suite_one(job) -> dict:
    name, seed = job
    return run_suite(name, seed).to_json()


# -- commands --------------------------------------------------------------------

def cmd_tnorm(args, cfg):
    out = _pool_map(_tnorm_one, args.vectors, args.jobs)
    if not args.witness:
        out = [{"value": o["value"]} for o in out]
    return (out[0] if len(out) == 1 else out), EXIT_OK


def cmd_norm(args, cfg):
    try:
        Budget.parse(args.budget)
    except ValueError as exc:
        raise Malformed(str(exc)) from None
    jobs = [(p, args.budget, cfg.to_json()) for p in args.vectors]
    out = _pool_map(_norm_one, jobs, args.jobs)
    return (out[0] if len(out) == 1 else out), EXIT_OK


def cmd_schreier(args, cfg):
    if args.level < 0:
        raise Malformed("level must be non-negative")
    if args.action == "member":
        F = _int_list(args.set)
        w = schreier.is_member(F, args.level)
        return {"set": [str(e) for e in sorted(set(F))], "level": args.level,
                "member": w is not None, "witness": w.to_json() if w else None}, EXIT_OK
    if args.vector is None:
        raise Malformed("maxsum needs a vector file of non-negative weights")
    v = _read_vector(args.vector)
    try:
        value, G = schreier.max_schreier_sum(v, args.level)
    except ValueError as exc:
        raise Malformed(str(exc)) from None
    return {"level": args.level, "value": str(value), "set": [str(e) for e in sorted(G)]}, EXIT_OK


def cmd_scc(args, cfg):
    try:
        eps = Fraction(args.eps)
    except (ValueError, ZeroDivisionError):
        raise Malformed(f"bad tolerance {args.eps!r}") from None
    try:
        d = generate_basic_scc(args.n, eps, args.start)
    except ValueError as exc:
        raise Malformed(str(exc)) from None
    return {"descriptor": d.to_json(), "support_size": len(d.support),
            "validation": validate_basic_scc(d) or "valid"}, EXIT_OK


def cmd_build(args, cfg):
    session = Session(args.session, cfg, args.seed)
    if args.what == "exact-pair":
        rec = build_exact_pair(args.n, args.kind, cfg, session.registry).to_json()
    elif args.what == "dependent":
        rec = build_dependent_sequence(args.n, args.kind, cfg, session.registry).to_json()
    else:
        rec = hi_demo(args.n, cfg, session.registry, Budget.parse(args.budget)).to_json()
    session.save()
    return {"manifest": session.manifest(), "record": rec}, EXIT_OK


def cmd_verify(args, cfg):
    names = list(SUITES) if args.suite == "all" else [args.suite]
    if any(n not in SUITES for n in names):
        raise Malformed(f"unknown suite {args.suite!r}; choose from all, {', '.join(SUITES)}")
    # the soundness sweep audits certificates from this process, so it runs here, last
    local = [n for n in names if n == "certificate-soundness"]
    remote = [n for n in names if n not in local]
    reports = _pool_map(_suite_one, [(n, args.seed) for n in remote], args.jobs)
    reports += [_suite_one((n, args.seed)) for n in local]
    passed = all(r["passed"] for r in reports)
    for r in reports:
        print(f"{'PASS' if r['passed'] else 'FAIL'} {r['suite']}: {r['claim']}", file=sys.stderr)
    return {"seed": args.seed, "passed": passed, "suites": reports}, EXIT_OK if passed else EXIT_VERIFY


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=(SCALED, FAITHFUL), default=SCALED,
                        help="space configuration: desk-scale relaxations (scaled) or the exact rules")
    common.add_argument("--strict", action="store_true",
                        help="reject terms whose children cannot all be validated")
    common.add_argument("--out", type=Path, help="write JSON here instead of stdout")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for randomized corpora")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for batch work")

    p = argparse.ArgumentParser(prog="xisp", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("tnorm", parents=[common], help="exact Tsirelson norm of vector files")
    t.add_argument("vectors", nargs="+", help='JSON files of the form {"entries": [["k", "p/q"], ...]}')
    t.add_argument("--witness", action="store_true", help="include the attaining functional")
    t.set_defaults(func=cmd_tnorm)

    n = sub.add_parser("norm", parents=[common], help="certified lower and upper bounds of the space norm")
    n.add_argument("vectors", nargs="+")
    n.add_argument("--budget", default=str(Budget()), help="search budget as depth,children,sizes")
    n.set_defaults(func=cmd_norm)

    s = sub.add_parser("schreier", parents=[common], help="Schreier family queries")
    s.add_argument("action", choices=("member", "maxsum"))
    s.add_argument("--set", default="", help="comma separated set for member")
    s.add_argument("--vector", help="weights file for maxsum")
    s.add_argument("--n", dest="level", type=int, required=True, help="family level")
    s.set_defaults(func=cmd_schreier)

    c = sub.add_parser("scc", parents=[common], help="generate a basic special convex combination")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--eps", required=True, help="tolerance as a rational, e.g. 1/8")
    c.add_argument("--start", type=int, default=1, help="first index of the available set")
    c.set_defaults(func=cmd_scc)

    b = sub.add_parser("build", parents=[common], help="constructions recorded in a session")
    b.add_argument("what", choices=("exact-pair", "dependent", "hi-demo"))
    b.add_argument("--n", type=int, required=True,
                   help="pair index, sequence length, or the n of the demonstration")
    b.add_argument("--kind", type=int, choices=(0, 1), default=1)
    b.add_argument("--budget", default=str(Budget()))
    b.add_argument("--session", type=Path, default=os.environ.get(SESSION_ENV),
                   help=f"session manifest path (default: ${SESSION_ENV})")
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", parents=[common], help="run acceptance suites")
    v.add_argument("suite", help=f"one of: all, {', '.join(SUITES)}")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1:
        parser.error("--jobs must be positive")
    try:
        cfg = _config(args)
        if isinstance(getattr(args, "session", None), str):
            args.session = Path(args.session)
        payload, code = args.func(args, cfg)
    except InfeasibleAtBudget as exc:
        payload, code = {"error": "infeasible", "message": str(exc), "estimate": exc.estimate}, EXIT_INFEASIBLE
    except (SupportTooLarge, SearchTooLarge) as exc:
        payload, code = {"error": "infeasible", "message": str(exc)}, EXIT_INFEASIBLE
    except (Malformed, MalformedInstance, ValueError) as exc:
        payload, code = {"error": "malformed", "message": str(exc)}, EXIT_MALFORMED
    text = _dumps(payload)
    if args.out is not None:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
