"""Command-line front end; every command prints one JSON report."""
from __future__ import annotations

import argparse
import json
import platform
import sys
import time
from datetime import datetime, timezone
from typing import Optional

from . import __version__
from .algebra import truncate
from .catalog import builtin_examples, fixture as lookup_fixture
from .errors import ParseError, TwistkError
from .extension import TAKE_CANONICAL, extend_to_degree, uep_profile
from .fields import FieldSpec
from .linalg import BACKEND
from .polyparse import parse_tensor_key
from .product import koszul_verdict, tau_quadratic_check, twisted_product_presentation
from .textio import POLICY_ALIASES, JobSpec, parse_job, parse_split, parse_table
from .twisting import SeparableSplit, TwistingMapTable, classify, format_triple, verify_twisting_to_degree

SCHEMA = "twistk/1"
COMMANDS = ("verify", "extend", "classify", "uep", "present", "hilbert", "koszul", "catalog")
DEFAULT_DEGREE = 8
DEFAULT_TOR_DEGREE = 6


class Job:
    """Resolved inputs: field, algebras and the twisting data."""

    def __init__(self, spec: JobSpec, args):
        self.spec = spec
        self.field = FieldSpec.parse(args.field or spec.field or "Q")
        self.fixture_name = args.fixture or spec.fixture
        self.policy = POLICY_ALIASES[args.policy] if args.policy else spec.policy
        self.split_names = parse_split(args.split) if args.split else spec.split
        self.command = args.command
        default = DEFAULT_TOR_DEGREE if args.command == "koszul" else DEFAULT_DEGREE
        self.degree_given = args.degree is not None or spec.degree is not None
        self.degree = args.degree if args.degree is not None else (spec.degree if spec.degree is not None else default)
        self.fixture = lookup_fixture(self.fixture_name) if self.fixture_name else None
        if self.fixture is None and not spec.entries:
            raise ParseError("no twisting data: give [twist] entries or a fixture", 0, 0)

    def _explicit_algebras(self, top_degree: int):
        if self.spec.alg_a is None or self.spec.alg_b is None:
            raise ParseError("explicit entries need [algebra A] and [algebra B]", 0, 0)
        return (
            truncate(self.spec.alg_a.presentation(self.field), top_degree),
            truncate(self.spec.alg_b.presentation(self.field), top_degree),
        )

    def seed(self) -> TwistingMapTable:
        top_degree = self.degree
        if self.fixture is not None:
            if self.fixture.seed is None:
                raise TwistkError(f"fixture {self.fixture.name} has no seed to extend")
            return self.fixture.seed(top_degree, self.field)
        alg_l, alg_r = self._explicit_algebras(top_degree)
        return parse_table(self.spec.entries, alg_l, alg_r, self.spec.twist_degree)

    def table(self) -> TwistingMapTable:
        """The table the analysis commands act on."""
        if self.fixture is not None:
            return self.fixture.table(self.degree, self.field)
        if self.policy:
            out = extend_to_degree(self.seed(), self.degree, self.policy)
            if not out.ok:
                raise TwistkError(f"seed extension stuck at degree {out.stuck_degree} ({out.reason})")
            return out.table
        top = max(len(k) for k in _entry_degrees(self.spec))
        alg_l, alg_r = self._explicit_algebras(max(self.spec.twist_degree or 0, top, self.degree))
        return parse_table(self.spec.entries, alg_l, alg_r, self.spec.twist_degree)

    def split(self, tw: TwistingMapTable) -> Optional[SeparableSplit]:
        names = self.split_names
        if names is None and self.fixture is not None:
            names = self.fixture.split
        return SeparableSplit.from_names(tw.alg_b, *names) if names else None

    def describe(self) -> dict:
        out = {"field": str(self.field), "degree": self.degree}
        if self.fixture_name:
            out["fixture"] = self.fixture_name
        if self.policy:
            out["policy"] = self.policy
        return out


def _entry_degrees(spec: JobSpec):
    gens_a = {n: i for i, n in enumerate(spec.alg_a.generators)} if spec.alg_a else {}
    gens_b = {n: i for i, n in enumerate(spec.alg_b.generators)} if spec.alg_b else {}
    for lineno, key, _ in spec.entries:
        b, a = parse_tensor_key(key, gens_b, gens_a, lineno)
        yield b + a


# commands ----------------------------------------------------------------------------


def cmd_verify(job: Job) -> dict:
    tw = job.table()
    n = job.degree if job.degree_given else tw.bound
    v = verify_twisting_to_degree(tw, n)
    out = {"ok": v.ok, "degree": n, "failure": None}
    if not v.ok:
        out["failure"] = {"identity": v.identity, "witness": format_triple(tw, v.identity, v.witness), "degree": v.degree}
    return out


def cmd_extend(job: Job) -> dict:
    seed = job.seed()
    policy = job.policy or TAKE_CANONICAL
    out = extend_to_degree(seed, job.degree, policy)
    result = {
        "policy": policy,
        "seed_degree": seed.bound,
        "reports": [r.summary() for r in out.reports],
        "status": "ok" if out.ok else "stuck",
        "stuck": None,
        "table": None,
    }
    if out.ok:
        result["table"] = out.table.lines()
    else:
        last = out.reports[-1]
        result["stuck"] = {"degree": out.stuck_degree, "reason": out.reason, "witness": last.witness}
    return result


def cmd_classify(job: Job) -> dict:
    tw = job.table()
    split = job.split(tw)
    out = classify(tw, split).as_dict()
    if split is None:
        out.pop("separable_with")
    return out


def cmd_uep(job: Job) -> dict:
    tw = job.table()
    prof = uep_profile(tw)
    return {"profile": {str(k): v for k, v in prof.items()}, "all_unique": all(prof.values())}


def _product(job: Job, tw: TwistingMapTable):
    top_degree = tw.bound if not job.degree_given else job.degree
    return twisted_product_presentation(tw.alg_a, tw.alg_b, tw, top_degree)


def cmd_present(job: Job) -> dict:
    tw = job.table()
    pp = _product(job, tw)
    by_degree = {}
    for n in sorted({r.degree for r in pp.presentation.relations}):
        by_degree[str(n)] = pp.relation_strings(n)
    q = tau_quadratic_check(tw.alg_a, tw.alg_b, tw, pp.top_degree)
    return {
        "generators": list(pp.presentation.names),
        "relations": by_degree,
        "minimal_degrees": {str(k): v for k, v in sorted(pp.minimal_degrees.items())},
        "dims": list(pp.dims),
        "tau_quadratic": {"ok": q.ok, "witness_degree": q.witness_degree},
    }


def cmd_hilbert(job: Job) -> dict:
    tw = job.table()
    pp = _product(job, tw)
    return {
        "product": list(pp.dims),
        "A": tw.alg_a.hilbert()[: pp.top_degree + 1],
        "B": tw.alg_b.hilbert()[: pp.top_degree + 1],
    }


def cmd_koszul(job: Job, method: str = "auto") -> dict:
    tw = job.table()
    top_degree = job.degree
    pp = _product(job, tw)
    alg = truncate(pp.presentation, top_degree) if top_degree != pp.top_degree else pp.algebra
    v = koszul_verdict(alg, top_degree, method=method)
    out = v.as_dict()
    out["minimal_degrees"] = {str(k): c for k, c in sorted(alg.new_relation_counts().items())}
    if v.tor is not None:
        out["tor"] = {"method": v.tor.method, "rows": v.tor.as_rows()}
    return out


def cmd_catalog(job: Optional[Job] = None) -> dict:
    fx = builtin_examples()
    return {
        "fixtures": [{"name": k, "summary": f.summary, "has_seed": f.seed is not None} for k, f in sorted(fx.items())],
        "parametric": ["abc(a,b,c)", "b0(c)", "ex7_2(l,m)"],
    }


# driver --------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="twistk", description="Exact computations with graded twisting maps.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--input", "-i", help="job file ('-' for standard input)")
    ap.add_argument("--fixture", help="named fixture, e.g. ex5_3 or abc(1,-1,1)")
    ap.add_argument("--degree", "-N", type=int, help="truncation degree")
    ap.add_argument("--field", help="Q or Fp:<p>")
    ap.add_argument("--policy", choices=sorted(POLICY_ALIASES), help="extension policy")
    ap.add_argument("--split", help="separable split 'u ; d'")
    ap.add_argument("--tor-method", choices=("auto", "bar", "resolution"), default="auto")
    ap.add_argument("--meta", help="write run metadata (timing, versions) to this file")
    return ap


def _error_report(command: str, exc: Exception) -> dict:
    err = {"type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ParseError):
        err["line"] = exc.line
        err["column"] = exc.column
    return {"schema": SCHEMA, "command": command, "error": err}


def run(argv=None) -> tuple:
    """Returns ``(exit code, report)`` without printing."""
    args = build_parser().parse_args(argv)
    if args.command == "catalog":
        return 0, {"schema": SCHEMA, "command": "catalog", "result": cmd_catalog()}
    try:
        text = ""
        if args.input == "-":
            text = sys.stdin.read()
        elif args.input:
            with open(args.input, encoding="utf-8") as fh:
                text = fh.read()
        elif not args.fixture:
            raise ParseError("give --input or --fixture", 0, 0)
        job = Job(parse_job(text), args)
        handler = {
            "verify": cmd_verify,
            "extend": cmd_extend,
            "classify": cmd_classify,
            "uep": cmd_uep,
            "present": cmd_present,
            "hilbert": cmd_hilbert,
            "koszul": lambda j: cmd_koszul(j, args.tor_method),
        }[args.command]
        result = handler(job)
    except (TwistkError, OSError) as exc:
        return 1, _error_report(args.command, exc)
    return 0, {"schema": SCHEMA, "command": args.command, "input": job.describe(), "result": result}


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, default=str)


def main(argv=None) -> int:
    start = time.perf_counter()
    code, report = run(argv)
    print(dumps(report))
    args = build_parser().parse_args(argv)
    if args.meta:
        meta = {
            "schema": SCHEMA,
            "version": __version__,
            "backend": BACKEND,
            "python": platform.python_version(),
            "seconds": round(time.perf_counter() - start, 3),
            "finished": datetime.now(timezone.utc).isoformat(),
            "exit_code": code,
        }
        with open(args.meta, "w", encoding="utf-8") as fh:
            fh.write(dumps(meta) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
