"""Command-line front end: run JSON scenario files through the
verification machinery and emit machine-readable reports.

Exit codes: 0 when every check came back as expected, 1 when some
check was refuted or missed its expectation, 2 for unparseable or
invalid scenarios.  Reports are deterministic for a fixed scenario and
seed, up to the timing fields.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import __version__
from .bump import partition_of_unity
from .domains import OpenSet
from .dist import (QuadratureConfig, TestFunction, bump_kernel,
                   delta_sequence, heaviside_sequence, step_kernel,
                   weak_limit_report)
from .expr import ONE, SmoothExpr, coord, from_sexpr, sin, mul, const, pow_
from .foam import (MembershipConfig, check_membership, diagonal,
                   embed_smooth, eq_mod_ideal, family_ideal, nontrivial_baire,
                   nontrivial_nd, off_diagonality_suite, single_ideal,
                   zero_sequence)
from .orders import NAT, NAT_PAIR, IndexOrder
from .sheaf import (SectionAssignment, flabby_extend, glue, restrict,
                    unit_partition_identity)
from .singular import (FinitePoints, SingularityFamily, CountableUnion,
                       locally_finitely_additive, rationals_in_unit_interval,
                       singular_set_from_json)

log = logging.getLogger("foamalg")


class ScenarioError(ValueError):
    pass


GENERATORS = {
    "delta": "mollifier sequence concentrating at the origin",
    "diagonal": "constant sequence at a smooth function",
    "eq26": "shrinking-plateau member over a closed nowhere dense zero set",
    "eq29": "pair-indexed plateau member over an increasing countable union",
    "heaviside": "smooth steps sharpening to the unit step",
    "zero": "the zero sequence",
}

OPERATIONS = {
    "check_membership": "certify or refute asymptotic vanishing",
    "eq_mod_ideal": "equality of generalized functions modulo the ideal",
    "flabby_extend": "extend a section from an inner open set",
    "glue": "assemble a section from compatible pieces",
    "locally_finitely_additive": "radius witnesses for finite meeting sets",
    "off_diagonality": "refute diagonal membership of nonzero functions",
    "partition_of_unity": "subordinate smooth partition on a cover",
    "restrict": "restriction to an open subset",
    "separated_check": "piecewise equality implies equality",
    "unit_partition_identity": "partition functions sum to the unit",
    "weak_limit": "pairings of a sequence against a test function",
}


def list_generators() -> str:
    lines = []
    for name in sorted({**GENERATORS, **OPERATIONS}):
        desc = GENERATORS.get(name) or OPERATIONS[name]
        lines.append(f"{name} - {desc}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# scenario loading


def _require(cond, msg):
    if not cond:
        raise ScenarioError(msg)


def _load_domain(data) -> OpenSet:
    _require(isinstance(data, dict) and "boxes" in data,
             "domain must be {dimension, boxes}")
    try:
        return OpenSet.from_json(data)
    except Exception as e:
        raise ScenarioError(f"bad domain: {e}")


def _load_order(name) -> IndexOrder:
    if name == "nat":
        return NAT
    if name == "nat_pair":
        return NAT_PAIR
    raise ScenarioError(f"unknown index order {name!r}")


def _load_expr(text) -> SmoothExpr:
    _require(isinstance(text, str), "expressions are s-expression strings")
    try:
        return from_sexpr(text)
    except Exception as e:
        raise ScenarioError(f"bad expression {text!r}: {e}")


def _load_ideal(spec, domain, order):
    if "sigma" in spec:
        try:
            sig = singular_set_from_json(spec["sigma"], domain)
        except ScenarioError:
            raise
        except Exception as e:
            raise ScenarioError(f"bad singularity set: {e}")
        return single_ideal(sig, order)
    if "family" in spec:
        f = spec["family"]
        try:
            gens = [singular_set_from_json(g, domain)
                    for g in f.get("generators", [])]
            fam = SingularityFamily(f["label"], gens, domain)
        except Exception as e:
            raise ScenarioError(f"bad family: {e}")
        return family_ideal(fam, order)
    raise ScenarioError("check needs a sigma or family")


def _load_sequence(spec, domain, order):
    _require(isinstance(spec, dict) and "generator" in spec,
             "sequence spec needs a generator name")
    gen = spec["generator"]
    if gen == "eq26":
        return nontrivial_nd(_load_expr(spec["sigma"]), domain,
                             nowhere_dense=spec.get("nowhere_dense"))
    if gen == "eq29":
        qs = rationals_in_unit_interval(int(spec.get("max_denominator", 8)))
        n = int(spec.get("stages", 8))
        stages = [FinitePoints([(q,) for q in qs[:l + 1]], domain)
                  for l in range(n)]
        return nontrivial_baire(stages, domain)
    if gen == "diagonal":
        return diagonal(_load_expr(spec["psi"]), order, domain)
    if gen == "zero":
        return zero_sequence(order, domain)
    if gen == "delta":
        kernel = step_kernel() if spec.get("kernel") == "step" \
            else bump_kernel()
        return delta_sequence(kernel, domain)
    if gen == "heaviside":
        return heaviside_sequence(domain=domain)
    raise ScenarioError(f"unknown generator {gen!r}")


# ---------------------------------------------------------------------------
# checks


def _check_membership(ctx, params):
    seq = _load_sequence(params["sequence"], ctx["domain"], ctx["order"])
    ideal = _load_ideal(params, ctx["domain"], seq.order)
    r = check_membership(seq, ideal, ctx["cfg"])
    expect = params.get("expect", "verified")
    return r.status == expect, {"result": r.to_json(seq.order),
                                "expected": expect}


def _check_off_diagonality(ctx, params):
    ideal = _load_ideal(params, ctx["domain"], ctx["order"])
    psis = [_load_expr(p) for p in params["psis"]]
    rep = off_diagonality_suite(ideal, psis, ctx["cfg"])
    return rep.all_refuted, rep.to_json()


def _cover_from(params, dim):
    cover = [OpenSet.from_json({"dimension": dim, "boxes": b})
             for b in params["cover"]]
    return cover


def _check_unit_partition(ctx, params):
    V = ctx["domain"]
    cover = _cover_from(params, V.dimension)
    pou = partition_of_unity(V, cover)
    fam = SingularityFamily("nd", [], V)
    res = unit_partition_identity(pou, family_ideal(fam, NAT), ctx["cfg"],
                                  params.get("grid_resolution", 101))
    return res.verified, {"status": res.status,
                          "max_deviation": res.max_deviation}


def _check_glue_round_trip(ctx, params):
    V = ctx["domain"]
    cover = _cover_from(params, V.dimension)
    psi = _load_expr(params["psi"])
    fam = SingularityFamily("nd", [], V)
    ideal = family_ideal(fam, NAT)
    T = embed_smooth(psi, ideal)
    pou = partition_of_unity(V, cover)
    assignment = SectionAssignment(
        tuple(cover), tuple(restrict(T, c) for c in cover), ideal)
    g = glue(assignment, pou, ctx["cfg"])
    return g.verified, g.to_json()


def _check_flabby(ctx, params):
    V = ctx["domain"]
    inner = _load_domain(params["inner"])
    psi = _load_expr(params["psi"])
    fam = SingularityFamily("nd", [], inner)
    T = embed_smooth(psi, family_ideal(fam, NAT))
    res = flabby_extend(T, V, cfg=ctx["cfg"])
    return res.verified, {
        "restriction_identity": res.restriction_identity.status}


def _check_weak_limit(ctx, params):
    kernel = step_kernel() if params.get("kernel") == "step" \
        else bump_kernel()
    seq = delta_sequence(kernel, ctx["domain"])
    lo, hi = params.get("window", [-1.0, 1.0])
    tf = TestFunction(_load_expr(params["psi"]), (lo, hi))
    q = params.get("quadrature", {})
    quad = QuadratureConfig(order=q.get("order", 16),
                            subdivisions=q.get("subdivisions", 128))
    rep = weak_limit_report(seq, tf, params["indices"], quad)
    ok = rep.convergent if params.get("expect_convergent", True) else True
    return ok, rep.to_json()


def _check_locally_finite(ctx, params):
    V = ctx["domain"]
    pts = params["points"]
    sigmas = [FinitePoints([[Fraction(c) for c in p]], V) for p in pts]
    fam = SingularityFamily("nd", [], V)
    rep = locally_finitely_additive(
        fam, sigmas, V, params.get("grid_resolution", 16),
        accumulation_points=[tuple(float(c) for c in p)
                             for p in params.get("accumulation", [])])
    expect = params.get("expect_passed", True)
    return rep.passed == expect, rep.to_json()


def _check_ring_laws(ctx, params):
    rng = random.Random(ctx["seed"])
    V = ctx["domain"]
    fam = SingularityFamily("nd", [], V)
    ideal = family_ideal(fam, NAT)
    x = coord(0)
    pool = [ONE, x, pow_(x, 2), sin(x), mul(const(Fraction(1, 2)), x)]
    count = int(params.get("count", 10))
    failures = 0
    for _ in range(count):
        a, b, c = (embed_smooth(rng.choice(pool), ideal) for _ in range(3))
        checks = [
            eq_mod_ideal(a + b, b + a, ctx["cfg"]),
            eq_mod_ideal((a + b) + c, a + (b + c), ctx["cfg"]),
            eq_mod_ideal(a * (b + c), a * b + a * c, ctx["cfg"]),
        ]
        if not all(r.verified for r in checks):
            failures += 1
    return failures == 0, {"triples": count, "failures": failures}


CHECKS = {
    "membership": _check_membership,
    "off_diagonality": _check_off_diagonality,
    "unit_partition": _check_unit_partition,
    "glue_round_trip": _check_glue_round_trip,
    "flabby": _check_flabby,
    "weak_limit": _check_weak_limit,
    "locally_finite": _check_locally_finite,
    "ring_laws": _check_ring_laws,
}


# ---------------------------------------------------------------------------
# runner


def load_scenario(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ScenarioError(f"cannot read scenario: {e}")
    _require(isinstance(data, dict), "scenario must be a JSON object")
    _require("domain" in data, "scenario needs a domain")
    _require(isinstance(data.get("checks"), list) and data["checks"],
             "scenario needs a nonempty list of checks")
    for c in data["checks"]:
        _require(isinstance(c, dict) and "check" in c,
                 "each check needs a 'check' name")
        _require(c["check"] in CHECKS, f"unknown check {c['check']!r}")
    return data


def run_scenario(data: dict, seed=None, jobs: int = 1) -> dict:
    caps = data.get("caps", {})
    cfg = MembershipConfig(
        p_cap=caps.get("p_cap", 4),
        probe_cap=caps.get("probe_cap", 8),
        grid_resolution=caps.get("grid_resolution", 32)).validate()
    ctx = {
        "domain": _load_domain(data["domain"]),
        "order": _load_order(data.get("index_order", "nat")),
        "cfg": cfg,
        "seed": data.get("seed", 0) if seed is None else seed,
    }

    def run_one(item):
        name, params = item
        t0 = time.perf_counter()
        log.info("check %s starting", name)
        ok, details = CHECKS[name](ctx, params)
        dt = (time.perf_counter() - t0) * 1000.0
        log.info("check %s: %s", name, "ok" if ok else "FAILED")
        return {"check": name, "ok": ok, "details": details,
                "duration_ms": dt}

    items = [(c["check"], c) for c in data["checks"]]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_one, items))
    else:
        results = [run_one(i) for i in items]

    return {
        "tool": "foamalg",
        "version": __version__,
        "seed": ctx["seed"],
        "config": {"p_cap": cfg.p_cap, "probe_cap": cfg.probe_cap,
                   "grid_resolution": cfg.grid_resolution},
        "checks": results,
        "ok": all(r["ok"] for r in results),
    }


def write_atomic(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def report_to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=1) + "\n"


def main(argv=None) -> int:
    level = {"error": logging.ERROR, "info": logging.INFO,
             "debug": logging.DEBUG}.get(
        os.environ.get("FOAM_LOG", "error"), logging.ERROR)
    logging.basicConfig(level=level, format="%(levelname)s %(message)s")

    ap = argparse.ArgumentParser(
        prog="foamalg",
        description="verification suites for differential algebras of "
                    "generalized functions")
    sub = ap.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="run a scenario file")
    runp.add_argument("scenario")
    runp.add_argument("--out", default=None,
                      help="directory for the report (and CSV) files")
    runp.add_argument("--seed", type=int, default=None)
    runp.add_argument("--jobs", type=int, default=1)

    sub.add_parser("list-generators",
                   help="list named constructions and checks")
    sub.add_parser("version", help="print the tool version")

    args = ap.parse_args(argv)

    if args.command == "version":
        print(__version__)
        return 0
    if args.command == "list-generators":
        sys.stdout.write(list_generators())
        return 0

    try:
        data = load_scenario(args.scenario)
        report = run_scenario(data, seed=args.seed, jobs=args.jobs)
    except ScenarioError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    text = report_to_json(report)
    outputs = data.get("outputs", {})
    if args.out or outputs.get("report"):
        out_dir = args.out or "."
        name = outputs.get("report", "report.json")
        write_atomic(os.path.join(out_dir, name), text)
    else:
        sys.stdout.write(text)

    if outputs.get("csv"):
        rows = ["check,ok"]
        rows += [f"{r['check']},{int(r['ok'])}" for r in report["checks"]]
        write_atomic(os.path.join(args.out or ".", outputs["csv"]),
                     "\n".join(rows) + "\n")

    return 0 if report["ok"] else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
