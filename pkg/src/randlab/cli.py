"""Command-line front end.

Reports go to stdout as JSON (or to ``--out``), diagnostics to stderr.
Exit status: 0 when every check passes, 1 when some check fails, 2 for
usage, parse and precondition errors.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import example as ex
from . import martingale as mg
from . import measures as ms
from . import testlab as tl
from .errors import FormatError, RandlabError
from .files import (
    file_digest,
    load_family,
    load_machines,
    load_measure,
    load_partial_map,
    load_process,
    load_rects,
    load_relativized,
    load_scheme,
)
from .rational import parse_rational
from .reports import Report

log = logging.getLogger("randlab")

DEFAULT_MAX_DEPTH = 16


class UsageError(RandlabError):
    pass


def _max_depth() -> int:
    raw = os.environ.get("RANDLAB_MAX_DEPTH", str(DEFAULT_MAX_DEPTH))
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"RANDLAB_MAX_DEPTH={raw!r} is not an integer") from None


def _depth(args, name="depth"):
    d = getattr(args, name)
    if d is None:
        return None
    if d < 1:
        raise UsageError(f"--{name} must be at least 1")
    cap = _max_depth()
    if d > cap:
        raise UsageError(f"--{name} {d} exceeds RANDLAB_MAX_DEPTH={cap}")
    return d


def _rationals(text: str) -> list[Fraction]:
    return [parse_rational(t) for t in text.split(",") if t.strip()]


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _joint(m, where):
    if not isinstance(m, ms.JointMeasure):
        raise UsageError(f"{where}: a measure on the product tree is required")
    return m


def _single(m, where):
    if not isinstance(m, ms.Measure):
        raise UsageError(f"{where}: a measure on the single tree is required")
    return m


def _example(args) -> ex.ExampleMeasure:
    table = load_machines(args.machines)
    return ex.build_example(ex.ExampleParams(parse_rational(args.epsilon), table))


# -- handlers -------------------------------------------------------------

def cmd_measure_check(args) -> Report:
    m = load_measure(args.measure)
    return ms.check_consistency(m, _depth(args)).to_report()


def cmd_measure_eval(args) -> Report:
    m = load_measure(args.measure)
    rep = Report("measure eval")
    if isinstance(m, ms.JointMeasure):
        rep.data.update({"x": args.x, "y": args.y or "", "value": m(args.x, args.y or "")})
    else:
        rep.data.update({"x": args.x, "value": m(args.x)})
    return rep


def cmd_conditional_trace(args) -> Report:
    j = _joint(load_measure(args.measure), args.measure)
    trace = ms.conditional_trace(j, args.x, args.y_stream)
    return Report("conditional trace", data={"x": args.x, "y_stream": args.y_stream, "trace": trace})


def cmd_example_build(args) -> Report:
    p = _example(args)
    d = _depth(args)
    grid = {f"{x}|{y}": p(x, y) for y in _strings(d) for x in _strings(d)}
    rep = ms.check_consistency(p, d).to_report()
    rep.command = "example build"
    rep.data.update({"epsilon": p.example.epsilon, "machine_count": p.example.table.machine_count,
                     "halted": sorted(map(list, p.example.table.halted_set())), "values": grid})
    return rep


def _strings(d):
    from .bits import strings_up_to
    return list(strings_up_to(d))


def cmd_example_verify(args) -> Report:
    p = _example(args)
    d = _depth(args)
    rep = ex.verify_ratio_bounds(p, p.example.epsilon, d)
    cons = ms.check_consistency(p, d)
    rep.check("additivity violations", len(cons.violations), "==", 0)
    rep.command = "example verify"
    return rep


def cmd_example_invariants(args) -> Report:
    return ex.verify_example_invariants(_example(args), _depth(args))


def cmd_example_deviation(args) -> Report:
    p = _example(args)
    dev, trace = ex.conditional_deviation(p, args.n, args.y)
    return Report("example deviation", data={"n": args.n, "y": args.y, "deviates": dev, "trace": trace})


def cmd_mg_submartingale(args) -> Report:
    p = _single(load_measure(args.p), args.p)
    proc = load_process(args.process) if args.process else mg.ratio_process(p, _single(load_measure(args.q), args.q))
    return mg.check_submartingale(p, proc, _depth(args))


def cmd_mg_doob(args) -> Report:
    p = _single(load_measure(args.p), args.p)
    proc = mg.ratio_process(p, _single(load_measure(args.q), args.q))
    scheme = load_scheme(args.scheme) if args.scheme else None
    return mg.doob_check(p, proc, _depth(args), _ints(args.thresholds), scheme)


def cmd_mg_approx(args) -> Report:
    p = _single(load_measure(args.p), args.p)
    proc = mg.ratio_process(p, _single(load_measure(args.q), args.q))
    return mg.check_effective_approximation(proc, load_scheme(args.scheme), _depth(args))


def cmd_mg_boundedprob(args) -> Report:
    p = _single(load_measure(args.p), args.p)
    q = _single(load_measure(args.q), args.q)
    if args.h == "reciprocal":
        cert = mg.reciprocal_bound()
    else:
        vals = dict(zip(_ints(args.ks), _rationals(args.h)))
        cert = mg.ProbBoundCertificate(lambda k: vals[k], "table")
    return mg.check_bounded_in_probability(p, q, cert, _depth(args), _ints(args.ks))


def cmd_mg_classify(args) -> Report:
    p = _single(load_measure(args.p), args.p)
    q = _single(load_measure(args.q), args.q)
    return mg.classify(p, q, args.x, parse_rational(args.threshold)).to_report()


def cmd_mg_equiv(args) -> Report:
    p, q = load_measure(args.p), load_measure(args.q)
    if type(p) is not type(q) and not (isinstance(p, ms.JointMeasure) and isinstance(q, ms.JointMeasure)):
        raise UsageError("--p and --q must live on the same space")
    return mg.equivalence_certificate(p, q, parse_rational(args.c), parse_rational(args.c_hi),
                                      _depth(args), args.strict)


def cmd_test_blind(args) -> Report:
    return tl.verify_blind_test(load_measure(args.measure), load_family(args.family))


def cmd_test_solovay(args) -> Report:
    maj = None
    if args.majorant == "2^-n":
        maj = tl.default_bound
    elif args.majorant:
        vals = _rationals(args.majorant)
        maj = lambda n: vals[n - 1]
    return tl.verify_solovay(load_measure(args.measure), load_family(args.family), args.horizon, maj)


def _lemma_inst(args):
    j = _joint(load_measure(args.joint), args.joint)
    W = ms.nonoverlapping_cover(load_rects(args.rects)) if args.cover else load_rects(args.rects)
    return tl.build_lemma_a_family(W, parse_rational(args.epsilon), j, _depth(args))


def cmd_test_lemma_a(args) -> Report:
    inst = _lemma_inst(args)
    rep = tl.verify_lemma_a(inst, args.y_prefix)
    rep.data["family"] = [sorted(map(list, u)) for u in inst.family]
    return rep


def cmd_test_f_epsilon(args) -> Report:
    inst = _lemma_inst(args)
    q = parse_rational(args.query)
    n = tl.compute_f_epsilon(inst, q)
    rep = Report("test f-epsilon", data={"index": n, "query": q})
    rep.check("tail mass below query", tl.tail_mass(inst, n) if inst.family else Fraction(0), "<", q)
    return rep


def cmd_test_expand(args) -> Report:
    j = _joint(load_measure(args.joint), args.joint)
    A = load_relativized(args.relativized)
    return tl.expand_via_lemma_a(A, j, args.y_prefix, parse_rational(args.epsilon), args.f_eps, _depth(args))


def cmd_test_thmain_probe(args) -> Report:
    P = _joint(load_measure(args.p), args.p)
    Q = _joint(load_measure(args.q), args.q)
    return tl.thmain_probe(P, Q, args.x, args.y, load_partial_map(args.fy))


def cmd_test_thmain_expand(args) -> Report:
    P = _joint(load_measure(args.p), args.p)
    Q = _joint(load_measure(args.q), args.q)
    U = [u for u in args.u.split(",")] if args.u else []
    inst = tl.ExpansionInstance(P, Q, args.y, U, load_partial_map(args.fy), parse_rational(args.c1),
                                parse_rational(args.c2), args.level)
    return tl.thmain_expand(inst, _depth(args))


# -- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="randlab", description=__doc__.splitlines()[0])
    ap.add_argument("--out", help="write the JSON report here instead of stdout")
    ap.add_argument("-v", "--verbose", action="store_true")
    top = ap.add_subparsers(dest="group", required=True)

    def group(name):
        return top.add_parser(name).add_subparsers(dest="command", required=True)

    def cmd(sub, name, fn, *specs):
        p = sub.add_parser(name)
        for flag, kw in specs:
            p.add_argument(flag, **kw)
        p.set_defaults(func=fn)
        return p

    req = {"required": True}
    depth = ("--depth", {"type": int, "required": True})
    eps_m = [("--epsilon", req), ("--machines", req)]

    g = group("measure")
    cmd(g, "check", cmd_measure_check, ("--measure", req), depth)
    cmd(g, "eval", cmd_measure_eval, ("--measure", req), ("--x", {"default": ""}), ("--y", {"default": None}))

    g = group("conditional")
    cmd(g, "trace", cmd_conditional_trace, ("--measure", req), ("--x", req), ("--y-stream", req))

    g = group("example")
    cmd(g, "build", cmd_example_build, *eps_m, ("--depth", {"type": int, "default": 2}))
    cmd(g, "verify", cmd_example_verify, *eps_m, depth)
    cmd(g, "invariants", cmd_example_invariants, *eps_m, depth)
    cmd(g, "deviation", cmd_example_deviation, *eps_m, ("--n", {"type": int, "required": True}), ("--y", req))

    g = group("martingale")
    pq = [("--p", req), ("--q", {"default": None})]
    cmd(g, "submartingale", cmd_mg_submartingale, *pq, ("--process", {"default": None}), depth)
    cmd(g, "doob", cmd_mg_doob, *pq, depth, ("--thresholds", req), ("--scheme", {"default": None}))
    cmd(g, "approx", cmd_mg_approx, *pq, ("--scheme", req), depth)
    cmd(g, "boundedprob", cmd_mg_boundedprob, *pq, depth, ("--ks", req), ("--h", {"default": "reciprocal"}))
    cmd(g, "classify", cmd_mg_classify, *pq, ("--x", req), ("--threshold", {"default": "1/100"}))
    cmd(g, "equiv", cmd_mg_equiv, *pq, ("--c", req), ("--c-hi", req), depth,
        ("--strict", {"action": "store_true"}))

    g = group("test")
    cmd(g, "blind", cmd_test_blind, ("--measure", req), ("--family", req))
    cmd(g, "solovay", cmd_test_solovay, ("--measure", req), ("--family", req),
        ("--horizon", {"type": int, "required": True}), ("--majorant", {"default": None}))
    lemma = [("--joint", req), ("--rects", req), ("--epsilon", req), depth,
             ("--cover", {"action": "store_true", "help": "make the rectangles non-overlapping first"})]
    cmd(g, "lemma-a", cmd_test_lemma_a, *lemma, ("--y-prefix", {"default": ""}))
    cmd(g, "f-epsilon", cmd_test_f_epsilon, *lemma, ("--query", req))
    cmd(g, "expand", cmd_test_expand, ("--joint", req), ("--relativized", req), ("--y-prefix", req),
        ("--epsilon", req), ("--f-eps", {"type": int, "default": None}), ("--depth", {"type": int, "default": None}))
    cmd(g, "thmain-probe", cmd_test_thmain_probe, ("--p", req), ("--q", req), ("--x", req), ("--y", req),
        ("--fy", req))
    cmd(g, "thmain-expand", cmd_test_thmain_expand, ("--p", req), ("--q", req), ("--y", req),
        ("--u", {"default": ""}), ("--fy", req), ("--c1", req), ("--c2", req),
        ("--level", {"type": int, "required": True}), depth)
    return ap


_FILE_FLAGS = ("measure", "machines", "p", "q", "process", "scheme", "family", "joint", "rects",
               "relativized", "fy")


def _echo(args) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in ("func", "out", "verbose"):
            continue
        out[k] = v
        if k in _FILE_FLAGS and v:
            digest = file_digest(v)
            if digest:
                out[k + "_sha256"] = digest
    return out


def run(argv=None) -> tuple[int, Report | None]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (0 if exc.code == 0 else 2), None
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="randlab: %(message)s")
    start = time.perf_counter()
    try:
        rep = args.func(args)
    except (RandlabError, ValueError, KeyError) as exc:
        log.error("%s", exc)
        return 2, None
    rep.timing = time.perf_counter() - start
    rep.command = f"{args.group} {args.command}"
    rep.data["config"] = _echo(args)
    text = rep.to_json() + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    for r in rep.failures:
        log.info("failed: %s (%s %s %s)", r.name, r.lhs, r.relation, r.rhs)
    return (0 if rep.passed else 1), rep


def main(argv=None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
