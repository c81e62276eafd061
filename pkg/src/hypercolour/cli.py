"""Command-line entry point: ``hypercolour <group> <command> [flags]``.

Every run writes its outputs plus ``<group>-<command>.manifest.json`` into
--out-dir. Errors go to stderr as one JSON object and map to exit codes
0 ok, 2 invalid input, 3 budget exceeded, 4 numeric failure, 5 failed
verification.
"""
import argparse
import json
import math
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from . import first_moment as fm
from . import io
from .errors import HypercolourError, InvalidInput, VerificationFailure
from .hypergraph import count_colourings
from .numerics import PrecisionContext
from .spin import DEFAULT_BUDGET, build_params, partition_function_ZB, potts_partition


class Run:
    """Per-invocation state: parsed args, output directory, manifest."""

    def __init__(self, args, argv):
        self.args = args
        self.out = Path(args.out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.stem = f"{args.group}-{args.cmd}"
        tol = args.tol if args.tol is not None else 2.0 ** (-0.8 * args.precision_bits)
        self.ctx = PrecisionContext(mantissa_bits=args.precision_bits, abs_tol=tol, rel_tol=tol / 32)
        self.manifest = io.RunManifest(
            command=list(argv),
            parameters={k: v for k, v in sorted(vars(args).items()) if k not in ("func",)},
            seed=args.seed,
            precision=self.ctx.as_dict(),
            tool_version=__version__,
        )

    def path(self, suffix):
        return self.out / f"{self.stem}{suffix}"

    def json(self, obj, suffix=".json"):
        p = self.path(suffix)
        io.write_json(obj, p)
        self.manifest.add_output(p)
        return p

    def table(self, header, rows, suffix=""):
        """Tabular output in the --format of choice."""
        if self.args.format == "csv":
            p = self.path(suffix + ".csv")
            io.write_csv(header, rows, p)
        else:
            p = self.path(suffix + ".json")
            io.write_json([dict(zip(header, r)) for r in rows], p)
        self.manifest.add_output(p)
        return p

    def file(self, writer, obj, suffix):
        p = self.path(suffix)
        writer(obj, p)
        self.manifest.add_output(p)
        return p

    def params(self):
        a = self.args
        if a.q is None or a.k is None:
            raise InvalidInput("--q and --k are required")
        if a.d is None and a.delta is None:
            if a.group == "curves":
                return build_params(a.q, a.k, 5 * a.q**a.k + 1, self.ctx)
            raise InvalidInput("--d or --delta is required")
        if a.d is not None and a.delta is not None and a.delta != a.d + 1:
            raise InvalidInput("--d and --delta disagree")
        Delta = a.delta if a.delta is not None else a.d + 1
        return build_params(a.q, a.k, Delta, self.ctx)


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise InvalidInput("missing " + ", ".join("--" + n.replace("_", "-") for n in missing))


# ---- oracle ----------------------------------------------------------------

def oracle_count(run):
    a = run.args
    _need(a, "hypergraph", "q")
    H = io.read_hypergraph(a.hypergraph)
    z = count_colourings(H, a.q, a.budget)
    run.json({"n": H.n, "m": H.m, "q": a.q, "count": z})
    print(z)


def oracle_zb(run):
    a = run.args
    _need(a, "graph", "q", "k")
    G = io.read_graph(a.graph)
    Delta = G.regular_degree() or a.delta
    if not Delta:
        raise InvalidInput("graph is not regular; pass --delta")
    p = build_params(a.q, a.k, Delta, run.ctx)
    mode = "exact" if a.exact else "float"
    z = partition_function_ZB(G, p, mode=mode, budget=a.budget)
    run.json({"params": p.as_dict(), "mode": mode, "Z_B": z})
    print(f"Z_B={io.dec(z)}")


def oracle_potts(run):
    a = run.args
    _need(a, "graph", "q", "b")
    G = io.read_graph(a.graph)
    try:
        B = Fraction(a.b)
    except ValueError:
        raise InvalidInput(f"--b must be a rational like 2/3, got {a.b!r}") from None
    z = potts_partition(G, a.q, B, mode="exact", budget=a.budget)
    run.json({"q": a.q, "B": B, "Z_potts": z})
    print(f"Z_potts={io.dec(z)}")


def oracle_halving(run):
    from .reductions import count_exact, halve

    a = run.args
    _need(a, "graph", "q", "k")
    G = io.read_graph(a.graph)
    Delta = G.regular_degree()
    if not Delta:
        raise InvalidInput("halving identity needs a regular graph")
    p = build_params(a.q, a.k, Delta, run.ctx)
    zb = partition_function_ZB(G, p, mode="exact", budget=a.budget)
    zc = count_exact(halve(G, a.k), a.q, a.budget)
    ok = zb == zc
    run.json({"params": p.as_dict(), "Z_B": zb, "Z_col": zc, "ok": ok})
    print(f"Z_B={zb} Z_col={zc} {'OK' if ok else 'MISMATCH'}")
    if not ok:
        raise VerificationFailure("halving identity fails")


# ---- phase -----------------------------------------------------------------

def _families(p, which, qvec):
    from . import recursion as rc

    out = []
    if which in ("all", "half-half") and p.q % 2 == 0:
        out.append(rc.solve_half_half(p))
    if which in ("all", "q00-sym"):
        out.append(rc.symmetric_q00_fixpoint(p))
    if which in ("all", "q00-asym"):
        out.append(rc.asymmetric_q00_fixpoint(p))
    if which == "general":
        if qvec is None:
            raise InvalidInput("--family general needs --qvec a,b,c")
        from .phi import phi_bar

        out.append(phi_bar(qvec, p)[3])
    if not out:
        raise InvalidInput(f"family {which!r} is not available for q={p.q}")
    return out


def phase_fixpoints(run):
    p = run.params()
    fps = _families(p, run.args.family, run.args.qvec)
    recs = [io.fixpoint_record(fp, p) for fp in fps]
    for fp, rec in zip(fps, recs):
        x, y = fp.R[0] / fp.R[1], fp.C[0] / fp.C[1]
        rec["ratios"] = [io.dec(x), io.dec(y)]
        if fp.source == "q00-sym":
            rec["tx_plus_q_minus_1"] = io.dec(p.t * x + p.q - 1)
        line = f"{fp.source}: qvec={tuple(float(v) for v in fp.qvec)} R0/R1={p.ctx.mp.nstr(x, 15)} C0/C1={p.ctx.mp.nstr(y, 15)}"
        if fp.source == "q00-sym":
            line += f" tx+q-1={p.ctx.mp.nstr(p.t * x + p.q - 1, 15)} (d={p.d})"
        line += f" residual={p.ctx.mp.nstr(fp.residual, 3)}"
        print(line)
    run.json(recs if len(recs) > 1 else recs[0])


def phase_dominance(run):
    from .phi import dominant_search

    p = run.params()
    rep = dominant_search(p, step_div=run.args.step_div, n_starts=run.args.starts)
    mp = p.ctx.mp
    rows = [(c.label, *[float(v) for v in c.fixpoint.qvec], c.value, c.verdict) for c in rep.candidates]
    run.table(["label", "q1", "q2", "q3", "phi_S_bar", "verdict"], rows, "-ranking")
    win = rep.winner_candidate
    wtype = tuple(float(v) for v in win.fixpoint.qvec)
    run.json({
        "params": p.as_dict(),
        "winner": {"label": win.label, "qvec": wtype, "value": win.value, "verdict": win.verdict},
        "margin": rep.margin,
        "balanced": rep.balanced,
        "permutation_symmetric": rep.permutation_symmetric,
        "heuristic": rep.heuristic,
        "failures": rep.failures,
        "candidates": [{"label": c.label, "value": c.value, "verdict": c.verdict, "note": c.note,
                        "fixpoint": io.fixpoint_record(c.fixpoint, p)} for c in rep.candidates],
    })
    tag = " (heuristic, outside proven regime)" if rep.heuristic else ""
    print(f"winner {win.label} type {wtype} value {mp.nstr(win.value, 15)} {win.verdict}{tag}")
    print(f"balanced={rep.balanced} permutation_symmetric={rep.permutation_symmetric} "
          f"margin={mp.nstr(rep.margin, 6) if rep.margin is not None else 'n/a'}")


def phase_stability(run):
    from .stability import classify

    a = run.args
    _need(a, "infile")
    recs = json.loads(Path(a.infile).read_text())
    recs = recs if isinstance(recs, list) else [recs]
    reports = []
    for rec in recs:
        pd = rec.get("params", {})
        q, k, Delta = pd.get("q", a.q), pd.get("k", a.k), pd.get("Delta", a.delta)
        if None in (q, k, Delta):
            raise InvalidInput("fixpoint record lacks params and no --q/--k/--delta given")
        q, k, Delta = int(q), int(k), int(Delta)
        ctx = PrecisionContext(mantissa_bits=max(run.ctx.mantissa_bits, int(rec.get("mantissa_bits", 0))))
        p = build_params(q, k, Delta, ctx)
        fp = io.fixpoint_from_record(rec, ctx)
        rep = classify(fp, p)
        mp = p.ctx.mp
        print(f"{fp.source or 'fixpoint'}: verdict={rep.verdict} second={mp.nstr(rep.second_largest, 12)} "
              f"1/d={mp.nstr(rep.threshold, 12)} closed_form={rep.closed_form_used} "
              f"delta={mp.nstr(rep.crosscheck_delta, 3)} pm1_err={mp.nstr(rep.pm_one_error, 3)}")
        reports.append(rep)
    run.json(reports if len(reports) > 1 else reports[0])


# ---- curves ----------------------------------------------------------------

def curves_trace(run):
    from . import scalar as sc

    p = run.params()
    mp = p.ctx.mp
    P1 = sc.trace_P1_plus(p, n_points=run.args.points)
    rows = [("f1", x, y, sc.eval_f1(x, y, p), sc.eval_f2(x, y, p)) for x, y, _ in P1.points]
    xs = P1.points[-1][0]
    n = run.args.points
    for i in range(1, n + 1):
        y = 1 + (xs - 1) * mp.power(2, -30 * (1 - mp.mpf(i) / n))
        for x in sc.solve_f2_for_x(y, p, n=256):
            rows.append(("f2", x, y, sc.eval_f1(x, y, p), sc.eval_f2(x, y, p)))
    run.table(["which", "x", "y", "f1", "f2"], rows)
    below = all(y <= x for w, x, y, _, _ in rows if w == "f1")
    print(f"{len(rows)} points; P1+ below diagonal: {below}; skipped {len(P1.skipped)}")


def curves_intersect(run):
    from .scalar import find_intersection_near_diagonal, y_exterior

    p = run.params()
    mp = p.ctx.mp
    it = find_intersection_near_diagonal(p)
    yE = y_exterior(p)
    run.json({"params": p.as_dict(), "intersection": it, "y_E": yE, "x_gt_y_gt_yE": bool(it.x > it.y > yE)})
    print(f"x={mp.nstr(it.x, 20)} y={mp.nstr(it.y, 20)} y_E={mp.nstr(yE, 20)}")
    print(f"|f1|={mp.nstr(abs(it.f1), 3)} |f2|={mp.nstr(abs(it.f2), 3)}")


def curves_landmarks(run):
    from .scalar import landmarks

    p = run.params()
    mp = p.ctx.mp
    lm = landmarks(p)
    run.json({"params": p.as_dict(), "landmarks": lm.as_dict(), "ordering_ok": lm.ordering_ok()})
    for k, v in lm.as_dict().items():
        print(f"{k}={mp.nstr(v, 20) if v is not None else 'none'}")
    print(f"ordering x0 > x* > x** : {lm.ordering_ok()}")


def curves_exterior(run):
    from .scalar import exterior_report

    p = run.params()
    mp = p.ctx.mp
    rep = exterior_report(p)
    run.json({"params": p.as_dict(), "report": rep, "ok": rep.ok})
    print(f"s={mp.nstr(rep.s, 15)} f2(1+s/d,1+s/2d)={mp.nstr(rep.f2_a, 10)} "
          f"f2(y_E,y_E)={mp.nstr(rep.f2_b, 10)} {'OK' if rep.ok else 'FAIL'}")
    if not rep.ok:
        raise VerificationFailure("exterior check fails")


# ---- first moment --------------------------------------------------------

def _qKD(a, need_delta=True):
    names = ("q", "K", "delta") if need_delta else ("q", "K")
    _need(a, *names)
    if a.q < 2 or a.K < 2:
        raise InvalidInput("need q >= 2 and K >= 2")


def fm_bound(run):
    a = run.args
    _qKD(a)
    b = fm.F_upper_bound(a.q, a.K, a.delta)
    flag = fm.is_uncolourable_regime(a.q, a.K, a.delta)
    run.json({"q": a.q, "K": a.K, "Delta": a.delta, "bound": b, "uncolourable_regime": flag})
    print(f"bound={b!r} uncolourable_regime={flag}")


def fm_maximize(run):
    a = run.args
    _qKD(a)
    v, arg = fm.maximize_F_grid(a.q, a.K, a.delta, a.grid)
    run.table([f"alpha{i + 1}" for i in range(a.q)] + ["F"], fm.landscape_rows(a.q, a.K, a.delta, a.grid), "-landscape")
    run.json({"q": a.q, "K": a.K, "Delta": a.delta, "max": v, "argmax": arg,
              "bound": fm.F_upper_bound(a.q, a.K, a.delta)})
    print(f"max F={v!r} at alpha={[round(float(x), 12) for x in arg]}")


def fm_threshold(run):
    a = run.args
    _qKD(a, need_delta=False)
    suff = fm.sufficient_threshold(a.q, a.K)
    exact = fm.exact_threshold(a.q, a.K)
    D = math.ceil(suff + 1)
    vals = {str(x): fm.F_upper_bound(a.q, a.K, x) for x in (D - 1, D)}
    run.json({"q": a.q, "K": a.K, "sufficient": suff, "sufficient_plus_one": suff + 1,
              "rule_Delta": D, "exact_sign_change": exact, "bound_values": vals})
    print(f"Delta >= {D}  (K q^(K-1) ln q + 1 = {suff + 1:.4f})")
    for k, v in vals.items():
        print(f"bound(Delta={k}) = {v:.10f}")
    print(f"bound changes sign at Delta = {exact:.6f}")


# ---- gadgets ---------------------------------------------------------------

def gadget_trim(run):
    from .reductions import trim_to_minimal

    a = run.args
    _need(a, "hypergraph", "q")
    H = trim_to_minimal(io.read_hypergraph(a.hypergraph), a.q, a.budget)
    run.file(io.write_hypergraph, H, ".txt")
    print(f"minimal: n={H.n} m={H.m}")


def gadget_disequality(run):
    from .reductions import build_disequality_gadget, trim_to_minimal

    a = run.args
    _need(a, "seed_file", "q")
    H = trim_to_minimal(io.read_hypergraph(a.seed_file), a.q, a.budget)
    g = build_disequality_gadget(H, a.q, a.budget)
    run.file(io.write_gadget, g, ".txt")
    table = g.pair_counts(a.budget)
    run.json({"q": a.q, "u": g.u, "v": g.v, "C0": g.C0, "n": g.H.n, "m": g.H.m,
              "steps": g.steps, "pair_counts": table.tolist()})
    for j, z in g.steps:
        print(f"H_{j}: Z_col={z}")
    print(f"gadget n={g.H.n} m={g.H.m} u={g.u} v={g.v} C0={g.C0}")
    print("pair counts (colour u, colour v):")
    for row in table.tolist():
        print("  " + " ".join(str(x) for x in row))


def gadget_equality(run):
    from .reductions import build_equality_gadget

    a = run.args
    _need(a, "gadget", "q")
    g = build_equality_gadget(io.read_gadget(a.gadget, a.q), a.budget)
    run.file(io.write_gadget, g, ".txt")
    print(f"equality gadget n={g.H.n} m={g.H.m} C={g.C0}")


def gadget_potts_replace(run):
    from .reductions import potts_edge_gadget_replace

    a = run.args
    _need(a, "gadget", "graph", "q")
    H = potts_edge_gadget_replace(io.read_graph(a.graph), io.read_gadget(a.gadget, a.q))
    run.file(io.write_hypergraph, H, ".txt")
    print(f"n={H.n} m={H.m}")


def gadget_verify(run):
    from .reductions import _check_gadget, potts_identity_report

    a = run.args
    _need(a, "gadget", "q")
    g = io.read_gadget(a.gadget, a.q)
    C0 = _check_gadget(g.H, a.q, g.u, g.v, g.kind, a.budget)
    out = {"kind": g.kind, "C0": C0, "trailer_C0": g.C0}
    if C0 != g.C0:
        raise VerificationFailure(f"file says C0={g.C0}, enumeration gives {C0}")
    print(f"{g.kind} gadget OK, C0={C0}")
    if a.graph:
        rep = potts_identity_report(io.read_graph(a.graph), g, a.budget)
        out["potts"] = rep
        print(f"Z_col={rep.lhs} C^|E| Z_potts={io.dec(rep.rhs)} {'OK' if rep.ok else 'MISMATCH'}")
        if not rep.ok:
            run.json(out)
            raise VerificationFailure("Potts gadget identity fails")
    run.json(out)


# ---- parser ----------------------------------------------------------------

def _qvec(s):
    try:
        v = tuple(float(x) for x in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad qvec {s!r}") from None
    if len(v) != 3:
        raise argparse.ArgumentTypeError("qvec needs three entries")
    return v


def _common():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global")
    g.add_argument("--q", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--K", type=int, help="hyperedge size for firstmoment")
    g.add_argument("--d", type=int)
    g.add_argument("--delta", type=int)
    g.add_argument("--precision-bits", type=int, default=256)
    g.add_argument("--tol", type=float)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    g.add_argument("--out-dir", default="out")
    g.add_argument("--format", choices=("csv", "json"), default="csv")
    g.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="accepted for compatibility; runs are serial")
    return p


COMMANDS = {
    "oracle": {
        "count-colourings": (oracle_count, ["hypergraph"]),
        "partition-zb": (oracle_zb, ["graph", "exact"]),
        "potts": (oracle_potts, ["graph", "b"]),
        "verify-halving": (oracle_halving, ["graph"]),
    },
    "phase": {
        "fixpoints": (phase_fixpoints, ["family", "qvec"]),
        "dominance": (phase_dominance, ["step_div", "starts"]),
        "stability": (phase_stability, ["infile"]),
    },
    "curves": {
        "trace": (curves_trace, ["points"]),
        "intersect": (curves_intersect, []),
        "landmarks": (curves_landmarks, []),
        "exterior": (curves_exterior, []),
    },
    "firstmoment": {
        "bound": (fm_bound, []),
        "maximize": (fm_maximize, ["grid"]),
        "threshold": (fm_threshold, []),
    },
    "gadget": {
        "trim": (gadget_trim, ["hypergraph"]),
        "disequality": (gadget_disequality, ["seed_file"]),
        "equality": (gadget_equality, ["gadget"]),
        "potts-replace": (gadget_potts_replace, ["gadget", "graph"]),
        "verify": (gadget_verify, ["gadget", "graph"]),
    },
}

OPTIONS = {
    "hypergraph": (("--hypergraph",), {}),
    "graph": (("--graph",), {}),
    "exact": (("--exact",), {"action": "store_true"}),
    "b": (("--b",), {"help": "Potts interaction as a rational, e.g. 2/3"}),
    "family": (("--family",), {"choices": ("all", "half-half", "q00-sym", "q00-asym", "general"),
                               "default": "all"}),
    "qvec": (("--qvec",), {"type": _qvec}),
    "step_div": (("--step-div",), {"type": int, "default": 16}),
    "starts": (("--starts",), {"type": int, "default": 4}),
    "infile": (("--in",), {"dest": "infile"}),
    "points": (("--points",), {"type": int, "default": 200}),
    "grid": (("--grid",), {"type": int, "default": 60}),
    "seed_file": (("--seed-file", "--from"), {"dest": "seed_file",
                                              "help": "uncolourable seed hypergraph"}),
    "gadget": (("--gadget",), {}),
}


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(prog="hypercolour", description="Hypergraph colouring spin-system toolkit.")
    parser.add_argument("--version", action="version", version=__version__)
    groups = parser.add_subparsers(dest="group", required=True)
    for gname, cmds in COMMANDS.items():
        gp = groups.add_parser(gname)
        sub = gp.add_subparsers(dest="cmd", required=True)
        for cname, (fn, opts) in cmds.items():
            cp = sub.add_parser(cname, parents=[common])
            for o in opts:
                flags, kw = OPTIONS[o]
                cp.add_argument(*flags, **kw)
            cp.set_defaults(func=fn)
    rp = groups.add_parser("replay", help="re-run the command stored in a manifest")
    rp.add_argument("manifest")
    return parser


def _error(exc, code):
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    print(json.dumps(payload), file=sys.stderr)
    return code


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    if args.group == "replay":
        try:
            m = io.read_manifest(args.manifest)
        except (OSError, ValueError, HypercolourError) as exc:
            return _error(exc, 2)
        return main(m.command)
    start = time.perf_counter()
    try:
        run = Run(args, argv)
        args.func(run)
        code = 0
    except HypercolourError as exc:
        code = _error(exc, exc.exit_code)
    except (OSError, ValueError) as exc:
        code = _error(exc, 2)
    except ArithmeticError as exc:
        code = _error(exc, 4)
    if "run" in locals():
        run.manifest.wall_time = round(time.perf_counter() - start, 6)
        run.manifest.exit_code = code
        run.manifest.write(run.path(".manifest.json"))
    return code


if __name__ == "__main__":
    sys.exit(main())
