"""Instance file formats, JSON/CSV output with decimal strings, and run
manifests."""
import csv
import dataclasses
import hashlib
import json
import math
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np

from .errors import InvalidInput
from .hypergraph import Hypergraph
from .reductions import Gadget
from .recursion import FixpointRC
from .spin import Graph

MANIFEST_SCHEMA = 1


def _lines(path):
    with open(path) as fh:
        rows = [ln.split("#", 1)[0].split() for ln in fh]
    return [r for r in rows if r]


def _ints(row, path):
    try:
        return [int(v) for v in row]
    except ValueError:
        raise InvalidInput(f"{path}: expected integers, got {' '.join(row)!r}") from None


def read_graph(path):
    """First line "n m", then m lines "u v", 0-based."""
    rows = _lines(path)
    if not rows:
        raise InvalidInput(f"{path}: empty file")
    head = _ints(rows[0], path)
    if len(head) != 2:
        raise InvalidInput(f"{path}: header must be 'n m'")
    n, m = head
    body = [_ints(r, path) for r in rows[1:]]
    if len(body) != m or any(len(r) != 2 for r in body):
        raise InvalidInput(f"{path}: expected {m} edge lines of two vertices")
    return Graph(n, tuple(tuple(r) for r in body))


def write_graph(G, path):
    text = f"{G.n} {G.m}\n" + "".join(f"{u} {v}\n" for u, v in G.edges)
    Path(path).write_text(text)


def _parse_hypergraph(rows, path):
    head = _ints(rows[0], path)
    if len(head) != 3:
        raise InvalidInput(f"{path}: header must be 'n m K'")
    n, m, K = head
    body = [_ints(r, path) for r in rows[1:m + 1]]
    if len(body) != m or any(len(r) != K for r in body):
        raise InvalidInput(f"{path}: expected {m} edge lines of {K} vertices")
    return Hypergraph(n, tuple(tuple(r) for r in body)), rows[m + 1:]


def read_hypergraph(path):
    """First line "n m K", then m lines of K vertex indices."""
    rows = _lines(path)
    if not rows:
        raise InvalidInput(f"{path}: empty file")
    H, rest = _parse_hypergraph(rows, path)
    if rest:
        raise InvalidInput(f"{path}: trailing lines after {H.m} edges")
    return H


def _hypergraph_text(H):
    K = H.arity if H.m else 0
    return f"{H.n} {H.m} {K}\n" + "".join(" ".join(map(str, e)) + "\n" for e in H.edges)


def write_hypergraph(H, path):
    Path(path).write_text(_hypergraph_text(H))


def write_gadget(g, path):
    """Hypergraph format plus a trailer line "u v kind C0"."""
    Path(path).write_text(_hypergraph_text(g.H) + f"{g.u} {g.v} {g.kind} {g.C0}\n")


def read_gadget(path, q):
    rows = _lines(path)
    if not rows:
        raise InvalidInput(f"{path}: empty file")
    H, rest = _parse_hypergraph(rows, path)
    if len(rest) != 1 or len(rest[0]) != 4:
        raise InvalidInput(f"{path}: missing trailer 'u v kind C0'")
    u, v, kind, C0 = rest[0]
    if kind not in ("disequality", "equality"):
        raise InvalidInput(f"{path}: unknown gadget kind {kind!r}")
    return Gadget(H, int(u), int(v), kind, int(C0), q)


# ---- serialization -----------------------------------------------------------

def dec(x, digits=None):
    """Decimal string for any number we emit; mpf keeps its full precision."""
    if hasattr(x, "_mpf_"):
        if digits is None:
            digits = max(15, int(x.context.prec * math.log10(2)))
        return mpmath.nstr(x, digits, strip_zeros=False, min_fixed=-4, max_fixed=6)
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return x


def jsonable(obj):
    """Nested dicts/lists with every number turned into a decimal string."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)
                if not isinstance(getattr(obj, f.name), (Graph, Hypergraph))}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if obj is None or isinstance(obj, str):
        return obj
    return dec(obj)


def write_json(obj, path):
    Path(path).write_text(json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n")


def write_csv(header, rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([dec(v) for v in r])


def fixpoint_record(fp, params):
    return {
        "params": params.as_dict(),
        "qvec": [dec(v) for v in fp.qvec],
        "R": [dec(v) for v in fp.R],
        "C": [dec(v) for v in fp.C],
        "residual": dec(fp.residual),
        "converged": fp.converged,
        "source": fp.source,
        "mantissa_bits": params.ctx.mantissa_bits,
    }


def fixpoint_from_record(rec, ctx):
    """Inverse of fixpoint_record; qvec entries come back as mpf."""
    mp = ctx.mp
    try:
        qvec = tuple(mp.mpf(v) for v in rec["qvec"])
        R = tuple(mp.mpf(v) for v in rec["R"])
        C = tuple(mp.mpf(v) for v in rec["C"])
    except (KeyError, ValueError, TypeError) as exc:
        raise InvalidInput(f"bad fixpoint record: {exc}") from None
    if len(qvec) != 3 or len(R) != 4 or len(C) != 4:
        raise InvalidInput("fixpoint record needs 3 multiplicities and 4-vectors R, C")
    return FixpointRC(qvec, R, C, mp.mpf(rec.get("residual", "nan")), bool(rec.get("converged", True)),
                      rec.get("source", "file"))


def sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclasses.dataclass
class RunManifest:
    command: list
    parameters: dict
    seed: int
    precision: dict
    tool_version: str
    wall_time: float = 0.0
    outputs: dict = dataclasses.field(default_factory=dict)
    exit_code: int = 0
    schema_version: int = MANIFEST_SCHEMA

    def add_output(self, path):
        self.outputs[Path(path).name] = sha256(path)

    def write(self, path):
        Path(path).write_text(json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True) + "\n")


def read_manifest(path):
    data = json.loads(Path(path).read_text())
    if data.get("schema_version") != MANIFEST_SCHEMA:
        raise InvalidInput(f"unsupported manifest schema {data.get('schema_version')!r}")
    return RunManifest(**data)
