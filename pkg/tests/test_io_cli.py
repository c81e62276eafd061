import json
from fractions import Fraction
from pathlib import Path

import mpmath
import pytest

from hypercolour import io
from hypercolour.cli import main
from hypercolour.errors import InvalidInput
from hypercolour.hypergraph import Hypergraph
from hypercolour.spin import cycle_graph

INST = Path(__file__).resolve().parent.parent / "instances"


def run(capsys, tmp_path, *argv):
    code = main(list(argv) + ["--out-dir", str(tmp_path)])
    out, err = capsys.readouterr()
    return code, out, err


def test_graph_roundtrip(tmp_path):
    G = cycle_graph(5)
    io.write_graph(G, tmp_path / "g.txt")
    assert io.read_graph(tmp_path / "g.txt") == G


def test_hypergraph_roundtrip(tmp_path):
    H = io.read_hypergraph(INST / "fano.txt")
    io.write_hypergraph(H, tmp_path / "h.txt")
    assert io.read_hypergraph(tmp_path / "h.txt") == H
    assert H.arity == 3 and H.m == 7


def test_bad_files(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("3 2\n0 1\n")
    with pytest.raises(InvalidInput):
        io.read_graph(p)
    p.write_text("3 1 3\n0 1 x\n")
    with pytest.raises(InvalidInput):
        io.read_hypergraph(p)


def test_dec_strings():
    with mpmath.workprec(256):
        s = io.dec(mpmath.mpf(1) / 3)
    assert s.startswith("0.3333333333") and len(s) > 70
    assert io.dec(Fraction(49, 32)) == "49/32"
    assert io.dec(7) == "7"
    assert io.dec(True) is True


def test_fixpoint_record_roundtrip(fixpoints4, p4):
    fp = fixpoints4["q00-asym"]
    rec = json.loads(json.dumps(io.fixpoint_record(fp, p4)))
    back = io.fixpoint_from_record(rec, p4.ctx)
    assert all(abs(a - b) <= 1e-70 * abs(a) for a, b in zip(fp.R, back.R))
    with pytest.raises(InvalidInput):
        io.fixpoint_from_record({"qvec": [1]}, p4.ctx)


def test_cli_verify_halving(capsys, tmp_path):
    code, out, _ = run(capsys, tmp_path, "oracle", "verify-halving", "--graph", str(INST / "c3.txt"), "--q", "2", "--k", "2")
    assert code == 0
    assert out.strip() == "Z_B=44 Z_col=44 OK"
    man = io.read_manifest(tmp_path / "oracle-verify-halving.manifest.json")
    assert man.exit_code == 0
    for name, digest in man.outputs.items():
        assert io.sha256(tmp_path / name) == digest


def test_cli_count_colourings(capsys, tmp_path):
    assert run(capsys, tmp_path, "oracle", "count-colourings", "--hypergraph", str(INST / "fano.txt"), "--q", "2")[1].strip() == "0"
    assert run(capsys, tmp_path, "oracle", "count-colourings", "--hypergraph", str(INST / "single_edge_K4.txt"),
               "--q", "3")[1].strip() == "78"


def test_cli_fixpoints_and_stability(capsys, tmp_path):
    code, out, _ = run(capsys, tmp_path, "phase", "fixpoints", "--q", "4", "--k", "2", "--d", "80", "--family", "q00-sym")
    assert code == 0 and "tx+q-1=" in out
    rec = json.loads((tmp_path / "phase-fixpoints.json").read_text())
    x = mpmath.mpf(rec["tx_plus_q_minus_1"])
    assert x < 80
    code, out, _ = run(capsys, tmp_path, "phase", "stability", "--in", str(tmp_path / "phase-fixpoints.json"))
    assert code == 0 and "verdict=unstable" in out
    rep = json.loads((tmp_path / "phase-stability.json").read_text())
    eig = [mpmath.mpf(v) for v in rep["eigenvalues"]]
    assert min(abs(v - 1) for v in eig) < 1e-10 and min(abs(v + 1) for v in eig) < 1e-10


def test_cli_threshold(capsys, tmp_path):
    code, out, _ = run(capsys, tmp_path, "firstmoment", "threshold", "--q", "2", "--K", "3")
    assert code == 0
    assert out.splitlines()[0].startswith("Delta >= 10")
    assert "bound(Delta=9)" in out and "bound(Delta=10)" in out


def test_cli_disequality(capsys, tmp_path):
    code, out, _ = run(capsys, tmp_path, "gadget", "disequality", "--seed-file", str(INST / "fano.txt"), "--q", "2")
    assert code == 0
    gfile = tmp_path / "gadget-disequality.txt"
    g = io.read_gadget(gfile, 2)
    assert g.kind == "disequality"
    code, out, _ = run(capsys, tmp_path, "gadget", "verify", "--gadget", str(gfile), "--q", "2")
    assert code == 0 and "OK" in out


def test_cli_exit_codes(capsys, tmp_path):
    code, _, err = run(capsys, tmp_path, "oracle", "count-colourings", "--hypergraph", str(tmp_path / "missing.txt"), "--q", "2")
    assert code == 2
    assert json.loads(err)["exit_code"] == 2
    code, _, err = run(capsys, tmp_path, "phase", "fixpoints", "--q", "4", "--k", "2")
    assert code == 2
    big = tmp_path / "big.txt"
    io.write_hypergraph(Hypergraph(40, ((0, 1, 2),)), big)
    code, _, err = run(capsys, tmp_path, "oracle", "count-colourings", "--hypergraph", str(big), "--q", "2", "--budget", "1000")
    assert code == 3
    assert main(["nonsense"]) == 2


def test_cli_replay_is_byte_identical(capsys, tmp_path):
    run(capsys, tmp_path, "firstmoment", "bound", "--q", "2", "--K", "3", "--delta", "10", "--format", "json")
    out = tmp_path / "firstmoment-bound.json"
    first = out.read_bytes()
    out.unlink()
    assert main(["replay", str(tmp_path / "firstmoment-bound.manifest.json")]) == 0
    capsys.readouterr()
    assert out.read_bytes() == first
