import io
import subprocess
import sys

import numpy as np
import pytest

from coopmsr.cli import main
from coopmsr.fileio import read_params, read_shard, shard_path


def run(*argv):
    out = io.StringIO()
    rc = main([str(a) for a in argv], out=out)
    return rc, out.getvalue()


def checks(text):
    return [line for line in text.splitlines() if line.startswith("#CHECK")]


@pytest.fixture
def encoded(tmp_path):
    params = tmp_path / "p.params"
    assert run("gen", "--n", 6, "--k", 3, "--h", 2, "--d", 4, "--out", params)[0] == 0
    p = read_params(params)
    msg = np.random.default_rng(1).integers(0, p.field.order, p.k * p.l).astype("u1")
    msg.tofile(tmp_path / "msg.bin")
    rc, _ = run("encode", "--params", params, "--in", tmp_path / "msg.bin", "--out-dir", tmp_path / "shards")
    assert rc == 0
    return tmp_path, params, p


def test_bounds_command():
    rc, out = run("bounds", "--n", 6, "--k", 3, "--h", 2, "--d", 4)
    assert rc == 0
    assert "#CHECK co=640 ce=512 naive=1152" in out
    assert "7.5850" in out


def test_gen_rejects_bad_parameters(tmp_path, capsys):
    rc, _ = run("gen", "--n", 4, "--k", 2, "--h", 3, "--d", 3, "--out", tmp_path / "x")
    assert rc != 0
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and "h + d <= n" in err[0]


def test_gen_h1_note(tmp_path):
    rc, out = run("gen", "--n", 5, "--k", 2, "--h", 1, "--d", 3, "--out", tmp_path / "x")
    assert rc == 0 and "h=1 is an extension" in out


def test_encode_writes_systematic_shards(encoded):
    tmp, params, p = encoded
    msg = np.fromfile(tmp / "msg.bin", dtype="u1").astype(int)
    for i in range(1, 4):
        node, vec = read_shard(shard_path(tmp / "shards", i), p)
        assert node == i and np.array_equal(vec, msg[(i - 1) * p.l : i * p.l])
    rc, out = run("verify", "--params", params, "--shards", tmp / "shards")
    assert rc == 0 and "consistent: yes" in out


def test_repair_then_verify(encoded):
    tmp, params, p = encoded
    shards = tmp / "shards"
    originals = {i: read_shard(shard_path(shards, i), p)[1] for i in (2, 5)}
    shard_path(shards, 2).unlink()
    report = tmp / "r.txt"
    rc, out = run("repair", "--params", params, "--shards", shards, "--failed", "2,5", "--helpers", "1,3,4,6", "--report", report)
    assert rc == 0
    assert "co bound met: yes; ce bound met: yes" in out
    for i in (2, 5):
        assert np.array_equal(read_shard(shard_path(shards, i), p)[1], originals[i])
    text = report.read_text()
    assert "R1 1->2 64" in text and "R2 5->2 64" in text
    assert checks(text)[-1].endswith("co_met=yes ce_met=yes consistent=yes")
    assert run("verify", "--params", params, "--shards", shards)[0] == 0


def test_naive_repair_command(encoded):
    tmp, params, _ = encoded
    rc, out = run("repair", "--params", params, "--shards", tmp / "shards", "--failed", "1,2", "--naive")
    assert rc == 0 and "total symbols: 1152" in out


def test_repair_requires_helpers(encoded, capsys):
    tmp, params, _ = encoded
    rc, _ = run("repair", "--params", params, "--shards", tmp / "shards", "--failed", "1,2")
    assert rc == 1 and "--helpers" in capsys.readouterr().err


def test_verify_detects_corruption(encoded):
    tmp, params, _ = encoded
    path = shard_path(tmp / "shards", 6)
    raw = bytearray(path.read_bytes())
    raw[-1] ^= 1
    path.write_bytes(bytes(raw))
    rc, out = run("verify", "--params", params, "--shards", tmp / "shards")
    assert rc == 1 and "consistent: no" in out


def test_encode_rejects_wrong_message_length(encoded, capsys):
    tmp, params, _ = encoded
    (tmp / "short.bin").write_bytes(b"\x01\x02")
    rc, _ = run("encode", "--params", params, "--in", tmp / "short.bin", "--out-dir", tmp / "o")
    assert rc == 1 and "k*l" in capsys.readouterr().err


def test_bench_is_deterministic(encoded):
    _, params, _ = encoded
    a = run("bench", "--params", params, "--trials", 4, "--seed", 3)
    b = run("bench", "--params", params, "--trials", 4, "--seed", 3)
    assert a[0] == b[0] == 0
    assert checks(a[1]) == checks(b[1]) and len(checks(a[1])) == 5
    assert checks(a[1])[-1].startswith("#CHECK bench trials=4 passed=4")


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "coopmsr", "bounds", "--n", "5", "--k", "2", "--h", "2", "--d", "3"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "#CHECK co=256 ce=192 naive=384" in proc.stdout
