"""Command-line contract: exit codes, cache behavior, report determinism."""

import json
import math
import os

import numpy as np
import pytest

from signflow import cli, hecke, normforms, sieves, signlab


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, out


def test_expand_writes_cache_and_reads_it_back(tmp_path, capsys):
    cache = str(tmp_path / "cache")
    code, out = run(
        ["expand", "--weight", "12", "--precision", "500", "--cache-dir", cache],
        capsys,
    )
    assert code == 0
    path = hecke.cache_path(cache, 12, 500)
    assert os.path.exists(path)
    report = json.loads(out)
    assert report["statistics"]["a2"] == "-24"
    # second run must serve the cached table and produce identical bytes
    code2, out2 = run(
        ["expand", "--weight", "12", "--precision", "500", "--cache-dir", cache],
        capsys,
    )
    assert code2 == 0 and out2 == out


def test_cache_dir_from_environment(tmp_path, capsys, monkeypatch):
    cache = str(tmp_path / "envcache")
    monkeypatch.setenv(cli.CACHE_ENV, cache)
    code, _ = run(["expand", "--weight", "16", "--precision", "300"], capsys)
    assert code == 0
    assert os.path.exists(hecke.cache_path(cache, 16, 300))


def test_stale_cache_is_rebuilt(tmp_path, capsys):
    cache = str(tmp_path / "cache")
    path = hecke.cache_path(cache, 12, 400)
    os.makedirs(cache)
    with open(path, "wb") as fh:
        fh.write(b"garbage bytes that are not a cache")
    with pytest.warns(UserWarning, match="stale cache"):
        code, out = run(
            ["expand", "--weight", "12", "--precision", "400", "--cache-dir", cache],
            capsys,
        )
    assert code == 0
    assert json.loads(out)["statistics"]["a3"] == "252"
    assert hecke.read_cache(path).a[2] == -24  # rebuilt file is valid


def test_unsupported_weight_exits_1(tmp_path, capsys):
    code = cli.main(
        ["expand", "--weight", "24", "--precision", "100",
         "--cache-dir", str(tmp_path)]
    )
    err = capsys.readouterr().err
    assert code == 1
    assert "12" in err and "26" in err  # message names the supported weights


def test_precision_cap_requires_override(tmp_path, capsys):
    code = cli.main(
        ["expand", "--weight", "12", "--precision", str(3 * 10**6),
         "--cache-dir", str(tmp_path)]
    )
    assert code == 1
    assert "--allow-large" in capsys.readouterr().err


def test_sign_changes_passes_through_library_count(tmp_path, capsys):
    cache = str(tmp_path / "cache")
    code, out = run(
        ["sign-changes", "--weight", "12", "--d", "-1", "--limit", "10000",
         "--cache-dir", cache],
        capsys,
    )
    assert code == 0
    report = json.loads(out)

    table = hecke.eigenform(12, 10**4)
    fs = sieves.build_factor_sieve(10**4)
    signs = sieves.sign_sieve(sieves.lambda_sieve(table, fs, 10**4))
    elem = normforms.element_norm_enumerate(normforms.quadratic_field(-1), 10**4)
    rep = signlab.count_sign_changes(
        signs, elem, 10**4, normalizer=10**4 / math.sqrt(math.log(10**4))
    )
    assert report["statistics"]["count"] == rep.count
    assert report["verdicts"][0]["pass"] is True


def test_report_schema(tmp_path, capsys):
    cache = str(tmp_path / "cache")
    out_path = str(tmp_path / "report.json")
    code, _ = run(
        ["tolev", "--q", "5", "--a", "1", "--limit", "20000",
         "--cache-dir", cache, "--out", out_path],
        capsys,
    )
    assert code == 0
    report = json.loads(open(out_path).read())
    assert set(report) >= {"params", "statistics", "verdicts", "fixtures_version"}
    v = report["verdicts"][0]
    assert set(v) == {"criterion", "value", "bound", "pass"}


def test_report_bytes_deterministic(tmp_path, capsys):
    cache = str(tmp_path / "cache")
    paths = [str(tmp_path / f"r{i}.json") for i in (1, 2)]
    for p in paths:
        code, _ = run(
            ["small-lambda", "--weight", "12", "--limit", "20000",
             "--cache-dir", cache, "--out", p],
            capsys,
        )
        assert code == 0
    assert open(paths[0], "rb").read() == open(paths[1], "rb").read()


def test_normset_bitmap_layout(tmp_path, capsys):
    out_path = str(tmp_path / "ns.bits")
    code, _ = run(
        ["normset", "--d", "-1", "--limit", "1000", "--mode", "element",
         "--out", out_path],
        capsys,
    )
    assert code == 0
    raw = open(out_path, "rb").read()
    assert len(raw) % 8 == 0  # whole 64-bit little-endian words
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
    expect = normforms.element_norm_enumerate(normforms.quadratic_field(-1), 1000)
    assert np.array_equal(bits[:1001].astype(bool), expect)
    assert not bits[1001:].any()


def test_sieve_signs_byte_encoding(tmp_path, capsys):
    cache = str(tmp_path / "cache")
    out_path = str(tmp_path / "signs.bin")
    code, _ = run(
        ["sieve-signs", "--weight", "12", "--limit", "1000",
         "--cache-dir", cache, "--out", out_path],
        capsys,
    )
    assert code == 0
    raw = open(out_path, "rb").read()
    assert len(raw) == 1000
    assert raw[0] == 0x01  # lambda(1) = 1
    assert raw[1] == 0xFF  # lambda(2) < 0 for Delta
    table = hecke.eigenform(12, 1000)
    fs = sieves.build_factor_sieve(1000)
    signs = sieves.sign_sieve(sieves.lambda_sieve(table, fs, 1000))
    decoded = np.frombuffer(raw, dtype=np.int8)
    assert np.array_equal(decoded, signs.sign[1:1001])


def test_emit_exit_codes(tmp_path, capsys):
    import time

    passing = cli.ExperimentReport({"x": 1})
    passing.add_verdict("ok", 1.0, 2.0, True)
    assert cli._emit(passing, None, time.time()) == 0
    failing = cli.ExperimentReport({"x": 1})
    failing.add_verdict("ok", 1.0, 2.0, True)
    failing.add_verdict("bad", 3.0, 2.0, False)
    assert cli._emit(failing, None, time.time()) == 2
    capsys.readouterr()


def test_usage_errors_exit_1(tmp_path, capsys):
    assert cli.main(["sign-changes", "--limit", "50",
                     "--cache-dir", str(tmp_path)]) == 1
    assert cli.main(["tolev", "--q", "12", "--a", "1", "--limit", "10000",
                     "--cache-dir", str(tmp_path)]) == 1
    assert cli.main(["sign-changes", "--d", "-4", "--limit", "10000",
                     "--cache-dir", str(tmp_path)]) == 1
    capsys.readouterr()
