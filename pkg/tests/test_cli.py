import json
import os

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from fsimple.cli import parse_script
from fsimple.cli.cache import ENV_VAR, Cache, content_key
from fsimple.cli.main import main
from fsimple.errors import ScriptError

CUSP = "ring 5 x y\nideal cusp = y^2 - x^3\nassert domain cusp\n"
NODE = "ring 5 x y\nideal node = y^2 - x^3 - x^2\nassert domain node\n"


@pytest.fixture
def script(tmp_path):
    def write(text, name="s.fs"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return write


def run_json(capsys, *argv):
    code = main(list(argv) + ["--json"])
    out = capsys.readouterr().out
    return code, json.loads(out)


# ---------------------------------------------------------------- parser


def test_parse_simple_script():
    s = parse_script("ring 5 x y\nideal cusp = y^2 - x^3")
    assert s.ctx.p == 5 and s.ctx.vars == ("x", "y")
    assert list(s.ideals) == ["cusp"]
    assert s.ideal("cusp").gens[0].to_str() == "-x^3 + y^2"


def test_parse_params_domain_comments_and_order():
    s = parse_script("# header\nring 3 a b order=lex\nideal I = a*b  # trailing\nparams P = a + b\nassert domain I\n")
    assert s.ctx.order.name == "lex"
    assert s.is_domain("I")
    assert [f.to_str() for f in s.parameters("P")] == ["a + b"]


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("ring 4 x", 1, 6),
        ("ring 5 x\nideal I = x + ", 2, 13),
        ("ring 5 x\nideal I = x\nideal I = x^2", 3, 7),
        ("ring 5 x\nfrobnicate I", 2, 1),
        ("ring 5 x x", 1, 10),
        ("ring 5 x\nring 5 y", 2, 1),
        ("ring 5 x\nideal I = x * * x", 2, 13),
        ("ring 5 x\nassert domain J", 2, 15),
    ],
)
def test_parse_errors_have_location(text, line, column):
    with pytest.raises(ScriptError) as info:
        parse_script(text)
    assert (info.value.line, info.value.column) == (line, column)


def test_trailing_operator_before_ring():
    with pytest.raises(ScriptError) as info:
        parse_script("ideal I = x + ")
    assert (info.value.line, info.value.column) == (1, 13)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(-20, 20), st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=4))
def test_printed_polynomials_reparse(terms):
    text = " + ".join(f"({c})*x^{a}*y^{b}" for c, a, b in terms)
    gens = parse_script(f"ring 7 x y\nideal I = {text}").ideal("I").gens
    assume(gens)
    f = gens[0]
    again = parse_script(f"ring 7 x y\nideal I = {f.to_str()}").ideal("I").gens[0]
    assert again == f


# ---------------------------------------------------------------- commands


def test_fpower(capsys, script):
    code, r = run_json(capsys, script("ring 2 x y\nideal m = x, y\n"), "fpower")
    assert code == 0
    assert r["result"]["generators"] == ["x^2", "y^2"]


def test_report_schema(capsys, script):
    code, r = run_json(capsys, script(CUSP), "dsimple", "--no-cache")
    for key in ["version", "input_hash", "command", "verdict", "route", "witnesses", "transcript", "caps", "timings"]:
        assert key in r
    assert r["caps"]["e_max"] == 6 and r["caps"]["t_max"] == 4 and r["caps"]["window"] == 2
    assert r["caps"]["ladder_e"] == 1


def test_dsimple_cusp_and_node(capsys, script):
    code, r = run_json(capsys, script(CUSP), "dsimple")
    assert (code, r["verdict"]) == (0, "Simple")
    code, r = run_json(capsys, script(NODE), "dsimple")
    assert (code, r["verdict"], r["route"], r["confidence"]) == (0, "NotSimple", "WitnessPair", "Certified")
    assert (r["result"]["witness"]["z"], r["result"]["witness"]["J"]) == ("y", ["x"])


@pytest.mark.parametrize(
    "command, key, expected",
    [
        ("gb", "gb", ["x^3 - y^2"]),
        ("dim", "dim", 1),
        ("testelt", "test_element", "y"),
        ("ptau", "tau", ["y", "x"]),
        ("lgen", "generator", "(y)*eta"),
        ("froot", "root", ["1"]),
    ],
)
def test_commands_on_cusp(capsys, script, command, key, expected):
    code, r = run_json(capsys, script(CUSP), command)
    assert code == 0
    assert r["result"][key] == expected


def test_ext_command(capsys, script):
    code, r = run_json(capsys, script("ring 3 x y z\nideal m = x, y, z\n"), "ext")
    assert r["result"]["index"] == 3 and r["result"]["generators"] == 1
    code, r = run_json(capsys, script("ring 3 x y z\nideal m = x, y, z\n"), "ext", "--index", "1")
    assert r["result"]["zero"] is True


def test_tight_and_fclosure_elements(capsys, script):
    path = script(CUSP + "params J = x\n")
    code, r = run_json(capsys, path, "fclosure", "--elem", "y")
    assert (r["verdict"], r["result"]["e"]) == ("In", 1)
    code, r = run_json(capsys, path, "tight", "--elem", "y")
    assert r["verdict"] == "In" and r["confidence"] == "Certified"
    code, r = run_json(capsys, path, "frational")
    assert r["verdict"] == "No"


def test_inconclusive_exit_code(capsys, script):
    code, r = run_json(capsys, script(CUSP + "params J = x\n"), "fclosure", "--emax", "0")
    assert code == 2 and r["verdict"] == "Inconclusive"


def test_errors_exit_one(capsys, script):
    assert main([script(CUSP), "bogus"]) == 1
    assert "unknown command" in capsys.readouterr().err
    assert main([script("ring 4 x\n"), "gb"]) == 1
    assert "not prime" in capsys.readouterr().err
    assert main([script("ring 5 x y\nideal cusp = y^2 - x^3\n"), "dsimple"]) == 1
    assert "domain" in capsys.readouterr().err


def test_components(capsys, script):
    code, r = run_json(capsys, script("ring 3 x y z\nideal P = x\nideal Q = y\n"), "components", "--tmax", "2")
    assert code == 0
    assert r["result"]["verdicts"] == ["Simple", "Simple"]


def test_human_output(capsys, script):
    assert main([script(CUSP), "testelt"]) == 0
    out = capsys.readouterr().out
    assert "verdict: Done" in out and '"y"' in out


# ---------------------------------------------------------------- determinism and replay


def strip_timings(r):
    return {k: v for k, v in r.items() if k != "timings"}


@pytest.mark.parametrize("text", [CUSP, NODE])
def test_reports_are_deterministic(capsys, script, text):
    path = script(text)
    main([path, "dsimple", "--json", "--no-cache"])
    first = json.loads(capsys.readouterr().out)
    main([path, "dsimple", "--json", "--no-cache"])
    second = json.loads(capsys.readouterr().out)
    assert json.dumps(strip_timings(first), sort_keys=True) == json.dumps(strip_timings(second), sort_keys=True)


@pytest.mark.parametrize("text", [CUSP, NODE])
def test_replay_passes(capsys, script, tmp_path, text):
    code, r = run_json(capsys, script(text), "dsimple")
    report = tmp_path / "r.json"
    report.write_text(json.dumps(r))
    assert main(["--replay", str(report)]) == 0
    assert "0 failed" in capsys.readouterr().out


def test_replay_detects_tampering(capsys, script, tmp_path):
    code, r = run_json(capsys, script(NODE), "dsimple")
    for w in r["witnesses"]:
        if w["kind"] == "integral_dependence":
            w["coefficients"] = ["0", "x^3"]
        if w["kind"] == "frobenius_refutation":
            w["z"] = "x"
    report = tmp_path / "bad.json"
    report.write_text(json.dumps(r))
    assert main(["--replay", str(report)]) == 1
    assert "FAILED" in capsys.readouterr().out


def test_replay_rejects_garbage(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("not json")
    assert main(["--replay", str(bad)]) == 1


# ---------------------------------------------------------------- cache


def test_cache_hit_and_miss(capsys, script, tmp_path):
    cache = tmp_path / "cache"
    path = script(CUSP)
    code, first = run_json(capsys, path, "gb", "--cache-dir", str(cache))
    code, second = run_json(capsys, path, "gb", "--cache-dir", str(cache))
    assert first["timings"]["cache"] == "miss" and second["timings"]["cache"] == "hit"
    assert strip_timings(first) == strip_timings(second)
    code, other = run_json(capsys, script(CUSP.replace("ring 5", "ring 7"), "p7.fs"), "gb", "--cache-dir", str(cache))
    assert other["timings"]["cache"] == "miss"


def test_no_cache_writes_nothing(capsys, script, tmp_path, monkeypatch):
    cache = tmp_path / "cache"
    monkeypatch.setenv(ENV_VAR, str(cache))
    run_json(capsys, script(CUSP), "gb", "--no-cache")
    assert not cache.exists()
    run_json(capsys, script(CUSP), "gb")
    assert cache.exists() and os.listdir(cache)


def test_corrupt_cache_entry_is_recomputed(capsys, script, tmp_path, caplog):
    cache = tmp_path / "cache"
    path = script(CUSP)
    code, good = run_json(capsys, path, "gb", "--cache-dir", str(cache))
    for name in os.listdir(cache):
        (cache / name).write_text("{broken")
    code, again = run_json(capsys, path, "gb", "--cache-dir", str(cache))
    assert again["result"] == good["result"]
    assert "corrupt cache entry" in caplog.text


def test_content_key_depends_on_inputs():
    a = parse_script(CUSP)
    b = parse_script(CUSP.replace("ring 5", "ring 7"))
    ka = content_key(a.ctx, a.ideal().gens, "gb")
    assert ka == content_key(a.ctx, a.ideal().gens, "gb")
    assert ka != content_key(b.ctx, b.ideal().gens, "gb")
    assert ka != content_key(a.ctx, a.ideal().gens, "resolution")


def test_cache_store_is_atomic(tmp_path):
    c = Cache(str(tmp_path))
    c.store("k", {"v": 1})
    assert c.lookup("k") == {"v": 1}
    assert [n for n in os.listdir(tmp_path) if n.endswith(".tmp")] == []
