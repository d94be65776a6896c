import json
import os
import stat
import subprocess
import sys

import pandas as pd
import pytest

from cellrw_shim import cases, engine, harness, oracle, session

ENGINE = os.environ.get("CELLRW_ENGINE")
needs_engine = pytest.mark.skipif(not ENGINE or not os.access(ENGINE, os.X_OK), reason="CELLRW_ENGINE not set")

SORT_HEAD = "out = s.sort_values().head(n=3)\nout\n"
APPLY_F = "def f(x):\n    return x['a'] * 2 + x['b']\n"


def fake_engine(tmp_path, body):
    path = tmp_path / "cellrw"
    path.write_text("#!/bin/sh\n" + body + "\n")
    path.chmod(path.stat().st_mode | stat.S_IXUSR)
    return str(path)


def new_state(**kwargs):
    kwargs.setdefault("engine", ENGINE)
    kwargs.setdefault("timeout", 10.0)
    return session.SessionState.create(**kwargs)


def history_of(state):
    with open(state.history_path, encoding="utf-8") as f:
        return f.read()


# Fallback paths.

def test_missing_engine_runs_original(tmp_path, monkeypatch, caplog):
    monkeypatch.delenv("CELLRW_ENGINE", raising=False)
    monkeypatch.setenv("PATH", str(tmp_path))
    state = session.SessionState.create(engine=str(tmp_path / "absent"))
    value = session.hook_cell(state, SORT_HEAD, {"s": pd.Series([3, 1, 2, 5])})
    assert list(value) == [1, 2, 3]
    assert "running the cell unchanged" in caplog.text
    assert state.last_report is None


def test_timeout_runs_original(tmp_path):
    state = session.SessionState.create(engine=fake_engine(tmp_path, "sleep 5"), timeout=0.2)
    ns = {}
    assert session.hook_cell(state, "x = 40 + 2\nx\n", ns) == 42
    assert "x = 40 + 2" in history_of(state)


def test_engine_error_runs_original(tmp_path):
    state = session.SessionState.create(engine=fake_engine(tmp_path, "echo broken >&2; exit 3"))
    assert session.rewrite_source(state, "y = 1\n") == "y = 1\n"


def test_cell_errors_propagate(tmp_path):
    state = session.SessionState.create(engine=fake_engine(tmp_path, "exit 2"))
    with pytest.raises(ZeroDivisionError):
        session.hook_cell(state, "1 / 0\n", {})


def test_find_engine_order(tmp_path, monkeypatch):
    a = fake_engine(tmp_path, "true")
    monkeypatch.setenv("CELLRW_ENGINE", a)
    assert engine.find_engine() == a
    assert engine.find_engine(a) == a
    monkeypatch.setenv("CELLRW_ENGINE", str(tmp_path / "missing"))
    monkeypatch.setenv("PATH", str(tmp_path))
    assert engine.find_engine() == a
    monkeypatch.setenv("PATH", "")
    with pytest.raises(engine.EngineError):
        engine.find_engine()


# History.

def test_history_records_original_text(tmp_path):
    state = session.SessionState.create(engine=fake_engine(tmp_path, "echo 'z = 0'"))
    session.rewrite_source(state, "a = 1")
    session.rewrite_source(state, "b = 2\n")
    assert history_of(state) == "# %%\na = 1\n# %%\nb = 2\n"


@needs_engine
def test_function_resolved_from_history():
    state = new_state()
    ns = {"df": pd.DataFrame({"a": [1.0, 2.0], "b": [0.5, 0.25]})}
    session.hook_cell(state, APPLY_F, ns)
    rewritten = session.rewrite_source(state, "out = df.apply(f, axis=1)\nout\n")
    assert "f(df)" in rewritten
    assert state.last_report["matches"][0]["rule"] == "apply-direct"
    value = session.run_source(rewritten, ns)
    assert list(value) == [2.5, 4.25]
    assert oracle.guard_outcome(ns) is True


@needs_engine
def test_redefinition_after_history_takes_slow_path():
    state = new_state()
    ns = {"df": pd.DataFrame({"a": [1.0, 2.0], "b": [0.5, 0.25]})}
    session.hook_cell(state, APPLY_F, ns)
    exec(APPLY_F.replace("* 2", "* 3"), ns)  # redefined outside the hook
    value = session.hook_cell(state, "out = df.apply(f, axis=1)\nout\n", ns)
    assert list(value) == [3.5, 6.25]
    assert oracle.guard_outcome(ns) is False


# Hook and modes.

@needs_engine
def test_hook_cell_rewrites_and_matches_original():
    state = new_state()
    ns = {"s": pd.Series([4, 1, 3, 2])}
    value = session.hook_cell(state, SORT_HEAD, ns)
    assert state.last_report["outcome"] == "rewritten"
    assert list(value) == [1, 2, 3]


@needs_engine
def test_disabled_rule_is_left_alone():
    state = new_state(enabled={"nsmallest": False})
    assert session.rewrite_source(state, SORT_HEAD) == SORT_HEAD


@needs_engine
def test_annotated_mode():
    state = new_state(mode="annotated")
    assert session.rewrite_source(state, SORT_HEAD) == SORT_HEAD
    annotated = "# cellrw\n" + SORT_HEAD
    assert session.rewrite_source(state, annotated) != annotated


def test_annotated_mode_from_environment(monkeypatch):
    monkeypatch.setenv("CELLRW_SHIM_MODE", "annotated")
    assert session.SessionState.create().mode == "annotated"


def test_custom_execute():
    state = session.SessionState.create(engine="/nonexistent")
    seen = []
    session.hook_cell(state, "q = 1\n", execute=seen.append)
    assert seen == ["q = 1\n"]


def test_run_source_registers_text_for_inspect():
    ns = {}
    session.run_source("def h():\n    return 1\n", ns)
    import inspect
    assert inspect.getsource(ns["h"]) == "def h():\n    return 1\n"


@needs_engine
def test_ipython_extension(monkeypatch):
    interactiveshell = pytest.importorskip("IPython.core.interactiveshell")
    monkeypatch.setenv("CELLRW_ENGINE", ENGINE)
    monkeypatch.setattr(engine, "DEFAULT_TIMEOUT", 10.0)
    ip = interactiveshell.InteractiveShell.instance()
    try:
        ip.user_ns["pd"] = pd
        ip.run_cell("df = pd.DataFrame({'a': [1.0, 2.0], 'b': [0.5, 0.25]})")
        before = len(ip.input_transformers_post)
        session.load_ipython_extension(ip)
        session.load_ipython_extension(ip)
        assert len(ip.input_transformers_post) == before + 1
        state = ip.user_ns["cellrw_session"]
        state.timeout = 10.0
        ip.run_cell(APPLY_F)
        result = ip.run_cell("out = df.apply(f, axis=1)\nout")
        assert result.success
        assert list(result.result) == [2.5, 4.25]
        assert state.last_report["outcome"] == "rewritten"
        assert ip.user_ns["__cellrw_ok"] is True
        assert "def f(x)" in history_of(state)
        session.unload_ipython_extension(ip)
        assert len(ip.input_transformers_post) == before
    finally:
        session.unload_ipython_extension(ip)
        interactiveshell.InteractiveShell.clear_instance()


# Harness.

def test_cases_are_deterministic():
    for rule in cases.RULES:
        a, b = cases.make_case(rule, 3), cases.make_case(rule, 3)
        assert a.cell == b.cell
        assert oracle.compare(oracle.execute("", a.namespace()), oracle.execute("", b.namespace())) is None


def test_oracle_detects_differences():
    ns = lambda: {"s": pd.Series([1.0, 2.0])}
    same = oracle.compare(oracle.execute("s * 2\n", ns()), oracle.execute("s + s\n", ns()))
    assert same is None
    assert oracle.compare(oracle.execute("s * 2\n", ns()), oracle.execute("s * 3\n", ns()))
    assert oracle.compare(oracle.execute("s.rename('x')\n", ns()), oracle.execute("s\n", ns()))
    assert "raised" in oracle.compare(oracle.execute("1 / 0\n", {}), oracle.execute("1\n", {}))
    assert oracle.compare(oracle.execute("print(1)\n", {}), oracle.execute("print(2)\n", {}))
    assert "bindings" in oracle.compare(oracle.execute("t = 1\n", {}), oracle.execute("u = 1\n", {}))
    # Float tolerance is relative.
    assert oracle.compare(oracle.execute("0.1 + 0.2\n", {}), oracle.execute("0.3\n", {})) is None


@needs_engine
def test_check_equivalence_each_rule():
    for rule in cases.RULES:
        for seed in range(3):
            v = harness.check_equivalence(cases.make_case(rule, seed, rows=50), ENGINE)
            assert v.equal, (rule, seed, v.detail)
            assert v.rewritten


@needs_engine
def test_fallback_cases_take_slow_path():
    for case in cases.fallback_cases(rows=30):
        v = harness.check_equivalence(case, ENGINE)
        assert v.equal, (case.name, v.detail)


@needs_engine
def test_divergence_is_reported(tmp_path):
    # An engine that rewrites every cell into something else.
    bogus = fake_engine(tmp_path, """
while [ $# -gt 0 ]; do
  case "$1" in --report-file) shift; echo '{}' > "$1";; esac
  shift
done
echo 'out = s.head(1)'
echo 'out'""")
    v = harness.check_equivalence(cases.make_case("nsmallest", 0, rows=20), bogus)
    assert not v.equal and v.status == "divergent"


@needs_engine
def test_time_pair():
    t_o, t_r, ratio = harness.time_pair(cases.make_case("substr-contains", 0), rows=2000, trials=3, engine=ENGINE)
    assert t_o > 0 and t_r > 0 and ratio == pytest.approx(t_o / t_r)


@needs_engine
def test_cli_json_report():
    proc = subprocess.run([sys.executable, "-m", "cellrw_shim.harness", "run", "--rules", "concat-lists",
                           "--seeds", "3", "--rows", "20", "--report", "json", "--engine", ENGINE],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    summary = json.loads(proc.stdout.splitlines()[0])
    assert summary["rule"] == "concat-lists" and summary["equal"] == 3 and summary["divergent"] == 0


def test_cli_rejects_unknown_rule():
    with pytest.raises(SystemExit):
        harness.main(["run", "--rules", "nope"])
