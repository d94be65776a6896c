"""Per-kernel state and the cell hook."""

import dataclasses
import linecache
import logging
import os
import tempfile

from . import engine as _engine

log = logging.getLogger("cellrw_shim")

ANNOTATION = "# cellrw"
_counter = 0


@dataclasses.dataclass
class SessionState:
    history_path: str
    engine: str = None
    enabled: dict = dataclasses.field(default_factory=dict)  # rule id -> bool; missing means enabled
    last_report: dict = None
    mode: str = "global"  # or "annotated": only cells starting with ANNOTATION are rewritten
    timeout: float = _engine.DEFAULT_TIMEOUT

    @classmethod
    def create(cls, **kwargs):
        """New session with an empty history file in a private directory."""
        directory = tempfile.mkdtemp(prefix="cellrw-session-")
        path = os.path.join(directory, "history.py")
        open(path, "w", encoding="utf-8").close()
        kwargs.setdefault("mode", os.environ.get("CELLRW_SHIM_MODE", "global"))
        return cls(history_path=path, **kwargs)

    def disabled(self):
        return sorted(k for k, on in self.enabled.items() if not on)

    def record(self, source):
        """Appends an executed cell, as written, to the history file."""
        with open(self.history_path, "a", encoding="utf-8", newline="") as f:
            f.write("# %%\n")
            f.write(source if source.endswith("\n") or not source else source + "\n")


def wants_rewrite(state, source):
    if state.mode == "annotated":
        first = source.lstrip("\n").split("\n", 1)[0].strip()
        return first == ANNOTATION
    return True


def rewrite_source(state, source):
    """Engine output for `source`, or `source` itself if the engine fails.

    The original source is appended to history either way.
    """
    out = source
    if wants_rewrite(state, source):
        try:
            out, state.last_report = _engine.rewrite(source, engine=state.engine, history=state.history_path,
                                                     disable=state.disabled(), timeout=state.timeout)
        except _engine.EngineError as e:
            log.warning("cellrw: running the cell unchanged (%s)", e)
            state.last_report = None
            out = source
    state.record(source)
    return out


def _register(source):
    """Registers source text under a fresh pseudo-file so inspect can read it back."""
    global _counter
    _counter += 1
    name = "<cellrw-cell-%d>" % _counter
    linecache.cache[name] = (len(source), None, source.splitlines(True), name)
    return name


def run_source(source, namespace):
    """Executes cell text like a notebook: returns the value of a trailing expression."""
    import ast

    filename = _register(source)
    tree = ast.parse(source, filename)
    last = None
    if tree.body and isinstance(tree.body[-1], ast.Expr):
        last = ast.Expression(tree.body.pop().value)
    exec(compile(tree, filename, "exec"), namespace)
    return eval(compile(last, filename, "eval"), namespace) if last else None


def hook_cell(state, source, namespace=None, execute=None):
    """Rewrites `source` through the engine and executes the result.

    `execute(text)` defaults to running in `namespace`. Engine failures fall
    back to the original text; errors raised by the cell itself propagate.
    """
    text = rewrite_source(state, source)
    if execute is None:
        ns = namespace if namespace is not None else {"__name__": "__main__"}
        return run_source(text, ns)
    return execute(text)


# IPython integration: %load_ext cellrw_shim

_state = None
_transformer = None


def load_ipython_extension(ip):
    global _state, _transformer
    if _transformer is not None:
        return
    _state = SessionState.create()

    def transform(lines):
        source = "".join(lines)
        if not source.strip():
            return lines
        return rewrite_source(_state, source).splitlines(True)

    _transformer = transform
    ip.input_transformers_post.append(transform)
    ip.user_ns.setdefault("cellrw_session", _state)


def unload_ipython_extension(ip):
    global _state, _transformer
    if _transformer in ip.input_transformers_post:
        ip.input_transformers_post.remove(_transformer)
    _state = _transformer = None
