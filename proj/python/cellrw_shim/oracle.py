"""Runs a cell in a namespace and compares two runs."""

import contextlib
import dataclasses
import io
import warnings

import numpy as np
import pandas as pd

from .session import run_source

FLOAT_RTOL = 1e-12


@dataclasses.dataclass
class Run:
    namespace: dict
    value: object = None
    error: type = None  # exception class raised by the cell, if any
    stdout: str = ""


def execute(source, namespace):
    out = io.StringIO()
    with contextlib.redirect_stdout(out), warnings.catch_warnings(), np.errstate(all="ignore"):
        warnings.simplefilter("ignore")
        try:
            value = run_source(source, namespace)
        except Exception as e:
            return Run(namespace, None, type(e), out.getvalue())
    return Run(namespace, value, None, out.getvalue())


def generated(name):
    return name.startswith("__cellrw_")


def visible(namespace):
    """User-level bindings: no dunders, generated temps, modules or functions."""
    return {k: v for k, v in namespace.items()
            if not k.startswith("__") and not callable(v) and type(v).__name__ != "module"}


def guard_outcome(namespace):
    oks = [v for k, v in namespace.items() if k.startswith("__cellrw_ok")]
    return bool(oks[-1]) if oks else None


def _same_type(x, y):
    # Classes defined by each run's setup are distinct objects with one name.
    return type(x).__qualname__ == type(y).__qualname__


def assert_same(x, y, path="value"):
    """Exact for non-floats, FLOAT_RTOL relative for floats. Raises AssertionError."""
    assert _same_type(x, y), "%s: %s vs %s" % (path, type(x).__name__, type(y).__name__)
    if isinstance(x, pd.Series):
        pd.testing.assert_series_equal(x, y, check_exact=x.dtype.kind not in "fc", rtol=FLOAT_RTOL, atol=0, obj=path)
    elif isinstance(x, pd.DataFrame):
        pd.testing.assert_frame_equal(x, y, check_exact=False, rtol=FLOAT_RTOL, atol=0, obj=path)
        for c in x.columns:
            if x[c].dtype.kind not in "fc":
                pd.testing.assert_series_equal(x[c], y[c], check_exact=True, obj="%s[%r]" % (path, c))
    elif isinstance(x, pd.Index):
        pd.testing.assert_index_equal(x, y, obj=path)
    elif isinstance(x, np.ndarray):
        assert x.dtype == y.dtype and x.shape == y.shape, path
        if x.dtype.kind in "fc":
            np.testing.assert_allclose(x, y, rtol=FLOAT_RTOL, atol=0, equal_nan=True, err_msg=path)
        else:
            assert np.array_equal(x, y), path
    elif isinstance(x, dict):
        assert list(x) == list(y), "%s: keys differ" % path
        for k in x:
            assert_same(x[k], y[k], "%s[%r]" % (path, k))
    elif isinstance(x, (list, tuple)):
        assert len(x) == len(y), "%s: lengths differ" % path
        for i, (a, b) in enumerate(zip(x, y)):
            assert_same(a, b, "%s[%d]" % (path, i))
    elif isinstance(x, (float, np.floating)):
        assert (np.isnan(x) and np.isnan(y)) or x == y or abs(x - y) <= FLOAT_RTOL * max(abs(x), abs(y)), \
            "%s: %r vs %r" % (path, x, y)
    else:
        assert x == y, "%s: %r vs %r" % (path, x, y)


def compare(original, rewritten):
    """None when the two runs are equivalent, otherwise a description."""
    if original.error is not rewritten.error:
        return "original raised %s, rewrite raised %s" % (
            getattr(original.error, "__name__", None), getattr(rewritten.error, "__name__", None))
    if original.stdout != rewritten.stdout:
        return "printed output differs"
    try:
        assert_same(original.value, rewritten.value, "displayed value")
        a, b = visible(original.namespace), visible(rewritten.namespace)
        extra = set(a) ^ set(b)
        assert not extra, "bindings differ: %s" % sorted(extra)
        for k in a:
            assert_same(a[k], b[k], k)
    except AssertionError as e:
        return str(e).strip() or "values differ"
    return None
