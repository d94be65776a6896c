"""Seeded equivalence cases for the builtin rules."""

import dataclasses

import numpy as np
import pandas as pd

RULES = ("nsmallest", "concat-lists", "str-split-loop", "apply-direct", "apply-select", "substr-contains")


@dataclasses.dataclass(frozen=True)
class GeneratorSpec:
    rows: int
    dtype: str = "float64"
    null_rate: float = 0.0
    alphabet: str = "abc"
    seed: int = 0


@dataclasses.dataclass
class EquivalenceCase:
    rule: str
    spec: GeneratorSpec
    cell: str
    name: str = ""
    setup: str = ""          # runs before the cell in both executions
    history: str = None      # earlier cells, as a "# %%" separated file
    expect_fast: bool = None  # guard outcome the case is built for; None when not fixed
    divergence: frozenset = frozenset()  # e.g. {"index-wrap"}

    def namespace(self):
        """Fresh inputs; identical for identical specs."""
        ns = {"__name__": "__main__", "pd": pd, "np": np}
        ns.update(_DATA[self.rule](self.spec))
        return ns


def _rng(spec, stream=0):
    return np.random.default_rng([spec.seed, stream])


def _with_nulls(rng, values, rate):
    if rate <= 0:
        return values
    values = pd.Series(values).astype(object if values.dtype.kind in "OUSb" else "float64")
    mask = rng.random(len(values)) < rate
    if len(values):
        mask[rng.integers(len(values))] = True
    values[mask] = None
    return values.to_numpy()


def _strings(rng, n, alphabet, lo=0, hi=6):
    return np.array(["".join(rng.choice(list(alphabet), rng.integers(lo, hi + 1))) for _ in range(n)], dtype=object)


def _index(rng, n):
    return pd.Index(rng.permutation(n) + 100)


# Data builders: spec -> bindings.

def _data_nsmallest(spec):
    rng = _rng(spec)
    values = rng.permutation(spec.rows * 3)[:spec.rows]
    values = values.astype("int64") if spec.dtype == "int64" else values / 8.0 - spec.rows
    values = _with_nulls(rng, values, spec.null_rate)
    return {"s": pd.Series(values, index=_index(rng, spec.rows), name="s")}


def _column(rng, dtype, n):
    if dtype == "int64":
        return pd.Series(rng.integers(-1000, 1000, n), dtype="int64")
    if dtype == "bool":
        return pd.Series(rng.random(n) < 0.5)
    return pd.Series(rng.normal(0, 100, n))


def _data_concat(spec):
    rng = _rng(spec)
    y_rows = int(rng.integers(1, spec.rows + 1))
    x = _column(rng, spec.dtype, spec.rows).rename("x")
    y = _column(rng, spec.dtype, y_rows).rename("y")
    x.index = _index(rng, spec.rows)
    return {"x": x, "y": y}


def _data_split(spec):
    rng = _rng(spec)
    delim = _split_delimiter(spec)
    parts = _strings(rng, spec.rows, spec.alphabet)
    cells = []
    for i, p in enumerate(parts):
        k = int(rng.integers(0, 3)) if i else 1
        text = p
        for _ in range(k):
            at = int(rng.integers(0, len(text) + 1))
            text = text[:at] + delim + text[at:]
        cells.append(text)
    col = _with_nulls(rng, np.array(cells, dtype=object), spec.null_rate)
    df = pd.DataFrame({"C": col, "K": rng.integers(0, 9, spec.rows)}, index=_index(rng, spec.rows))
    return {"df": df}


def _data_apply_direct(spec):
    rng = _rng(spec)
    cols = {}
    for c in "abc":
        if spec.dtype == "int64":
            cols[c] = rng.integers(-5, 6, spec.rows).astype("int64")
        else:
            cols[c] = np.round(rng.normal(0, 10, spec.rows), 3)
    df = pd.DataFrame(cols, index=_index(rng, spec.rows))
    if "t" in spec.alphabet:
        df["t"] = _strings(rng, spec.rows, "xyz", 1, 3)
    return {"df": df, "g": 3}


def _data_apply_select(spec):
    rng = _rng(spec)
    df = pd.DataFrame({
        "A": _strings(rng, spec.rows, spec.alphabet, 1, 2),
        "B": _strings(rng, spec.rows, spec.alphabet, 1, 2),
        "N": rng.integers(-3, 4, spec.rows).astype("int64"),
        "F": np.round(rng.random(spec.rows), 2),
    }, index=_index(rng, spec.rows))
    if spec.null_rate:
        df["A"] = _with_nulls(rng, df["A"].to_numpy(), spec.null_rate)
    return {"df": df, "ls": list(rng.choice(list(spec.alphabet), 2)), "k": int(rng.integers(-2, 3))}


def _data_substr(spec):
    rng = _rng(spec)
    if spec.dtype == "int64":
        values = rng.integers(0, 9, spec.rows)
    else:
        values = _with_nulls(rng, _strings(rng, spec.rows, spec.alphabet), spec.null_rate)
    return {"s": pd.Series(values, index=_index(rng, spec.rows))}


_DATA = {
    "nsmallest": _data_nsmallest,
    "concat-lists": _data_concat,
    "str-split-loop": _data_split,
    "apply-direct": _data_apply_direct,
    "apply-select": _data_apply_select,
    "substr-contains": _data_substr,
}


def _split_delimiter(spec):
    return ("(", ",", " - ", "::")[spec.seed % 4]


# Cell generators: random source shapes driven by the same seed.

def _arith(rng, operands, depth):
    if depth == 0 or rng.random() < 0.3:
        return str(rng.choice(operands))
    op = rng.choice(["+", "-", "*", "/", "//", "%", "**"], p=[0.22, 0.2, 0.22, 0.16, 0.07, 0.07, 0.06])
    left = _arith(rng, operands, depth - 1)
    if op == "**":
        return "(%s) ** %d" % (left, rng.integers(0, 3))
    right = _arith(rng, operands, depth - 1)
    return "(%s %s %s)" % (left, op, right) if rng.random() < 0.5 else "%s %s %s" % (left, op, right)


def _apply_direct_cell(rng):
    extract = rng.random() < 0.5
    operands = ["x['a']", "x['b']", "x['c']", "k", "g", "2", "0.5"]
    lines = ["def f(x, k=%s):" % rng.choice(["2", "1.5", "-3"])]
    if extract:
        lines.append("    v = x['a']")
        operands.append("v")
    body = _arith(rng, operands, 3)
    if "x[" not in body and "v" not in body:
        body = "x['b'] - (%s)" % body
    lines.append("    return " + body)
    return "\n".join(lines) + "\n\nout = df.apply(f, axis=1)\nout\n"


def _condition(rng, depth=1):
    atoms = [
        "row['A'] == row['B']", "row['A'] != 'a'", "row['N'] > k", "row['N'] <= 1", "row['F'] < 0.5",
        "row['A'].startswith('a')", "row['B'].endswith('b')", "row['A'] in ls", "row['B'] not in ('a', 'bc')",
        "0 < row['N'] < 2", "0.25 >= row['F']", "row['N'] == row['N']",
    ]
    pick = str(rng.choice(atoms))
    if depth > 0 and rng.random() < 0.4:
        return "%s %s %s" % (pick, rng.choice(["and", "or"]), _condition(rng, depth - 1))
    if depth > 0 and rng.random() < 0.15:
        return "not (%s)" % pick
    return pick


def _apply_select_cell(rng):
    kind = rng.choice(["str", "int", "float", "bool"])
    values = {"str": ["'P'", "'Q'", "'R'", "'NA'"], "int": ["1", "2", "3", "0"],
              "float": ["1.5", "2.5", "0.25", "0.0"], "bool": ["True", "False", "True", "False"]}[kind]
    branches = int(rng.integers(1, 4))
    lines = ["def foo(row):"]
    for i in range(branches):
        lines.append("  %s %s:" % ("if" if i == 0 else "elif", _condition(rng)))
        lines.append("    return " + values[i])
    if rng.random() < 0.5:
        lines += ["  else:", "    return " + values[3]]
    else:
        lines.append("  return " + values[3])
    return "\n".join(lines) + "\n\nout = df.apply(foo, axis=1)\nout\n"


def make_case(rule, seed, rows=200):
    """A random case for `rule` whose inputs satisfy the rule's preconditions."""
    rng = np.random.default_rng([seed, RULES.index(rule), 7])
    name = "%s/seed-%d" % (rule, seed)
    if rule == "nsmallest":
        spec = GeneratorSpec(rows, str(rng.choice(["int64", "float64"])), seed=seed)
        cell = "out = s.sort_values().head(n=%d)\nout\n" % rng.integers(1, rows + 3)
    elif rule == "concat-lists":
        spec = GeneratorSpec(rows, str(rng.choice(["int64", "float64", "bool"])), seed=seed)
        if rng.random() < 0.5:
            cell = "out = pd.Series(x.tolist() + y.tolist())\nout\n"
        else:
            cell = "from pandas import Series\nout = Series(x.tolist() + y.tolist())\nout\n"
    elif rule == "str-split-loop":
        spec = GeneratorSpec(rows, "object", alphabet=str(rng.choice(["abc", "a(b", "x,y z"])), seed=seed)
        targets = [str(t) for t in rng.choice(["left", "right", "C", "K"], 2, replace=False)]
        cell = "df[[%r, %r]] = df['C'].str.split(%r, n=1, expand=True)\n" % (targets[0], targets[1], _split_delimiter(spec))
    elif rule == "apply-direct":
        spec = GeneratorSpec(rows, str(rng.choice(["int64", "float64"])), seed=seed)
        cell = _apply_direct_cell(rng)
    elif rule == "apply-select":
        spec = GeneratorSpec(rows, "object", alphabet="abc", seed=seed)
        cell = _apply_select_cell(rng)
    elif rule == "substr-contains":
        spec = GeneratorSpec(rows, "object", alphabet="abc", seed=seed)
        needle = "".join(rng.choice(list("abc"), rng.integers(0, 3)))
        cell = "out = s.apply(lambda t: %r in t)\nout\n" % needle
    else:
        raise ValueError("unknown rule %r" % rule)
    # Whether a zero divisor occurs depends on the drawn data.
    fast = None if rule == "apply-direct" else True
    return EquivalenceCase(rule, spec, cell, name=name, expect_fast=fast)


APPLY_F = "def f(x):\n    return x['a'] * 2 + x['b']\n"
APPLY_F_CHANGED = "def f(x):\n    return x['a'] * 3 + x['b']\n"
SELECT_FOO = "def foo(row):\n  if row['A'] in ls:\n    return 'P'\n  else:\n    return 'Q'\n"


def fallback_cases(rows=50):
    """Inputs that violate a precondition: the guard must fail and the original run."""
    cases = []

    def add(rule, name, spec, cell, setup="", history=None, expect_fast=False):
        cases.append(EquivalenceCase(rule, spec, cell, name="%s/%s" % (rule, name), setup=setup,
                                     history=history, expect_fast=expect_fast))

    head = "out = s.sort_values().head(n=5)\nout\n"
    add("nsmallest", "nulls", GeneratorSpec(rows, "float64", null_rate=0.1, seed=1), head)
    add("nsmallest", "duplicates", GeneratorSpec(rows, "int64", seed=2), head, setup="s = s % 7\n")
    add("nsmallest", "wrong-type", GeneratorSpec(rows, seed=3), head,
        setup="class L(list):\n    def sort_values(self):\n        return L(sorted(self))\n"
              "    def head(self, n=5):\n        return self[:n]\ns = L(s.tolist())\n")
    concat = "out = pd.Series(x.tolist() + y.tolist())\nout\n"
    add("concat-lists", "mixed-dtypes", GeneratorSpec(rows, "int64", seed=4), concat, setup="y = y.astype('float64')\n")
    add("concat-lists", "same-names", GeneratorSpec(rows, "int64", seed=5), concat, setup="y = y.rename('x')\n")
    add("concat-lists", "wrong-type", GeneratorSpec(rows, "int64", seed=6), concat, setup="x = x.to_numpy()\n")
    split = "df[['left', 'right']] = df['C'].str.split('(', n=1, expand=True)\n"
    add("str-split-loop", "nulls", GeneratorSpec(rows, null_rate=0.1, seed=8), split)
    add("str-split-loop", "no-delimiter", GeneratorSpec(rows, seed=8), split,
        setup="df['C'] = df['C'].str.replace('(', '', regex=False)\n")
    add("str-split-loop", "wrong-type", GeneratorSpec(rows, seed=8), split, setup="df = dict(df)\n")
    apply_f = "out = df.apply(f, axis=1)\nout\n"
    add("apply-direct", "redefined-function", GeneratorSpec(rows, seed=9), apply_f,
        setup=APPLY_F_CHANGED, history="# %%\n" + APPLY_F)
    add("apply-direct", "mixed-numeric", GeneratorSpec(rows, "int64", seed=10), APPLY_F + apply_f,
        setup="df['b'] = df['b'] + 0.5\n")
    add("apply-direct", "zero-divisor-text-frame", GeneratorSpec(rows, alphabet="t", seed=11),
        "def f(x):\n    return x['a'] / (x['b'] - x['b'])\nout = df.apply(f, axis=1)\nout\n")
    add("apply-direct", "power-text-frame", GeneratorSpec(rows, alphabet="t", seed=12),
        "def f(x):\n    return x['a'] ** 2\nout = df.apply(f, axis=1)\nout\n")
    add("apply-direct", "zero-divisor-numeric-frame", GeneratorSpec(rows, seed=11),
        "def f(x):\n    return x['a'] / (x['b'] - x['b'])\nout = df.apply(f, axis=1)\nout\n")
    select = "out = df.apply(foo, axis=1)\nout\n"
    add("apply-select", "container-type", GeneratorSpec(rows, seed=13), SELECT_FOO + select, setup="ls = {'a': 1}\n")
    add("apply-select", "nulls", GeneratorSpec(rows, null_rate=0.2, seed=14),
        "def foo(row):\n  if row['A'].startswith('a'):\n    return 'P'\n  else:\n    return 'Q'\n" + select)
    add("apply-select", "redefined-function", GeneratorSpec(rows, seed=15), select,
        setup=SELECT_FOO.replace("'P'", "'Z'"), history="# %%\n" + SELECT_FOO)
    contains = "out = s.apply(lambda t: 'ab' in t)\nout\n"
    add("substr-contains", "nulls", GeneratorSpec(rows, "object", null_rate=0.1, seed=16), contains)
    add("substr-contains", "wrong-type", GeneratorSpec(rows, "int64", seed=17), contains)
    return cases
