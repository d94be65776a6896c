"""Out-of-process calls to the cellrw binary."""

import json
import os
import shutil
import subprocess
import tempfile

DEFAULT_TIMEOUT = 0.25


class EngineError(RuntimeError):
    pass


def find_engine(explicit=None):
    """Binary path from the argument, $CELLRW_ENGINE, or PATH."""
    for candidate in (explicit, os.environ.get("CELLRW_ENGINE"), shutil.which("cellrw")):
        if candidate and os.access(candidate, os.X_OK):
            return candidate
    raise EngineError("cellrw binary not found; set CELLRW_ENGINE")


def rewrite(source, engine=None, history=None, rules=None, disable=None, timeout=DEFAULT_TIMEOUT):
    """Returns (rewritten source, report dict). Raises EngineError on any failure."""
    binary = find_engine(engine)
    with tempfile.TemporaryDirectory(prefix="cellrw-") as tmp:
        cell = os.path.join(tmp, "cell.py")
        report = os.path.join(tmp, "report.json")
        with open(cell, "w", encoding="utf-8", newline="") as f:
            f.write(source)
        args = [binary, "rewrite", "--file", cell, "--report", "json", "--report-file", report]
        if history:
            args += ["--history", history]
        if rules is not None:
            args += ["--rules", ",".join(rules)]
        if disable:
            args += ["--disable", ",".join(disable)]
        try:
            proc = subprocess.run(args, capture_output=True, timeout=timeout)
        except subprocess.TimeoutExpired as e:
            raise EngineError("engine timed out after %.3fs" % timeout) from e
        except OSError as e:
            raise EngineError(str(e)) from e
        if proc.returncode != 0:
            raise EngineError("engine exited with %d: %s" % (proc.returncode, proc.stderr.decode(errors="replace").strip()))
        try:
            with open(report, encoding="utf-8") as f:
                parsed = json.loads(f.readline())
        except (OSError, ValueError):
            parsed = None
        return proc.stdout.decode("utf-8"), parsed
