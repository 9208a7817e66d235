import subprocess
import sys

import pytest


def run_pipeline(*args: object) -> subprocess.CompletedProcess:
    """Invoke the companion ranking pipeline's command line."""
    cmd = [sys.executable, "-m", "lexsent.cli"] + [str(a) for a in args]
    return subprocess.run(cmd, capture_output=True, text=True, check=False)


@pytest.fixture(scope="session")
def tiny_workspace(tmp_path_factory):
    """Corpus and folds files produced by the companion pipeline."""
    root = tmp_path_factory.mktemp("tiny_workspace")
    data = root / "tiny.jsonl"
    folds = root / "folds.json"
    made = run_pipeline("make-reference", "--profile", "tiny", "--out", data)
    assert made.returncode == 0, made.stderr
    folded = run_pipeline("folds", "--data", data, "--out", folds)
    assert folded.returncode == 0, folded.stderr
    return {"root": root, "data": data, "folds": folds}
