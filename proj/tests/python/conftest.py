import os
import pathlib
import shutil

import pytest


def _repo_root() -> pathlib.Path:
    env = os.environ.get("STABLETREES_REPO")
    if env:
        return pathlib.Path(env)
    return pathlib.Path(__file__).resolve().parents[2]


@pytest.fixture(scope="session")
def repo_root() -> pathlib.Path:
    return _repo_root()


@pytest.fixture(scope="session")
def cli(repo_root) -> str:
    env = os.environ.get("STABLETREE_CLI")
    if env and os.access(env, os.X_OK):
        return env
    built = repo_root / "build" / "stabletree"
    if built.exists():
        return str(built)
    found = shutil.which("stabletree")
    if found:
        return found
    pytest.skip("stabletree binary not found (set STABLETREE_CLI)")
