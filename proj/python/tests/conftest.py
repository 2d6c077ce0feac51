import json
import os
import pathlib
import shutil
import subprocess

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]
SCHEMAS = ROOT / "schemas"
DATA = ROOT / "data"

TOY_Y = [2.00, 2.88, 2.52, 5.00, 1.85, 2.27, 0.92, 3.37, 1.72, 1.15]
TOY_W = [1, 1, 1, 1, 0, 0, 0, 0, 1, 0]


def _cli_path():
    env = os.environ.get("FRTCD_CLI")
    if env:
        return env
    for cand in (ROOT / "build" / "tools" / "frtcd", shutil.which("frtcd")):
        if cand and pathlib.Path(cand).exists():
            return str(cand)
    return None


@pytest.fixture(scope="session")
def cli():
    path = _cli_path()
    if path is None:
        pytest.skip("frtcd binary not built")

    def run(*args, check=True):
        proc = subprocess.run([path, *map(str, args)], capture_output=True, text=True)
        if check and proc.returncode != 0:
            raise AssertionError(f"exit {proc.returncode}: {proc.stderr}")
        return proc

    return run


@pytest.fixture(scope="session")
def schema():
    jsonschema = pytest.importorskip("jsonschema")

    def validate(instance, name):
        with open(SCHEMAS / f"{name}.schema.json") as f:
            s = json.load(f)
        jsonschema.Draft202012Validator.check_schema(s)
        jsonschema.Draft202012Validator(s).validate(instance)

    return validate
