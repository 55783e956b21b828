import json
import pytest

from app import main
from atap.utils import parse_range

QUICK_RANGE = [-1, 1, 2]
GRID_X_SAMPLES = [2, 1.7, 0.6 + 1.1j, 2.3 - 0.4j]


@pytest.fixture(scope="function")
def run_cli(capsys):
    def run(*argv):
        code = main([str(arg) for arg in argv])
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return run


@pytest.fixture(scope="function")
def run_cli_json(run_cli):
    def run(*argv):
        code, out, _ = run_cli(*argv, "--format", "json")
        return code, json.loads(out) if out.strip() else None

    return run


@pytest.fixture(scope="session")
def grid_values(full_grid):
    if full_grid:
        return parse_range("-3..3"), parse_range("-3..3"), GRID_X_SAMPLES
    return QUICK_RANGE, QUICK_RANGE, GRID_X_SAMPLES[:3]
