import json
from pathlib import Path

import pytest

FIXTURE_DIR = Path(__file__).resolve().parents[2] / "protocol_fixtures"


@pytest.fixture(scope="session")
def protocol_fixtures():
    model = json.loads((FIXTURE_DIR / "linear_model.json").read_text())
    cases = json.loads((FIXTURE_DIR / "cases.json").read_text())
    return model, cases


@pytest.fixture(scope="session")
def linear_artifact_path():
    return FIXTURE_DIR / "linear_model.json"
