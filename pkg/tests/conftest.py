"""Pytest fixtures and the acceptance-line terminal summary hook."""

from __future__ import annotations

import json

import pytest

import helpers
from helpers import FIXTURE_DIR, build_pipeline
from mame.data import RunConfig


@pytest.fixture()
def protocol_fixtures():
    model = json.loads((FIXTURE_DIR / "linear_model.json").read_text())
    cases = json.loads((FIXTURE_DIR / "cases.json").read_text())
    return model, cases


@pytest.fixture(scope="session")
def small_pipeline():
    """Shared n=20, p=4 additive-sine pipeline for read-only tests."""
    return build_pipeline(20, 4, seed=3, cfg=RunConfig(seed=3, t=1.05))


def pytest_terminal_summary(terminalreporter):
    if helpers.ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in helpers.ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
