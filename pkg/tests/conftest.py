import os
from pathlib import Path

import pytest
from hypothesis import settings

from smellml.cli import load_dataset
from smellml.synthetic import FE_LABEL, LM_LABEL, reference_like

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

# Directory holding the published long-method / feature-envy ARFF files. When
# unset, the synthetic stand-in with the same shapes is used.
REFERENCE_DIR = os.environ.get("SMELLML_REFERENCE_DIR")


def load_reference():
    if REFERENCE_DIR:
        root = Path(REFERENCE_DIR)
        lm = load_dataset(root / "long-method.arff", [os.environ.get("SMELLML_LM_LABEL", LM_LABEL)])
        fe = load_dataset(root / "feature-envy.arff", [os.environ.get("SMELLML_FE_LABEL", FE_LABEL)])
        return lm, fe, "reference"
    lm, fe = reference_like(0)
    return lm, fe, "synthetic"


@pytest.fixture(scope="session")
def reference():
    return load_reference()


# ---------------------------------------------------------------- acceptance summary

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, text): acceptance criterion checked by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    cid, text = mark.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        detail = getattr(item, "criterion_detail", "")
        _criteria[cid] = (report.outcome, text, detail)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid in sorted(_criteria, key=lambda c: (c[0], int(c[1:]))):
        outcome, text, detail = _criteria[cid]
        status = {"passed": "PASS", "skipped": "SKIP"}.get(outcome, "FAIL")
        line = f"{cid} {status}  {text}"
        if detail:
            line += f"  [{detail}]"
        tr.write_line(line)
