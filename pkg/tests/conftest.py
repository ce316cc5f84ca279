import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make `util` importable

from codeswitch.model import TrainConfig, train
from codeswitch.toygen import ToySpec, generate_toy


@pytest.fixture(scope="session")
def toy():
    return generate_toy(ToySpec())


@pytest.fixture(scope="session")
def toy_small():
    return generate_toy(ToySpec(n_train=60, n_test=15, seed=11))


@pytest.fixture(scope="session")
def victim(toy):
    """The default victim: trained on the toy pivot training set, seed 0."""
    return train(TrainConfig(seed=0), toy.train.pivot)


@pytest.fixture(scope="session")
def victim_small(toy_small):
    return train(TrainConfig(epochs=10, seed=0), toy_small.train.pivot)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion at the end of a run."""
    rows = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py::test_c" in nodeid:
                rows.append((nodeid.split("::")[-1], outcome))
    if not rows:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in sorted(set(rows)):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")
