import numpy as np
import pytest

from labelattack.core import LabeledExample


def make_examples(labels, n_features=2, seed=0):
    gen = np.random.default_rng(seed)
    return [LabeledExample.clean(i, gen.standard_normal(n_features), y) for i, y in enumerate(labels)]


@pytest.fixture
def balanced_800():
    return make_examples([1] * 400 + [0] * 400)


ACCEPTANCE_LINES: list[str] = []


def record_criterion(name: str, passed: bool, detail: str) -> None:
    line = f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
