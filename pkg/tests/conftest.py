import random

import pytest



@pytest.fixture
def rng():
    return random.Random(20240601)





def pytest_terminal_summary(terminalreporter):
    from test_acceptance import LINES  # noqa: PLC0415

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(LINES, key=lambda s: int(s.split(".")[0].split()[-1])):
            terminalreporter.write_line(line)
