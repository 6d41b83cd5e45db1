import pytest

from nlpi.config import load_config, scenario_from_config


@pytest.fixture(scope="session")
def preset():
    def get(name, **run):
        cfg = load_config(name)
        cfg["run"].update(run)
        return scenario_from_config(cfg)

    return get


ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(n: int, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(ACCEPTANCE_LINES[n])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
