import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("repo", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

_ACCEPTANCE: dict[int, str] = {}


class Criterion:
    def __init__(self, number: int):
        self.number = number
        self.line = None

    def report(self, ok: bool, detail: str) -> bool:
        self.line = f"{'PASS' if ok else 'FAIL'} criterion {self.number:2d}: {detail}"
        print(self.line)
        return ok


@pytest.fixture
def criterion(request):
    number = int(request.node.name.split("_")[2])
    c = Criterion(number)
    yield c
    _ACCEPTANCE[number] = c.line or f"FAIL criterion {number:2d}: raised before reporting"


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[number])
