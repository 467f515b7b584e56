import pytest

# criterion number -> list of (label, passed, detail)
ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = {}


@pytest.fixture
def record_criterion():
    def record(number: int, label: str, passed: bool, detail: str) -> None:
        ACCEPTANCE.setdefault(number, []).append((label, bool(passed), detail))
        print(f"criterion {number} [{label}]: {'PASS' if passed else 'FAIL'} {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[number]
        ok = all(p for _, p, _ in parts)
        detail = "; ".join(f"{label}: {'pass' if p else 'FAIL'} ({d})" for label, p, d in parts)
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} | {detail}")
