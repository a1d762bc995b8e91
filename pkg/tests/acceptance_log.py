"""Pass/fail lines collected by the acceptance suite."""

LINES: list[str] = []


def record(number: int, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
    LINES.append(line)
    print(line)
