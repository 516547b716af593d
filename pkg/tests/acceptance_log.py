"""Collects one pass/fail line per acceptance criterion."""

LINES: list[str] = []


def report(number: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}"
    if detail:
        line += f" ({detail})"
    LINES.append(line)
    print(line)
