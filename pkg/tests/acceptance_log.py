"""Shared record of acceptance outcomes, printed in the terminal summary."""

LINES: list[str] = []


def record(number: int, name: str, ok: bool, detail: str = "") -> None:
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {name}"
    if detail:
        line += f"  [{detail}]"
    LINES.append(line)
    print(line)
