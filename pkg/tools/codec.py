"""Compact plan encoding: no timestamps, no parentheses, no END."""

from planning.model import TimedPlan
from utils.identifiers import is_name


class DecodeFailure(ValueError):
    def __init__(self, message: str, line: int):
        self.message = message
        self.line = line
        super().__init__(f"{message} (line {line})")

    def __reduce__(self):
        return (DecodeFailure, (self.message, self.line))


def encode_plan(plan: TimedPlan) -> str:
    return "\n".join(" ".join((step.action,) + step.args) for step in plan.steps)


def decode_plan(compact: str) -> str:
    """
    Restore VAL's plan format from compact text.

    The k-th non-blank line becomes ``<k:05d>: (<tokens>)``; ``END`` is
    appended. A trailing ``END`` in the input is tolerated.

    Raises:
        DecodeFailure: When a line contains a token that is not a legal identifier
    """
    numbered = [
        (n, line.split()) for n, line in enumerate(compact.splitlines(), start=1) if line.strip()
    ]
    if numbered and len(numbered[-1][1]) == 1 and numbered[-1][1][0].upper() == "END":
        numbered.pop()

    lines = []
    for k, (line_number, tokens) in enumerate(numbered, start=1):
        for token in tokens:
            if not is_name(token):
                raise DecodeFailure(f"illegal token {token!r}", line_number)
        lines.append(f"{k:05d}: ({' '.join(tokens)})")
    lines.append("END")
    return "\n".join(lines)
