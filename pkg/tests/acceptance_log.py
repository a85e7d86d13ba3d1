"""Registry of acceptance verdicts, printed by the terminal-summary hook."""

RESULTS: dict[int, tuple[str, bool, list[str]]] = {}


def record(number: int, title: str, checks: list[tuple[str, bool]]) -> bool:
    """Store one verdict line per criterion; return True when every check passed."""
    ok = all(passed for _, passed in checks)
    RESULTS[number] = (title, ok, [f"{'ok ' if p else 'BAD'} {text}" for text, p in checks])
    return ok
