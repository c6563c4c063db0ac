import functools
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from torpid import graph as gr  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@functools.cache
def cube(d: int) -> gr.BipartiteGraph:
    return gr.hypercube(d)


@functools.cache
def cycle(n: int) -> gr.BipartiteGraph:
    return gr.even_cycle(n)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
