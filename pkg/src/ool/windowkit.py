"""Character-grid paint surface and scripted input events.

Dialog operators paint onto a :class:`PaintSurface` through two builtins,
``paint_dialog_window`` and ``paint_text``. One character cell stands in for
one pixel, which keeps layouts deterministic and easy to compare against
golden files.
"""

from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .errors import EventError, Pos

DEFAULT_COLS = 80
DEFAULT_ROWS = 25


class PaintSurface:
    def __init__(self, cols: int = DEFAULT_COLS, rows: int = DEFAULT_ROWS):
        if cols <= 0 or rows <= 0:
            raise ValueError("surface size must be positive")
        self.cols = cols
        self.rows = rows
        self.grid = [[" "] * cols for _ in range(rows)]
        self.tx = 0
        self.ty = 0
        self._lock = threading.RLock()

    @property
    def translation(self) -> tuple[int, int]:
        return self.tx, self.ty

    @translation.setter
    def translation(self, value: tuple[int, int]) -> None:
        with self._lock:
            self.tx, self.ty = value

    def _put(self, col: int, row: int, ch: str) -> None:
        # absolute coordinates; anything off-grid is clipped
        if 0 <= row < self.rows and 0 <= col < self.cols:
            self.grid[row][col] = ch

    def paint_text(self, x: int, y: int, text: str) -> None:
        with self._lock:
            col, row = self.tx + x, self.ty + y
            for i, ch in enumerate(text):
                self._put(col + i, row, ch)

    def paint_dialog_window(self, title: str, width: int, height: int) -> None:
        """Frame a ``width`` x ``height`` interior and move the origin inside it.

        The frame spans columns 0..width+1 and rows 0..height+1 relative to
        the current translation. The title sits on the top edge from column 2
        and never overwrites the right corner.
        """
        with self._lock:
            ox, oy = self.tx, self.ty
            right, bottom = width + 1, height + 1
            for row in range(bottom + 1):
                for col in range(right + 1):
                    edge_row = row in (0, bottom)
                    edge_col = col in (0, right)
                    if edge_row and edge_col:
                        ch = "+"
                    elif edge_row:
                        ch = "-"
                    elif edge_col:
                        ch = "|"
                    else:
                        ch = " "
                    self._put(ox + col, oy + row, ch)
            for i, ch in enumerate(title[: max(0, width - 1)]):
                self._put(ox + 2 + i, oy, ch)
            self.tx, self.ty = ox + 1, oy + 1

    def dump(self) -> str:
        return surface_dump(self)


def surface_dump(surface: PaintSurface) -> str:
    """Rows joined by newlines, trailing blanks trimmed, one final newline."""
    return "\n".join("".join(row).rstrip(" ") for row in surface.grid) + "\n"


@dataclass(frozen=True)
class Event:
    kind: str
    label: str
    line: int = 0


@dataclass
class EventScript:
    events: list = field(default_factory=list)

    def __post_init__(self) -> None:
        self._queue = deque(self.events)
        self._lock = threading.Lock()

    def next(self) -> Optional[Event]:
        with self._lock:
            return self._queue.popleft() if self._queue else None

    @property
    def remaining(self) -> int:
        with self._lock:
            return len(self._queue)


def parse_events(text: str) -> EventScript:
    """One ``press LABEL`` per line; blank lines and ``#`` comments are skipped."""
    events = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        word, _, rest = line.partition(" ")
        label = rest.strip()
        if word != "press" or not label:
            raise EventError(f"expected `press LABEL`, found {raw.strip()!r}", Pos(lineno, 1))
        events.append(Event("press", label, lineno))
    return EventScript(events)
