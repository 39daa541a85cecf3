"""Independent layout calculator for dialog goldens.

Knows only the min-size table of the standard parts and how a frame is
drawn; shares no code with the toolchain. Run as a script to regenerate
tests/golden/*.txt.
"""

from __future__ import annotations

from pathlib import Path

COLS, ROWS = 80, 25


def message(text):
    return ("message", text)


def button(label):
    return ("button", label)


def row(*parts):
    return ("row", parts)


def min_size(part):
    kind, payload = part
    if kind == "message":
        return len(payload), 1
    if kind == "button":
        return len(payload) + 4, 1
    if kind == "row":
        sizes = [min_size(p) for p in payload]
        return sum(w for w, _ in sizes), max((h for _, h in sizes), default=0)
    raise ValueError(kind)


def dialog_size(parts):
    width = 0
    height = 0
    for p in parts:
        w, h = min_size(p)
        width = max(width, w)
        height = height + h
    return width, height


def render(title, parts, cols=COLS, rows=ROWS):
    grid = [[" "] * cols for _ in range(rows)]

    def put(x, y, text):
        for i, ch in enumerate(text):
            if 0 <= y < rows and 0 <= x + i < cols:
                grid[y][x + i] = ch

    width, height = dialog_size(parts)
    top = "+" + "-" * width + "+"
    put(0, 0, top)
    for y in range(1, height + 1):
        put(0, y, "|" + " " * width + "|")
    put(0, height + 1, top)
    put(2, 0, title[: max(0, width - 1)])

    def paint(part, x, y):
        kind, payload = part
        if kind == "message":
            put(x, y, payload)
        elif kind == "button":
            put(x, y, f"[ {payload} ]")
        else:
            for p in payload:
                paint(p, x, y)
                x += min_size(p)[0]

    y = 1
    for p in parts:
        paint(p, 1, y)
        y += min_size(p)[1]
    return "\n".join("".join(r).rstrip(" ") for r in grid) + "\n"


GOLDENS = {
    "hello_world": ("Title", [message("Hello, world!"), button("Ok")]),
    "ok_cancel": ("Title", [message("Hello, world!"), row(button("Cancel"), button("Ok"))]),
    "yesno": ("Title", [message("Please answer"), row(button("Yes"), button("No"))]),
}


def golden_text(name):
    title, parts = GOLDENS[name]
    return render(title, parts)


if __name__ == "__main__":
    out = Path(__file__).parent / "golden"
    out.mkdir(exist_ok=True)
    for name in GOLDENS:
        (out / f"{name}.surface.txt").write_text(golden_text(name))
        print(f"wrote {name}.surface.txt")
