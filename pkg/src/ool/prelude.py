"""Standard operators, written in the language itself.

Layout contract of the dialog parts (character cells, no spacing):

============================  ======================================
part                          minimal size (width, height)
============================  ======================================
dialog_message TEXT           (string_length(TEXT), 1)
any button labelled L         (string_length(L) + 4, 1), drawn ``[ L ]``
window_part_row               (sum of widths, max of heights)
dialog_window                 (max of widths, sum of heights)
============================  ======================================

Two definitions of ``parallel_execute`` exist; :func:`prelude_source` picks
one. User programs may shadow any operator defined here.
"""

from __future__ import annotations

from functools import lru_cache

from .errors import PRELUDE_SOURCE_NAME
from .lexer import tokenize
from .syntax import Program, parse

VARIANTS = ("parallel", "sequential")

_COMMON = """\
program prelude;
  -- Stacks its parts in a column, then hands scripted events to them until
  -- one of them asks the dialog to close.
  operator dialog_window(title);
    string title;
    integer closing;
    shared method request_close;
      closing := 1;
    end method request_close;
    method execute;
      integer x_size, y_size, x, y, x_position, y_position;
      string event_label;
      integer handled;
      x_size := 0;
      y_size := 0;
      begin by_nested_operators;
        this_operator.get_min_size(x, y);
        x_size := max(x_size, x);
        y_size := y_size + y;
      end by_nested_operators;
      paint_dialog_window(title, x_size, y_size);
      x_position := 0;
      y_position := 0;
      begin by_nested_operators;
        this_operator.get_min_size(x, y);
        this_operator.paint_the_part(x_position, y_position, x_size, y);
        y_position := y_position + y;
      end by_nested_operators;
      begin for_each_event(event_label, handled, closing);
        begin by_nested_operators;
          this_operator.handle_event(event_label, handled);
        end by_nested_operators;
      end for_each_event;
    end method execute;
  end operator dialog_window;

  operator dialog_message(text);
    string text;
    method get_min_size(x, y);
      integer x, y;
      x := string_length(text);
      y := 1;
    end method get_min_size;
    method paint_the_part(x, y, width, height);
      integer x, y, width, height;
      paint_text(x, y, text);
    end method paint_the_part;
    method handle_event(event_label, handled);
      string event_label;
      integer handled;
    end method handle_event;
  end operator dialog_message;

  -- Runs its own nested operators when pressed.
  operator dialog_button(label);
    string label;
    method get_min_size(x, y);
      integer x, y;
      x := string_length(label) + 4;
      y := 1;
    end method get_min_size;
    method paint_the_part(x, y, width, height);
      integer x, y, width, height;
      paint_text(x, y, "[ ");
      paint_text(x + 2, y, label);
      paint_text(x + 2 + string_length(label), y, " ]");
    end method paint_the_part;
    method handle_event(event_label, handled);
      string event_label;
      integer handled;
      begin if_equal(event_label, label);
        handled := 1;
        begin by_nested_operators;
          this_operator.execute;
        end by_nested_operators;
      end if_equal;
    end method handle_event;
  end operator dialog_button;

  operator dialog_ok_button inherits dialog_button;
    string label := "Ok";
    method handle_event(event_label, handled);
      string event_label;
      integer handled;
      begin if_equal(event_label, label);
        handled := 1;
        close_dialog;
      end if_equal;
    end method handle_event;
  end operator dialog_ok_button;

  operator dialog_cancel_button inherits dialog_ok_button;
    string label := "Cancel";
  end operator dialog_cancel_button;

  -- Lays its parts out left to right inside the box it is granted.
  operator window_part_row;
    method get_min_size(x, y);
      integer x, y;
      integer part_x, part_y;
      x := 0;
      y := 0;
      begin by_nested_operators;
        this_operator.get_min_size(part_x, part_y);
        x := x + part_x;
        y := max(y, part_y);
      end by_nested_operators;
    end method get_min_size;
    method paint_the_part(x, y, width, height);
      integer x, y, width, height;
      integer part_x, part_y, x_position;
      x_position := x;
      begin by_nested_operators;
        this_operator.get_min_size(part_x, part_y);
        this_operator.paint_the_part(x_position, y, part_x, height);
        x_position := x_position + part_x;
      end by_nested_operators;
    end method paint_the_part;
    method handle_event(event_label, handled);
      string event_label;
      integer handled;
      begin by_nested_operators;
        this_operator.handle_event(event_label, handled);
      end by_nested_operators;
    end method handle_event;
  end operator window_part_row;

  -- request_close is looked up in the enclosing operators at each use.
  operator close_dialog;
    method execute;
      request_close;
    end method execute;
  end operator close_dialog;
"""

PARALLEL_EXECUTE = """\
  operator parallel_execute;
    method execute;
      semaphore s;
      s := num_nested_operators;
      begin by_nested_operators;
        begin new_thread(s);
          this_operator.execute;
        end new_thread;
      end by_nested_operators;
      wait_zero_semaphore s;
    end method execute;
  end operator parallel_execute;
"""

SEQUENTIAL_EXECUTE = """\
  operator parallel_execute;
    method execute;
      begin by_nested_operators;
        this_operator.execute;
      end by_nested_operators;
    end method execute;
  end operator parallel_execute;
"""


def prelude_source(variant: str = "parallel") -> str:
    if variant == "parallel":
        tail = PARALLEL_EXECUTE
    elif variant == "sequential":
        tail = SEQUENTIAL_EXECUTE
    else:
        raise ValueError(f"unknown prelude variant {variant!r}; expected one of {VARIANTS}")
    return _COMMON + "\n" + tail + "end program prelude;\n"


@lru_cache(maxsize=None)
def _parsed(variant: str) -> Program:
    return parse(tokenize(prelude_source(variant)), PRELUDE_SOURCE_NAME)


def load_prelude(variant: str = "parallel") -> Program:
    """Parsed prelude. Callers must not mutate the returned tree."""
    return _parsed(variant)
