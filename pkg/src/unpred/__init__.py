"""Unpredictable controller synthesis for co-safe LTL tasks.

Typical use::

    from unpred import load_example, prepare, synthesize, verify_controller

    ts = load_example("robot6")
    _, dfa, prod = prepare(ts, "F(p1 & F p2)")
    res = synthesize(prod, k=3)
    verify_controller(prod, res.controller.to_mealy(), 3)
"""

from .automata import accepts, compile_formula, minimize, modify
from .formula import holds_on, is_minimal_good_prefix, parse, pretty
from .pipeline import example_path, load_example, prepare
from .product import build_product, project_path
from .synthesis import (Controller, NoSolution, attractor, build_aes, decode, extract,
                        synthesize)
from .system import TransitionSystem, load_model, validate
from .verify import (MealyController, build_closed_loop, check_live, check_task,
                     check_unpredictable, verify_controller)

__version__ = "0.1.0"
