"""Convenience wiring from a model and formula text to the product system."""

from __future__ import annotations

from importlib import resources

from .automata import compile_formula, modify
from .formula import parse
from .product import build_product
from .system import TransitionSystem, load_model

__all__ = ["prepare", "example_path", "load_example"]


def example_path(name: str = "robot6"):
    """Path of a bundled model file such as ``robot6``."""
    return resources.files("unpred") / "data" / f"{name}.json"


def load_example(name: str = "robot6") -> TransitionSystem:
    with resources.as_file(example_path(name)) as p:
        return load_model(p)


def prepare(ts: TransitionSystem, formula: str, minimal: bool = True):
    """Turn ``formula`` into a modified task automaton and build the product.

    Returns ``(formula_ast, modified_dfa, product)``.
    """
    f = parse(formula, ts.ap)
    dfa = modify(compile_formula(f, ts.ap, minimal=minimal))
    return f, dfa, build_product(ts, dfa)
