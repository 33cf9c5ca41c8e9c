"""Small named categories, lenses and squares used throughout the tests and CLI."""

from __future__ import annotations

from .fincat import discrete, free_category, interval, terminal
from .lens import lens
from .squares import LensCospan, LensSpan, LensSquare, proxy_pullback


def one():
    return terminal()


def two():
    return interval()


def d2():
    return discrete(["0", "1"])


def example_cospan():
    """The cospan ``A -F-> C <-G- B`` with two lifts of ``c`` on each side.

    ``F`` sends both ``a`` and ``a'`` to ``c`` and lifts ``c`` to ``a``;
    ``G`` sends ``b`` and ``b'`` to ``c`` and lifts ``c`` to ``b``.
    """
    A = free_category(["A1", "A2", "A2'"], {"a": ("A1", "A2"), "a'": ("A1", "A2'")})
    B = free_category(["B1", "B2", "B2'"], {"b": ("B1", "B2"), "b'": ("B1", "B2'")})
    C = free_category(["C1", "C2"], {"c": ("C1", "C2")})
    F = lens(
        A, C,
        {"A1": "C1", "A2": "C2", "A2'": "C2"},
        {"id_A1": "id_C1", "id_A2": "id_C2", "id_A2'": "id_C2", "a": "c", "a'": "c"},
        {("A1", "id_C1"): "id_A1", ("A1", "c"): "a",
         ("A2", "id_C2"): "id_A2", ("A2'", "id_C2"): "id_A2'"},
    )
    G = lens(
        B, C,
        {"B1": "C1", "B2": "C2", "B2'": "C2"},
        {"id_B1": "id_C1", "id_B2": "id_C2", "id_B2'": "id_C2", "b": "c", "b'": "c"},
        {("B1", "id_C1"): "id_B1", ("B1", "c"): "b",
         ("B2", "id_C2"): "id_B2", ("B2'", "id_C2"): "id_B2'"},
    )
    return LensCospan(F, G)


def example_square() -> LensSquare:
    return proxy_pullback(example_cospan())


def example_span() -> LensSpan:
    return example_square().span
