"""
Shared helpers: logging setup and rational formatting
"""

import logging
from fractions import Fraction
from typing import Iterable

from kirby.config import LOG_LEVEL

_configured = False


def get_logger(name: str) -> logging.Logger:
    global _configured
    if not _configured:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
        root = logging.getLogger("kirby")
        root.addHandler(handler)
        root.setLevel(LOG_LEVEL)
        root.propagate = False
        _configured = True
    if not name.startswith("kirby"):
        name = f"kirby.{name}"
    return logging.getLogger(name)


def format_rational(value) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"not a rational number: {text!r}") from e


def format_vector(values: Iterable) -> str:
    return "(" + ", ".join(format_rational(v) for v in values) + ")"


def parse_int_list(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    return [int(part) for part in text.split(",") if part.strip()]
