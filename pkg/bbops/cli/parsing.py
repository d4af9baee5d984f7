"""Parsers for the CLI's function tokens, n-lists, t-lists and x-lists."""

import csv
import logging
import os
from typing import List, Tuple

from bbops.errors import FunctionParseError, IngestionError
from bbops.functions import FunctionSpec, abs_half, exp_x, holder, polynomial, sampled, sin_pi

logger = logging.getLogger(__name__)

FUNCTION_GRAMMAR = "poly:c0,c1,... | holder:gamma | abs_half | sin_pi | exp_x | csv:<path>"

# hard cap on generated sweep lengths
MAX_LIST_LENGTH = 10_000


def _float(token: str, text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise FunctionParseError(token, f"{what} '{text}' is not a number") from None


def read_samples(path: str) -> Tuple[List[float], List[float]]:
    """Read an ``x,value`` CSV (header optional): sorted, exact duplicates dropped."""
    if not os.path.isfile(path):
        raise IngestionError(f"Sample file not found: {path}")
    pairs = []
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            for lineno, row in enumerate(csv.reader(f), start=1):
                if not row or all(not cell.strip() for cell in row):
                    continue
                if len(row) < 2:
                    raise IngestionError(f"{path}:{lineno}: expected two columns x,value")
                try:
                    pairs.append((float(row[0]), float(row[1])))
                except ValueError:
                    if lineno == 1 and not pairs:
                        continue
                    raise IngestionError(f"{path}:{lineno}: non-numeric row {row}") from None
    except OSError as e:
        raise IngestionError(f"Cannot read sample file {path}: {e}") from e

    pairs = sorted(set(pairs))
    if len(pairs) < 2:
        raise IngestionError(f"{path}: need at least two samples, got {len(pairs)}")
    xs = [p[0] for p in pairs]
    values = [p[1] for p in pairs]
    if xs[0] != 0.0 or xs[-1] != 1.0:
        raise IngestionError(f"{path}: x-range must be exactly [0, 1], got [{xs[0]}, {xs[-1]}]")
    for a, b in zip(xs, xs[1:]):
        if b <= a:
            raise IngestionError(f"{path}: x is not strictly increasing at x={b}")
    logger.debug("Read %d samples from %s", len(xs), path)
    return xs, values


def parse_function(token: str) -> FunctionSpec:
    """Function token to a FunctionSpec, following FUNCTION_GRAMMAR."""
    token = token.strip()
    name, sep, arg = token.partition(":")
    if name == "poly":
        if not sep or not arg.strip():
            raise FunctionParseError(token, "poly needs coefficients, e.g. poly:0,0,1")
        coeffs = [_float(token, c.strip(), "coefficient") for c in arg.split(",")]
        try:
            return polynomial(coeffs)
        except ValueError as e:
            raise FunctionParseError(token, str(e)) from None
    if name == "holder":
        if not sep:
            raise FunctionParseError(token, "holder needs an exponent, e.g. holder:0.5")
        gamma = _float(token, arg.strip(), "exponent")
        if not 0.0 < gamma <= 1.0:
            raise FunctionParseError(token, "holder exponent must lie in (0, 1]")
        return holder(gamma)
    if name == "csv":
        if not arg:
            raise FunctionParseError(token, "csv needs a path, e.g. csv:data.csv")
        xs, values = read_samples(arg)
        return sampled(xs, values, path=arg)
    if sep:
        raise FunctionParseError(token, f"'{name}' takes no argument")
    builtins = {"abs_half": abs_half, "sin_pi": sin_pi, "exp_x": exp_x}
    if name in builtins:
        return builtins[name]()
    raise FunctionParseError(token, f"expected {FUNCTION_GRAMMAR}")


def _check_length(values: list, text: str) -> list:
    if not values:
        raise ValueError(f"'{text}' yields an empty list")
    if len(values) > MAX_LIST_LENGTH:
        raise ValueError(f"'{text}' yields more than {MAX_LIST_LENGTH} values")
    return values


def parse_n_list(text: str) -> List[int]:
    """``16:8192:x2`` (geometric), ``2:50:+1`` (arithmetic), ``4,8,16`` or ``10``."""
    text = text.strip()
    if ":" not in text:
        try:
            values = [int(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise ValueError(f"invalid n-list '{text}'") from None
        return _check_length(values, text)
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"invalid n-list '{text}', expected a:b:x2 or a:b:+d")
    try:
        start, stop = int(parts[0]), int(parts[1])
        step = parts[2].strip()
        if step.startswith("x"):
            ratio = int(step[1:])
            if ratio < 2:
                raise ValueError
            values = []
            n = start
            while n <= stop and len(values) <= MAX_LIST_LENGTH:
                values.append(n)
                n *= ratio
        elif step.startswith("+"):
            delta = int(step[1:])
            if delta < 1:
                raise ValueError
            values = list(range(start, stop + 1, delta))
        else:
            raise ValueError
    except ValueError:
        raise ValueError(f"invalid n-list '{text}', expected a:b:x2 or a:b:+d") from None
    if start < 1:
        raise ValueError(f"invalid n-list '{text}': n must be positive")
    return _check_length(values, text)


def parse_t_list(text: str) -> List[float]:
    """``0.125,0.0625`` or geometric ``a:b:xr`` (r may be below one)."""
    text = text.strip()
    if ":" not in text:
        try:
            values = [float(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise ValueError(f"invalid t-list '{text}'") from None
        return _check_length(values, text)
    parts = text.split(":")
    try:
        if len(parts) != 3 or not parts[2].strip().startswith("x"):
            raise ValueError
        start, stop, ratio = float(parts[0]), float(parts[1]), float(parts[2].strip()[1:])
        if start <= 0.0 or stop <= 0.0 or ratio <= 0.0 or ratio == 1.0:
            raise ValueError
    except ValueError:
        raise ValueError(f"invalid t-list '{text}', expected a:b:xr") from None
    lo, hi = min(start, stop), max(start, stop)
    values = []
    t = start
    while lo * (1.0 - 1e-12) <= t <= hi * (1.0 + 1e-12) and len(values) <= MAX_LIST_LENGTH:
        values.append(t)
        t *= ratio
    return _check_length(values, text)


def parse_x_list(text: str) -> List[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ValueError(f"invalid x-list '{text}'") from None
    return _check_length(values, text)
