"""Rational and extended-rational helpers.

``Fraction`` is the rational type throughout; +infinity is ``math.inf``,
which compares correctly against every ``Fraction``.  Negative infinity is
never produced.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Union

from capax.errors import CapaxError

INF = math.inf

ExtRat = Union[Fraction, float]  # float only ever means +inf

LESS, EQUAL, GREATER = -1, 0, 1


def as_rat(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to ``Fraction``.

    Floats are refused so that no rounding sneaks into exact code paths.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise CapaxError(f"not a rational: {x!r}")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rat(x)
    raise CapaxError(f"not a rational: {x!r}")


def parse_rat(text: str) -> Fraction:
    text = text.strip()
    try:
        if "." in text or "e" in text.lower():
            raise ValueError
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise CapaxError(f"cannot parse rational {text!r}; expected 'p/q'") from None


def parse_ext(text: str) -> ExtRat:
    if text.strip().lower() in ("inf", "+inf"):
        return INF
    return parse_rat(text)


def is_inf(x) -> bool:
    return isinstance(x, float) and x == INF


def format_rat(q: Fraction) -> str:
    """Canonical ``"p/q"`` form; integers are still written with ``/1``."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def format_ext(x: ExtRat) -> str:
    if is_inf(x):
        return "inf"
    if isinstance(x, float):
        raise CapaxError(f"finite floats are not extended rationals: {x!r}")
    return format_rat(x)


def ext_add(x: ExtRat, y: ExtRat) -> ExtRat:
    if is_inf(x) or is_inf(y):
        return INF
    return x + y


def ext_mul(c: Fraction, x: ExtRat) -> ExtRat:
    """Scale by a positive rational; ``c * inf = inf``."""
    if c <= 0:
        raise CapaxError("scaling factor must be positive")
    if is_inf(x):
        return INF
    return c * x


def ext_div(x: ExtRat, c: Fraction) -> ExtRat:
    if c <= 0:
        raise CapaxError("divisor must be positive")
    if is_inf(x):
        return INF
    return x / c


def cmp(x, y) -> int:
    return (x > y) - (x < y)


def cmp_pow(q, base, root: int) -> int:
    """Order of ``q`` against ``base ** (1/root)``, decided by ``q**root`` vs ``base``.

    >>> cmp_pow(Fraction(21, 20), 2, 4)
    -1
    """
    q, base = as_rat(q), as_rat(base)
    if q <= 0 or base <= 0:
        raise CapaxError("cmp_pow needs positive arguments")
    if not isinstance(root, int) or root < 1:
        raise CapaxError("root must be a positive integer")
    return cmp(q**root, base)


def exact_root(q: Fraction, k: int) -> Fraction | None:
    """The rational k-th root of ``q >= 0`` if it exists, else None."""
    if q < 0:
        raise CapaxError("negative radicand")
    p, d = q.numerator, q.denominator
    rp, rd = _iroot(p, k), _iroot(d, k)
    if rp**k == p and rd**k == d:
        return Fraction(rp, rd)
    return None


def _iroot(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0, by integer Newton iteration."""
    if n < 2:
        return n
    if k == 1:
        return n
    if k == 2:
        return math.isqrt(n)
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x
