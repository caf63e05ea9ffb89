"""Slow reference implementations used to cross-check the fast paths.

Nothing here shares code with the modules it checks: partitions come from a
generic set-partition enumerator filtered by the defining conditions, and
suprema are found by probing constraint breakpoints.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterator, Sequence

from capax.exact import INF


def naive_ech(weights: Sequence, count: int) -> list[Fraction]:
    """Enumerate every ``m . a <= B`` and sort, doubling ``B`` until enough points fit."""
    ws = [Fraction(w) for w in weights]

    def points(bound: Fraction) -> list[Fraction]:
        vals = []

        def walk(k: int, acc: Fraction):
            if k == len(ws):
                vals.append(acc)
                return
            m = 0
            while acc + m * ws[k] <= bound:
                walk(k + 1, acc + m * ws[k])
                m += 1

        walk(0, Fraction(0))
        return vals

    bound = min(ws)
    vals = points(bound)
    while len(vals) < count:
        bound *= 2
        vals = points(bound)
    vals.sort()
    return vals[:count]


def set_partitions(items: Sequence) -> Iterator[list[list]]:
    """All set partitions of ``items`` (Bell-number many)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in set_partitions(rest):
        yield [[first]] + sub
        for k in range(len(sub)):
            yield sub[:k] + [[first] + sub[k]] + sub[k + 1 :]


def brute_pair_partitions(I: Sequence, Iprime: Sequence) -> list[frozenset]:
    elems = [("I", i) for i in I] + [("I'", i) for i in Iprime]
    out = []
    for p in set_partitions(elems):
        if all(sum(1 for side, _ in J if side == "I") == 1 for J in p):
            out.append(frozenset(frozenset(J) for J in p))
    return out


def brute_triple_partitions(Iplus: Sequence, Iminus: Sequence, Iprime: Sequence) -> list[frozenset]:
    elems = [("I+", i) for i in Iplus] + [("I-", i) for i in Iminus] + [("I'", i) for i in Iprime]
    out = []
    for p in set_partitions(elems):
        plus = [sum(1 for side, _ in J if side == "I+") for J in p]
        minus = [sum(1 for side, _ in J if side == "I-") for J in p]
        both = [k for k in range(len(p)) if plus[k] == 1 and minus[k] == 1]
        if len(both) != 1:
            continue
        if all(plus[k] + minus[k] == 1 for k in range(len(p)) if k != both[0]):
            out.append(frozenset(frozenset(J) for J in p))
    return out


def _value(elem, fI: dict, fP: dict) -> tuple[bool, Fraction]:
    side, lab = elem
    return (False, fP[lab]) if side == "I'" else (True, fI[(side, lab)])


def brute_sup(partitions, fI: dict, fP: dict):
    """Largest C > 0 admitted by some partition (0 if none), by breakpoint probing.

    ``fI`` maps tagged I-elements ``(side, label)`` to values, ``fP`` maps
    I'-labels to values.
    """
    best = Fraction(0)
    for p in partitions:
        blocks = []
        for J in p:
            s = t = Fraction(0)
            for e in J:
                in_i, v = _value(e, fI, fP)
                if in_i:
                    s += v
                else:
                    t += v
            blocks.append((s, t))

        def ok(C):
            return all(-C * s + t >= 0 for s, t in blocks)

        points = [t / s for s, t in blocks if s != 0 and t / s > 0]
        beyond = 1 + max([abs(x) for x in points], default=Fraction(0))
        if ok(beyond):
            return INF
        feasible = [c for c in points if ok(c)]
        if feasible:
            best = max(best, max(feasible))
    return best
