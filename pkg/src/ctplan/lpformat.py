"""Plain-text LP dump parsing for the debug solve path.

Format, one statement per line (``#`` starts a comment):

    min: 1*x0 + -2*x1
    1*x0 + 1*x1 <= 1
    x0 in [0, inf]
    bin: x1 x2

Senses are ``<=``, ``=``, ``>=``; unlisted variables are free.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import ParseError
from .solver import LinearConstraint, LpProblem

_TERM = re.compile(
    r"(?P<coef>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*\*\s*x(?P<idx>\d+)"
    r"|(?P<sign>[+-]?)\s*x(?P<bare>\d+)")
_BOUND = re.compile(
    r"^x(?P<idx>\d+)\s+in\s+\[\s*(?P<lo>[^,\]]+)\s*,\s*(?P<hi>[^,\]]+)\s*\]$")


@dataclass(frozen=True)
class ParsedLp:
    problem: LpProblem
    binaries: tuple


def _parse_number(token: str, where: str) -> float:
    token = token.strip().lower()
    if token in ("inf", "+inf"):
        return math.inf
    if token == "-inf":
        return -math.inf
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"{where}: cannot parse number {token!r}") from None


def _parse_terms(text: str, lineno: int):
    terms = []
    covered = []
    for m in _TERM.finditer(text):
        covered.append((m.start(), m.end()))
        if m.group("idx") is not None:
            terms.append((int(m.group("idx")), float(m.group("coef"))))
        else:
            sign = -1.0 if m.group("sign") == "-" else 1.0
            terms.append((int(m.group("bare")), sign))
    leftover = text
    for start, end in reversed(covered):
        leftover = leftover[:start] + leftover[end:]
    if leftover.replace("+", "").strip():
        raise ParseError(f"line {lineno}: unparsed tokens in {text!r}")
    if not terms:
        raise ParseError(f"line {lineno}: no variable terms in {text!r}")
    return terms


def parse_lp_dump(text: str) -> ParsedLp:
    objective_terms = None
    rows = []
    bounds = {}
    binaries = []
    max_idx = -1

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("min:"):
            if objective_terms is not None:
                raise ParseError(f"line {lineno}: duplicate objective line")
            body = line[len("min:"):].strip()
            objective_terms = _parse_terms(body, lineno) if body not in ("", "0") else []
            max_idx = max([max_idx] + [j for j, _ in objective_terms])
            continue
        if line.startswith("bin:"):
            for token in line[len("bin:"):].split():
                if not re.fullmatch(r"x\d+", token):
                    raise ParseError(f"line {lineno}: bad binary token {token!r}")
                binaries.append(int(token[1:]))
                max_idx = max(max_idx, binaries[-1])
            continue
        m = _BOUND.match(line)
        if m:
            j = int(m.group("idx"))
            bounds[j] = (_parse_number(m.group("lo"), f"line {lineno}"),
                         _parse_number(m.group("hi"), f"line {lineno}"))
            max_idx = max(max_idx, j)
            continue
        for sense in ("<=", ">=", "="):
            if sense in line:
                lhs, rhs = line.split(sense, 1)
                terms = _parse_terms(lhs, lineno)
                rows.append(LinearConstraint.of(
                    terms, sense, _parse_number(rhs, f"line {lineno}")))
                max_idx = max([max_idx] + [j for j, _ in terms])
                break
        else:
            raise ParseError(f"line {lineno}: unrecognized statement {line!r}")

    if max_idx < 0:
        raise ParseError("dump declares no variables")
    n = max_idx + 1
    objective = [0.0] * n
    for j, coef in (objective_terms or []):
        objective[j] += coef
    var_bounds = []
    for j in range(n):
        if j in bounds:
            var_bounds.append(bounds[j])
        elif j in binaries:
            var_bounds.append((0.0, 1.0))
        else:
            var_bounds.append((-math.inf, math.inf))
    problem = LpProblem.build(n, objective, rows, var_bounds)
    return ParsedLp(problem, tuple(sorted(set(binaries))))
