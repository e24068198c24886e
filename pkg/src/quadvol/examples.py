"""Worked examples with known fundamental domains, and the closed-form sweep."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Callable, Iterable, Optional, TextIO

from .errors import InvalidArgument
from .exactnum import factorize, format_rational
from .lattice import GramMatrix, compact, direct_sum, invariants, U
from .volume import closed_form_ternary, siegel_volume
from .watson import ReductionStep, reduce_to_square_free


def polygon_area_over_4pi(angles: Iterable[Fraction | int | str]) -> Fraction:
    """Area of a hyperbolic k-gon divided by 4 pi.

    Angles are given as coefficients of pi; 0 stands for a cusp.
    """
    coeffs = [Fraction(a) for a in angles]
    if len(coeffs) < 3:
        raise InvalidArgument("a polygon needs at least 3 angles")
    if any(c < 0 or c >= 1 for c in coeffs):
        raise InvalidArgument("angles must lie in [0, pi)")
    area = (len(coeffs) - 2) - sum(coeffs)
    if area <= 0:
        raise InvalidArgument(f"angles {coeffs} do not bound a hyperbolic polygon")
    return area / 4


@dataclass(frozen=True)
class ExampleRecord:
    name: str
    gram: GramMatrix
    polygon_angles: tuple[Fraction, ...]
    expected_volume: Fraction

    @classmethod
    def from_angles(cls, name: str, gram: GramMatrix, angles: Iterable[str]) -> "ExampleRecord":
        a = tuple(Fraction(x) for x in angles)
        return cls(name, gram, a, polygon_area_over_4pi(a))


def builtin_examples() -> list[ExampleRecord]:
    D = GramMatrix.diag
    return [
        ExampleRecord.from_angles("<2>+U", direct_sum(D(2), U), ["0", "1/3", "1/2"]),
        ExampleRecord.from_angles("<6>+U", direct_sum(D(6), U), ["0", "1/6", "1/2"]),
        ExampleRecord.from_angles("<4>+U", direct_sum(D(4), U), ["0", "1/4", "1/2"]),
        ExampleRecord.from_angles("6x^2-y^2-z^2", D(6, -1, -1), ["1/2", "1/2", "1/2", "1/4"]),
        ExampleRecord.from_angles("11x^2-y^2-z^2", D(11, -1, -1), ["1/2", "1/2", "1/3", "1/4"]),
        ExampleRecord.from_angles("3x^2-5y^2-z^2", D(3, -5, -1), ["1/2", "1/2", "1/2", "1/6"]),
        ExampleRecord.from_angles(
            "even d=-2", GramMatrix([[2, -2, 0], [-2, 2, -1], [0, -1, 2]]), ["1/2", "1/3", "0"]
        ),
    ]


@dataclass
class ExampleOutcome:
    record: ExampleRecord
    computed: Optional[Fraction]
    reduced: Optional[GramMatrix] = None
    steps: list[ReductionStep] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.error is None and self.computed == self.record.expected_volume

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        got = format_rational(self.computed) if self.computed is not None else self.error
        out = f"{status} {self.record.name}: volume {got}, polygon {format_rational(self.record.expected_volume)}"
        if self.steps:
            out += f" (reduced via {'; '.join(str(s) for s in self.steps)} to {compact(self.reduced)})"
        return out


@dataclass
class ExampleReport:
    outcomes: list[ExampleOutcome]

    @property
    def passed(self) -> int:
        return sum(o.passed for o in self.outcomes)

    @property
    def ok(self) -> bool:
        return self.passed == len(self.outcomes)

    def render(self) -> str:
        lines = [o.line() for o in self.outcomes]
        if any(o.steps for o in self.outcomes):
            lines.append("note: reduced lattices have square-free determinant, so genus and class coincide")
        lines.append(f"{self.passed}/{len(self.outcomes)} examples pass")
        return "\n".join(lines)


def _closed_form_volume(S: GramMatrix) -> Fraction:
    return closed_form_ternary(S).volume


def verify_examples(
    records: Optional[list[ExampleRecord]] = None,
    volume_fn: Callable[[GramMatrix], Fraction] = _closed_form_volume,
) -> ExampleReport:
    """Compute each example's volume and compare it with its polygon area."""
    if records is None:
        records = builtin_examples()
    outcomes = []
    for rec in records:
        try:
            S, steps = rec.gram, []
            if not factorize(S.det).is_square_free():
                S, steps = reduce_to_square_free(S)
            outcomes.append(ExampleOutcome(rec, volume_fn(S), S if steps else None, steps))
        except Exception as exc:  # failures become report entries
            outcomes.append(ExampleOutcome(rec, None, error=f"{type(exc).__name__}: {exc}"))
    return ExampleReport(outcomes)


# ---------------------------------------------------------------- sweep

SWEEP_HEADER = ["gram", "det", "parity", "omega(d)", "signs", "volume(closed form)", "volume(siegel)", "equal?"]
MAX_SWEEP_BOUND = 200


def diagonal_ternaries(bound: int) -> Iterable[tuple[int, int, int]]:
    """Indefinite diag(a, b, c), a >= b >= c, entries in [-bound, bound] minus 0, square-free det."""
    values = list(range(bound, 0, -1)) + list(range(-1, -bound - 1, -1))
    for a, b, c in combinations_with_replacement(values, 3):
        if a > 0 > c and factorize(a * b * c).is_square_free():
            yield a, b, c


def sweep_rows(bound: int) -> list[list[str]]:
    if bound < 0 or bound > MAX_SWEEP_BOUND:
        raise InvalidArgument(f"bound must lie in [0, {MAX_SWEEP_BOUND}]")
    rows = []
    seen = set()
    for a, b, c in diagonal_ternaries(bound):
        S = GramMatrix.diag(a, b, c)
        cf = closed_form_ternary(S)
        inv = invariants(S)
        signs = tuple((f.p, f.sign) for f in cf.per_prime if f.sign is not None)
        key = (inv.det, inv.is_even, inv.hasse[2], signs)
        if key in seen:
            continue
        seen.add(key)
        sg = siegel_volume(S).volume
        rows.append(
            [
                compact(S),
                str(inv.det),
                "even" if inv.is_even else "odd",
                str(factorize(inv.det).omega),
                " ".join(f"{p}:{'+' if s > 0 else '-'}" for p, s in signs),
                format_rational(cf.volume),
                format_rational(sg),
                "true" if cf.volume == sg else "false",
            ]
        )
    return rows


def write_sweep(rows: list[list[str]], sink: TextIO) -> None:
    w = csv.writer(sink, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    w.writerows(rows)


def sweep(bound: int, out: TextIO | str) -> int:
    rows = sweep_rows(bound)
    if isinstance(out, str):
        with open(out, "w", newline="") as fh:
            write_sweep(rows, fh)
    else:
        write_sweep(rows, out)
    return len(rows)


def sweep_csv(bound: int) -> str:
    buf = io.StringIO()
    sweep(bound, buf)
    return buf.getvalue()
