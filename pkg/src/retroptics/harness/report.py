"""Report tables and their text renderings (aligned table or TSV)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..classical import FieldState
from ..density import DensityOperator
from ..fock import PRUNE_THRESHOLD, StateVector
from ..retrodict import History, Posterior
from .scenario import Scenario

PROBABILITY_TOLERANCE = 1e-12


def fmt(x: float) -> str:
    """12 significant digits, without a negative sign on zero."""
    text = format(float(x), ".12g")
    return "0" if text in ("-0", "0") else text


def fmt_component(x: float) -> str:
    """Like :func:`fmt`, but rounding-noise components below the prune threshold print as 0."""
    return fmt(0.0 if abs(x) < PRUNE_THRESHOLD else x)


@dataclass
class Table:
    name: str
    columns: tuple[str, ...]
    rows: list[tuple[str, ...]] = field(default_factory=list)


@dataclass
class Report:
    scenario: Scenario
    final_state: Optional[StateVector] = None
    histories: Optional[list[History]] = None
    count_distributions: dict[int, np.ndarray] = field(default_factory=dict)
    posterior: Optional[Posterior] = None
    reduced: Optional[DensityOperator] = None
    forward_fields: Optional[FieldState] = None
    forward_intensities: Optional[np.ndarray] = None
    backprop_complete: Optional[np.ndarray] = None
    backprop_incomplete: Optional[np.ndarray] = None
    oracle_deviation: Optional[float] = None

    def probability_tables(self) -> dict[str, Sequence[float]]:
        """Every probability column the report carries, by name."""
        tables: dict[str, Sequence[float]] = {}
        if self.histories is not None:
            tables["histories"] = [h.probability for h in self.histories]
        for mode, dist in self.count_distributions.items():
            tables[f"counts d{mode + 1}"] = list(dist)
        if self.posterior is not None:
            tables["posterior"] = [p for _, p in self.posterior]
        if self.reduced is not None:
            tables["reduced diagonal"] = list(self.reduced.diagonal().values())
        return tables

    def validation_errors(self) -> list[str]:
        errors = []
        for name, probs in self.probability_tables().items():
            total = float(sum(probs))
            if abs(total - 1.0) > PROBABILITY_TOLERANCE or min(probs, default=0.0) < -PROBABILITY_TOLERANCE:
                errors.append(f"{name}: probabilities sum to {total!r}")
        return errors

    def tables(self) -> list[Table]:
        out = []
        if self.final_state is not None:
            t = Table("final state", ("outcome", "re", "im"))
            for occ, amp in self.final_state:
                t.rows.append((str(occ), fmt_component(amp.real), fmt_component(amp.imag)))
            out.append(t)
        if self.histories is not None:
            t = Table("histories", ("label", "outcome", "probability"))
            for h in self.histories:
                t.rows.append((h.label or "-", str(h.outcome), fmt(h.probability)))
            out.append(t)
        if self.count_distributions:
            width = max(len(d) for d in self.count_distributions.values())
            t = Table("count distribution", ("mode",) + tuple(f"P{n}" for n in range(width)))
            for mode, dist in sorted(self.count_distributions.items()):
                values = [fmt(p) for p in dist] + ["0"] * (width - len(dist))
                t.rows.append((f"d{mode + 1}", *values))
            out.append(t)
        if self.posterior is not None:
            t = Table("posterior", ("label", "outcome", "prior", "posterior"))
            for h, p in self.posterior:
                t.rows.append((h.label or "-", str(h.outcome), fmt(h.probability), fmt(p)))
            out.append(t)
        if self.reduced is not None:
            modes = ",".join(f"d{m + 1}" for m, _ in self.scenario.observe)
            t = Table(f"reduced density matrix ({modes})", ("row", "col", "re", "im"))
            for a, row in enumerate(self.reduced.basis):
                for b, col in enumerate(self.reduced.basis):
                    z = self.reduced.matrix[a, b]
                    t.rows.append((str(row), str(col), fmt_component(z.real), fmt_component(z.imag)))
            out.append(t)
        for name, values in (
            ("forward intensity", self.forward_intensities),
            ("back-propagated intensity, complete", self.backprop_complete),
            ("back-propagated intensity, incomplete", self.backprop_incomplete),
        ):
            if values is None:
                continue
            total = float(np.sum(values))
            t = Table(name, ("mode", "intensity", "fraction"))
            for m, v in enumerate(values):
                t.rows.append((f"{m + 1}", fmt(v), fmt(v / total) if total > 0 else "0"))
            out.append(t)
        if self.oracle_deviation is not None:
            out.append(Table("oracle", ("max_deviation",), [(fmt(self.oracle_deviation),)]))
        return out

    def render(self, format: str = "table") -> str:
        return render_tables(self.tables(), format, header=self.scenario.to_text())


def render_tables(tables: Sequence[Table], format: str = "table", header: Optional[str] = None) -> str:
    if format not in ("table", "tsv"):
        raise ValueError(f"unknown format {format!r}")
    lines = []
    if header:
        lines += ["# " + line if line else "#" for line in header.rstrip("\n").split("\n")]
    for table in tables:
        lines.append("")
        lines.append(f"## {table.name}")
        if format == "tsv":
            lines.append("\t".join(table.columns))
            lines += ["\t".join(row) for row in table.rows]
        else:
            widths = [len(c) for c in table.columns]
            for row in table.rows:
                widths = [max(w, len(v)) for w, v in zip(widths, row)]
            lines.append("  ".join(c.ljust(w) for c, w in zip(table.columns, widths)).rstrip())
            lines.append("  ".join("-" * w for w in widths))
            lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in table.rows]
    return "\n".join(lines) + "\n"
