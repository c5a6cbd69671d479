"""Per-iteration convergence records and their CSV form."""
import csv
import io
import math
from dataclasses import dataclass, field
from typing import List, Optional

CSV_COLUMNS = ("iter", "objective", "lambda_re", "lambda_im", "residual",
               "grad_norm", "cs_quotient")


@dataclass
class TraceRecord:
    iter: int
    objective: float
    eigenvalue: Optional[complex] = None
    residual: Optional[float] = None
    grad_norm: Optional[float] = None
    cs_quotient: Optional[float] = None

    def row(self):
        def fmt(x):
            if x is None or (isinstance(x, float) and math.isnan(x)):
                return ""
            return repr(float(x))

        lam = self.eigenvalue
        return [str(self.iter), fmt(self.objective),
                fmt(None if lam is None else lam.real),
                fmt(None if lam is None else lam.imag),
                fmt(self.residual), fmt(self.grad_norm), fmt(self.cs_quotient)]


@dataclass
class ConvergenceTrace:
    records: List[TraceRecord] = field(default_factory=list)

    def append(self, record):
        self.records.append(record)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def objectives(self):
        return [r.objective for r in self.records]

    def is_monotone(self, increasing=False, rtol=1e-12):
        """Monotonicity up to roundoff relative to the largest objective seen."""
        obj = self.objectives
        if len(obj) < 2:
            return True
        slack = rtol * max(abs(v) for v in obj)
        for a, b in zip(obj, obj[1:]):
            if increasing and b < a - slack:
                return False
            if not increasing and b > a + slack:
                return False
        return True

    def to_csv(self, fh=None):
        close = fh is None
        fh = fh if fh is not None else io.StringIO()
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.records:
            writer.writerow(r.row())
        if close:
            return fh.getvalue()
        return None
