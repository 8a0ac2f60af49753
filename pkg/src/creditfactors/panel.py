"""Monthly panel construction.

Loan-level records are averaged into grade/term series, turned into spreads
over matching-maturity risk-free yields, differenced, and aligned with other
monthly series on a single contiguous grid. All rates, yields, and spreads are
percent per annum. Missing entries are NaN. Panels are immutable; every
transform returns a new panel.
"""

import csv
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError

GRADES = ("A", "B", "C", "D", "E", "F")
TERMS = (36, 60)

KIND_RATE = "rate"
KIND_SPREAD_LEVEL = "spread_level"
KIND_SPREAD_DIFF = "spread_diff"
KIND_MACRO = "macro"
KINDS = (KIND_RATE, KIND_SPREAD_LEVEL, KIND_SPREAD_DIFF, KIND_MACRO)

ALIGN_INTERSECT = "intersect"
ALIGN_UNION = "union"


@dataclass(frozen=True, order=True)
class Month:
    """Calendar month, the atomic unit of every time grid."""

    year: int
    month: int

    def __post_init__(self):
        if not 1 <= int(self.month) <= 12:
            raise DataError(f"month out of range: {self.month}")

    @classmethod
    def parse(cls, text: str) -> "Month":
        """Parse 'YYYY-MM' or 'YYYY-MM-DD'; a day of month is discarded."""
        m = re.fullmatch(r"(\d{4})-(\d{2})(?:-(\d{2}))?", text.strip())
        if m is None:
            raise DataError(f"unparseable date {text!r} (expected YYYY-MM or YYYY-MM-DD)")
        return cls(int(m.group(1)), int(m.group(2)))

    @property
    def index(self) -> int:
        return self.year * 12 + self.month - 1

    @classmethod
    def from_index(cls, idx: int) -> "Month":
        return cls(idx // 12, idx % 12 + 1)

    def plus(self, months: int) -> "Month":
        return Month.from_index(self.index + months)

    def __sub__(self, other: "Month") -> int:
        return self.index - other.index

    def __str__(self) -> str:
        return f"{self.year:04d}-{self.month:02d}"


@dataclass(frozen=True)
class LoanRecord:
    """One originated loan, reduced to the fields the panel needs."""

    month: Month
    rate: float
    grade: str
    term: int

    def __post_init__(self):
        if not self.rate > 0:
            raise DataError(f"loan rate must be positive, got {self.rate}")
        if self.grade not in GRADES:
            raise DataError(f"unknown grade {self.grade!r} (expected one of {GRADES})")
        if self.term not in TERMS:
            raise DataError(f"unsupported term {self.term} (expected one of {TERMS})")


@dataclass(frozen=True)
class SeriesKey:
    """Name and kind of one panel column."""

    name: str
    kind: str = KIND_MACRO

    def __post_init__(self):
        if not self.name:
            raise DataError("series name must be nonempty")
        if self.kind not in KINDS:
            raise DataError(f"unknown series kind {self.kind!r} (expected one of {KINDS})")


@dataclass(frozen=True)
class YieldCurvePoint:
    """Risk-free yield for one month and maturity, percent per annum."""

    month: Month
    maturity_months: int
    yield_pct: float

    def __post_init__(self):
        if not np.isfinite(self.yield_pct):
            raise DataError(f"yield must be finite, got {self.yield_pct}")
        if self.maturity_months <= 0:
            raise DataError(f"maturity must be positive, got {self.maturity_months}")


@dataclass(frozen=True)
class AlignedPanel:
    """Named series on one contiguous monthly grid.

    values is a T x n float64 matrix; row t belongs to month start.plus(t) and
    NaN marks a missing observation. The matrix is stored read-only.
    """

    start: Month
    columns: tuple

    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 2:
            raise DataError(f"panel values must be 2-D, got shape {vals.shape}")
        if vals.shape[0] < 1:
            raise DataError("panel must have at least one row")
        cols = tuple(self.columns)
        if vals.shape[1] != len(cols):
            raise DataError(
                f"{len(cols)} column keys but {vals.shape[1]} value columns"
            )
        names = [c.name for c in cols]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise DataError(f"duplicate series names: {dupes}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "columns", cols)

    @property
    def n_obs(self) -> int:
        return self.values.shape[0]

    @property
    def n_series(self) -> int:
        return self.values.shape[1]

    @property
    def names(self) -> tuple:
        return tuple(c.name for c in self.columns)

    def month_at(self, t: int) -> Month:
        return self.start.plus(t)

    def months(self) -> list:
        return [self.start.plus(t) for t in range(self.n_obs)]

    @property
    def end(self) -> Month:
        return self.start.plus(self.n_obs - 1)

    def column(self, name: str) -> np.ndarray:
        try:
            j = self.names.index(name)
        except ValueError:
            raise DataError(f"no series named {name!r}") from None
        return self.values[:, j]

    def select(self, names: Sequence[str]) -> "AlignedPanel":
        """Sub-panel with the given columns, in the given order, same grid."""
        idx = []
        for name in names:
            if name not in self.names:
                raise DataError(f"no series named {name!r}")
            idx.append(self.names.index(name))
        return AlignedPanel(self.start, tuple(self.columns[j] for j in idx), self.values[:, idx])

    def is_complete(self) -> bool:
        return not np.isnan(self.values).any()

    def complete_column(self, name: str) -> np.ndarray:
        """Longest contiguous fully observed stretch of one column."""
        col = self.column(name)
        a, b = _longest_true_run(~np.isnan(col))
        if b <= a:
            raise DataError(f"series {name!r} has no observations")
        return col[a:b]


def _longest_true_run(mask: np.ndarray) -> tuple:
    """(start, stop) of the longest run of True; earliest wins ties; (0, 0) if none."""
    best = (0, 0)
    run_start = None
    for i, flag in enumerate(list(mask) + [False]):
        if flag and run_start is None:
            run_start = i
        elif not flag and run_start is not None:
            if i - run_start > best[1] - best[0]:
                best = (run_start, i)
            run_start = None
    return best


# ---------------------------------------------------------------------------
# construction and transforms
# ---------------------------------------------------------------------------

def aggregate_loans(records: Iterable[LoanRecord]) -> AlignedPanel:
    """Average loan rates into one mean-rate series per term/grade bucket.

    The grid spans the earliest to the latest origination month. Buckets with
    no loans in a month are missing (NaN), never zero; buckets with no loans
    anywhere produce no column. Means are simple unweighted averages of the
    individual loan rates.
    """
    records = list(records)
    if not records:
        raise DataError("no loan records")
    lo = min(r.month for r in records)
    hi = max(r.month for r in records)
    n_months = hi - lo + 1
    buckets = [(term, grade) for term in TERMS for grade in GRADES]
    col_of = {bucket: j for j, bucket in enumerate(buckets)}
    sums = np.zeros((n_months, len(buckets)))
    counts = np.zeros((n_months, len(buckets)))
    for r in records:
        j = col_of[(r.term, r.grade)]
        t = r.month - lo
        sums[t, j] += r.rate
        counts[t, j] += 1
    means = np.divide(sums, counts, out=np.full_like(sums, np.nan), where=counts > 0)
    observed = [j for j in range(len(buckets)) if counts[:, j].sum() > 0]
    keys = tuple(SeriesKey(f"{term}-{grade}", KIND_RATE)
                 for j in observed for term, grade in [buckets[j]])
    return AlignedPanel(lo, keys, means[:, observed])


def term_of_series(name: str) -> int:
    """Maturity in months encoded in a '<term>-<grade>' series name."""
    m = re.fullmatch(r"(\d+)-([A-Z])", name)
    if m is None:
        raise DataError(f"series {name!r} does not follow the '<term>-<grade>' naming")
    return int(m.group(1))


def to_spreads(panel: AlignedPanel, curve: Iterable[YieldCurvePoint]) -> AlignedPanel:
    """Subtract the matching-maturity risk-free yield from every rate.

    Every observed (month, term) cell needs a curve point; a missing one is an
    error naming the month and maturity. Missing rates stay missing.
    """
    lookup = {}
    for pt in curve:
        key = (pt.month, pt.maturity_months)
        if key in lookup and lookup[key] != pt.yield_pct:
            raise DataError(f"conflicting yields for {pt.month} at {pt.maturity_months} months")
        lookup[key] = pt.yield_pct
    out = np.array(panel.values)
    keys = []
    for j, key in enumerate(panel.columns):
        term = term_of_series(key.name)
        for t in range(panel.n_obs):
            if np.isnan(out[t, j]):
                continue
            y = lookup.get((panel.month_at(t), term))
            if y is None:
                raise DataError(f"no yield for {panel.month_at(t)} at maturity {term} months")
            out[t, j] -= y
        keys.append(SeriesKey(key.name, KIND_SPREAD_LEVEL))
    return AlignedPanel(panel.start, tuple(keys), out)


def first_difference(panel: AlignedPanel) -> AlignedPanel:
    """Month-over-month change of every series; the grid loses its first month.

    A difference is observed only where both neighbouring levels are. Every
    column must contain at least two consecutive observations.
    """
    if panel.n_obs < 2:
        raise DataError("cannot difference a panel with fewer than two rows")
    diff = panel.values[1:] - panel.values[:-1]
    for j, key in enumerate(panel.columns):
        if not np.any(~np.isnan(diff[:, j])):
            raise DataError(f"series {key.name!r} has fewer than two consecutive observations")
    kind_map = {KIND_SPREAD_LEVEL: KIND_SPREAD_DIFF}
    keys = tuple(SeriesKey(c.name, kind_map.get(c.kind, c.kind)) for c in panel.columns)
    return AlignedPanel(panel.start.plus(1), keys, diff)


def interpolate_quarterly(points, name: str = "interpolated", kind: str = KIND_MACRO) -> AlignedPanel:
    """Linear interpolation of sparse (typically quarterly) anchors to months.

    points is a sequence of (Month, value) pairs with strictly increasing
    months. The output grid runs from the first anchor to the last; anchors
    are reproduced exactly and nothing is extrapolated past either end.
    """
    pts = [(m, float(v)) for m, v in points]
    if len(pts) < 2:
        raise DataError("need at least two anchor points to interpolate")
    months = [m for m, _ in pts]
    for a, b in zip(months, months[1:]):
        if b - a <= 0:
            raise DataError(f"anchor dates must be strictly increasing ({a} then {b})")
    if any(not np.isfinite(v) for _, v in pts):
        raise DataError("anchor values must be finite")
    start = months[0]
    n_months = months[-1] - start + 1
    xs = np.array([m - start for m in months], dtype=float)
    ys = np.array([v for _, v in pts])
    grid = np.interp(np.arange(n_months, dtype=float), xs, ys)
    return AlignedPanel(start, (SeriesKey(name, kind),), grid[:, None])


def align(panels: Sequence[AlignedPanel], policy: str = ALIGN_INTERSECT) -> AlignedPanel:
    """Merge panels onto one grid.

    union: the grid spans every input's months; cells outside an input's own
    span (or missing inside it) stay NaN.

    intersect: the longest contiguous run of months on which every column of
    every input is observed (the earliest run on ties); errors when no fully
    observed month exists. The result is therefore complete and a contiguous
    sub-grid of each input's span.
    """
    panels = list(panels)
    if not panels:
        raise DataError("no panels to align")
    if policy not in (ALIGN_INTERSECT, ALIGN_UNION):
        raise DataError(f"unknown alignment policy {policy!r}")
    lo = min(p.start for p in panels)
    hi = max(p.end for p in panels)
    n_months = hi - lo + 1
    keys = tuple(c for p in panels for c in p.columns)
    merged = np.full((n_months, len(keys)), np.nan)
    j = 0
    for p in panels:
        off = p.start - lo
        merged[off:off + p.n_obs, j:j + p.n_series] = p.values
        j += p.n_series
    if policy == ALIGN_UNION:
        return AlignedPanel(lo, keys, merged)
    complete = ~np.isnan(merged).any(axis=1)
    a, b = _longest_true_run(complete)
    if b <= a:
        raise DataError("intersect alignment found no month where every column is observed")
    return AlignedPanel(lo.plus(a), keys, merged[a:b])


# ---------------------------------------------------------------------------
# CSV interfaces
# ---------------------------------------------------------------------------

def read_loans_csv(path) -> list:
    """Loan-level CSV with header date,rate,grade,term (one loan per row)."""
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"date", "rate", "grade", "term"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise DataError(f"{path}: expected header with columns date,rate,grade,term")
        for i, row in enumerate(reader, start=2):
            try:
                records.append(LoanRecord(
                    month=Month.parse(row["date"]),
                    rate=float(row["rate"]),
                    grade=row["grade"].strip(),
                    term=int(row["term"]),
                ))
            except DataError as exc:
                raise DataError(f"{path}:{i}: {exc}") from None
            except ValueError as exc:
                raise DataError(f"{path}:{i}: {exc}") from None
    if not records:
        raise DataError(f"{path}: no loan rows")
    return records


def read_yields_csv(path) -> list:
    """Yield-curve CSV with header date,maturity_months,yield."""
    points = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"date", "maturity_months", "yield"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise DataError(f"{path}: expected header with columns date,maturity_months,yield")
        for i, row in enumerate(reader, start=2):
            try:
                points.append(YieldCurvePoint(
                    month=Month.parse(row["date"]),
                    maturity_months=int(row["maturity_months"]),
                    yield_pct=float(row["yield"]),
                ))
            except DataError as exc:
                raise DataError(f"{path}:{i}: {exc}") from None
            except ValueError as exc:
                raise DataError(f"{path}:{i}: {exc}") from None
    if not points:
        raise DataError(f"{path}: no yield rows")
    return points


def read_panel_csv(path, kind: str = KIND_MACRO) -> AlignedPanel:
    """Panel CSV: first column 'date' as YYYY-MM, one series per remaining column.

    Empty cells are missing. Leading '#' lines are metadata comments and are
    skipped. Months must be consecutive.
    """
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise DataError(f"{path}: empty file") from None
    if not header or header[0] != "date":
        raise DataError(f"{path}: first column must be 'date'")
    names = header[1:]
    if not names:
        raise DataError(f"{path}: no series columns")
    months = []
    rows = []
    for i, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise DataError(f"{path}:{i}: expected {len(header)} cells, got {len(row)}")
        months.append(Month.parse(row[0]))
        vals = []
        for cell in row[1:]:
            cell = cell.strip()
            if cell == "":
                vals.append(np.nan)
            else:
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise DataError(f"{path}:{i}: unparseable number {cell!r}") from None
        rows.append(vals)
    if not rows:
        raise DataError(f"{path}: no data rows")
    for a, b in zip(months, months[1:]):
        if b - a != 1:
            raise DataError(f"{path}: months must be consecutive ({a} is followed by {b})")
    keys = tuple(SeriesKey(name, kind) for name in names)
    return AlignedPanel(months[0], keys, np.array(rows))


def write_panel_csv(panel: AlignedPanel, path, comment: str = None) -> None:
    """Write a panel in the CSV layout read_panel_csv accepts. Missing -> empty cell.

    Values use the shortest decimal form that parses back to the same float,
    so a write/read cycle is lossless.
    """
    with open(path, "w", newline="") as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(["date"] + list(panel.names))
        for t in range(panel.n_obs):
            row = [str(panel.month_at(t))]
            for v in panel.values[t]:
                row.append("" if np.isnan(v) else repr(float(v)))
            writer.writerow(row)
