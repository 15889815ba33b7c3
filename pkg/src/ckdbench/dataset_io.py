"""Reading, validating and summarizing the chronic kidney disease table.

Cells are plain Python values: ``None`` for a missing cell, ``int`` for
discrete-integer attributes, ``float`` for numeric ones and a normalized
``str`` token for nominal ones.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import (
    BadSpec,
    DataError,
    DomainViolation,
    EmptyData,
    LabelMissing,
    MalformedHeader,
    TypeMismatch,
)

MISSING_TOKEN = "?"
SCHEMA_VERSION = "ckd-schema/1"

INTEGER = "integer"
NUMERIC = "numeric"
NOMINAL = "nominal"


@dataclass(frozen=True)
class AttributeKind:
    kind: str
    values: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in (INTEGER, NUMERIC, NOMINAL):
            raise ValueError(f"unknown attribute kind {self.kind!r}")
        if self.kind == NOMINAL:
            if not self.values:
                raise ValueError("nominal attribute needs at least one allowed value")
            keys = [normalize_token(v) for v in self.values]
            if len(set(keys)) != len(keys):
                raise ValueError(f"duplicate allowed values in {self.values}")
        elif self.values:
            raise ValueError("only nominal attributes carry allowed values")

    @property
    def is_nominal(self):
        return self.kind == NOMINAL

    def match(self, token):
        """Return the canonical allowed value equal to ``token``, or None."""
        key = normalize_token(token)
        for v in self.values:
            if normalize_token(v) == key:
                return v
        return None

    def describe(self):
        if self.kind == NOMINAL:
            return "{" + ",".join(self.values) + "}"
        return self.kind


DISCRETE_INTEGER = AttributeKind(INTEGER)
REAL = AttributeKind(NUMERIC)


def nominal(*values):
    return AttributeKind(NOMINAL, tuple(values))


def normalize_token(token):
    # "Not-Present", " notpresent\t" and "NOTPRESENT" all compare equal
    return token.strip().lower().replace("-", "")


@dataclass(frozen=True)
class Schema:
    attributes: tuple[tuple[str, AttributeKind], ...]
    class_attribute: str = "class"
    positive_label: str = "ckd"
    negative_label: str = "notckd"
    long_names: tuple[str, ...] = ()
    version: str = "custom"

    def __post_init__(self):
        names = [a for a, _ in self.attributes]
        if len(set(names)) != len(names):
            raise ValueError("attribute names must be unique")
        if self.class_attribute in names:
            raise ValueError("class attribute cannot also be a predictor")
        if normalize_token(self.positive_label) == normalize_token(self.negative_label):
            raise ValueError("positive and negative labels must differ")
        if self.long_names and len(self.long_names) != len(self.attributes):
            raise ValueError("long_names must align with attributes")

    @property
    def names(self):
        return [a for a, _ in self.attributes]

    @property
    def kinds(self):
        return [k for _, k in self.attributes]

    def __len__(self):
        return len(self.attributes)

    def index(self, name):
        return self.names.index(name)

    def kind_of(self, name):
        return self.attributes[self.index(name)][1]

    def to_dict(self):
        return {
            "version": self.version,
            "class_attribute": self.class_attribute,
            "positive_label": self.positive_label,
            "negative_label": self.negative_label,
            "attributes": [
                {
                    "name": name,
                    **({"long_name": self.long_names[i]} if self.long_names else {}),
                    "kind": kind.kind,
                    **({"allowed": list(kind.values)} if kind.is_nominal else {}),
                }
                for i, (name, kind) in enumerate(self.attributes)
            ],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


_YES_NO = ("yes", "no")

# Short names follow the UCI file header; order is the join key with the long names.
CKD_SCHEMA = Schema(
    attributes=(
        ("age", DISCRETE_INTEGER),
        ("bp", DISCRETE_INTEGER),
        ("sg", nominal("1.005", "1.010", "1.015", "1.020", "1.025")),
        ("al", nominal("0", "1", "2", "3", "4", "5")),
        ("su", nominal("0", "1", "2", "3", "4", "5")),
        ("rbc", nominal("normal", "abnormal")),
        ("pc", nominal("normal", "abnormal")),
        ("pcc", nominal("present", "notpresent")),
        ("ba", nominal("present", "notpresent")),
        ("bgr", DISCRETE_INTEGER),
        ("bu", DISCRETE_INTEGER),
        ("sc", REAL),
        ("sod", DISCRETE_INTEGER),
        ("pot", REAL),
        ("hemo", REAL),
        ("pcv", DISCRETE_INTEGER),
        ("wbcc", DISCRETE_INTEGER),
        ("rbcc", REAL),
        ("htn", nominal(*_YES_NO)),
        ("dm", nominal(*_YES_NO)),
        ("cad", nominal(*_YES_NO)),
        ("appet", nominal("good", "poor")),
        ("pe", nominal(*_YES_NO)),
        ("ane", nominal(*_YES_NO)),
    ),
    long_names=(
        "Age", "Blood pressure", "Specific gravity", "Albumin", "Sugar",
        "Red blood cells", "Pus cell", "Pus cell clumps", "Bacteria",
        "Blood glucose random", "Blood urea", "Serum creatinine", "Sodium",
        "Potassium", "Hemoglobin", "Packed cell volume", "WBC count",
        "RBC count", "Hypertension", "Diabetes mellitus",
        "Coronary artery disease", "Appetite", "Pedal edema", "Anemia",
    ),
    version=SCHEMA_VERSION,
)
assert len(CKD_SCHEMA) == 24


@dataclass
class RawTable:
    """Header declarations plus string tokens, ``None`` marking a missing cell."""

    attributes: list[tuple[str, str]]
    rows: list[list[str | None]]
    line_numbers: list[int] = field(default_factory=list)
    relation: str = ""

    @property
    def names(self):
        return [a for a, _ in self.attributes]


_ATTR_RE = re.compile(
    r"""^@attribute\s+(?:'([^']*)'|"([^"]*)"|(\S+))\s+(.+)$""", re.IGNORECASE
)


def _clean(token):
    token = token.strip().strip("'\"").strip()
    if token == MISSING_TOKEN or token == "":
        return None
    return token


def _read_text(source):
    if hasattr(source, "read"):
        return source.read()
    return source


def _fit_row(tokens, expected, line_no):
    if len(tokens) == expected:
        return tokens
    if len(tokens) > expected:
        # stray commas in the UCI file leave empty fields behind
        trimmed = [t for t in tokens if t.strip() != ""]
        if len(trimmed) == expected:
            return trimmed
    raise MalformedHeader(
        f"expected {expected} values, found {len(tokens)}", line=line_no
    )


def parse_arff(source) -> RawTable:
    """Parse ARFF text (a string or a readable text stream)."""
    text = _read_text(source)
    attributes = []
    relation = ""
    rows, line_numbers = [], []
    in_data = False
    nominal_cols = set()

    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("%"):
            continue
        if not in_data:
            lower = stripped.lower()
            if lower.startswith("@relation"):
                relation = stripped[len("@relation"):].strip().strip("'\"")
            elif lower.startswith("@attribute"):
                m = _ATTR_RE.match(stripped)
                if m is None:
                    raise MalformedHeader(f"cannot read attribute declaration {stripped!r}", line=line_no)
                name = next(g for g in m.groups()[:3] if g is not None).strip()
                decl = m.group(4).strip()
                if decl.startswith("{"):
                    nominal_cols.add(len(attributes))
                    values = [v.strip("'\" \t").lower() for v in decl.strip("{} \t").split(",")]
                    decl = "{" + ",".join(values) + "}"
                else:
                    decl = decl.lower()
                attributes.append((name, decl))
            elif lower.startswith("@data"):
                if not attributes:
                    raise MalformedHeader("@data before any @attribute", line=line_no)
                in_data = True
            else:
                raise MalformedHeader(f"unexpected header line {stripped!r}", line=line_no)
            continue

        tokens = _fit_row(stripped.split(","), len(attributes), line_no)
        row = []
        for j, tok in enumerate(tokens):
            value = _clean(tok)
            if value is not None and j in nominal_cols:
                value = value.lower()
            row.append(value)
        rows.append(row)
        line_numbers.append(line_no)

    if not in_data:
        raise MalformedHeader("no @data section")
    if not rows:
        raise EmptyData("@data section holds no rows")
    return RawTable(attributes, rows, line_numbers, relation)


def parse_csv(source) -> RawTable:
    """Parse CSV text whose first line is a header row."""
    text = _read_text(source)
    reader = csv.reader(io.StringIO(text))
    header = None
    rows, line_numbers = [], []
    for record in reader:
        line_no = reader.line_num
        if not record or all(not c.strip() for c in record):
            continue
        if header is None:
            header = [c.strip() for c in record]
            continue
        tokens = _fit_row(record, len(header), line_no)
        rows.append([_clean(t) for t in tokens])
        line_numbers.append(line_no)
    if header is None:
        raise MalformedHeader("missing header row")
    if not rows:
        raise EmptyData("no data rows after the header")
    return RawTable([(h, "") for h in header], rows, line_numbers)


@dataclass(frozen=True)
class Dataset:
    schema: Schema
    cells: tuple[tuple, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.cells) != len(self.labels):
            raise ValueError("cells and labels must have the same length")
        width = len(self.schema)
        allowed = (self.schema.positive_label, self.schema.negative_label)
        for i, (row, label) in enumerate(zip(self.cells, self.labels)):
            if len(row) != width:
                raise ValueError(f"row {i} has {len(row)} cells, schema has {width}")
            if label not in allowed:
                raise ValueError(f"row {i} label {label!r} not in {allowed}")

    def __len__(self):
        return len(self.labels)

    def column(self, name):
        j = self.schema.index(name)
        return [row[j] for row in self.cells]

    def subset(self, indices):
        idx = list(indices)
        return Dataset(
            self.schema,
            tuple(self.cells[i] for i in idx),
            tuple(self.labels[i] for i in idx),
        )

    def is_positive(self):
        return np.array([lab == self.schema.positive_label for lab in self.labels])


def _parse_number(token, kind, fractional, where):
    try:
        value = float(token)
    except ValueError:
        raise TypeMismatch(f"{where}: {token!r} is not numeric") from None
    if not math.isfinite(value):
        raise TypeMismatch(f"{where}: {token!r} is not finite")
    if kind.kind == NUMERIC:
        return value
    if value == int(value):
        return int(value)
    if fractional == "keep":
        return value
    raise TypeMismatch(f"{where}: {token!r} is not an integer")


def apply_schema(raw: RawTable, schema: Schema = CKD_SCHEMA, fractional: str = "error") -> Dataset:
    """Type every token according to ``schema``.

    ``fractional`` controls discrete-integer columns holding a non-integral
    number: ``"error"`` raises TypeMismatch, ``"keep"`` stores the float.
    """
    if fractional not in ("error", "keep"):
        raise ValueError("fractional must be 'error' or 'keep'")
    width = len(schema) + 1
    if len(raw.attributes) != width:
        raise MalformedHeader(
            f"table has {len(raw.attributes)} columns, schema expects {width} "
            f"({len(schema)} predictors + class)"
        )
    pos, neg = schema.positive_label, schema.negative_label
    cells, labels = [], []
    for r, row in enumerate(raw.rows):
        line = raw.line_numbers[r] if raw.line_numbers else None
        where_row = f"row {r + 1}" + (f" (line {line})" if line else "")
        token = row[-1]
        if token is None:
            raise LabelMissing(f"{where_row}: class label is missing")
        key = normalize_token(token)
        if key == normalize_token(pos):
            labels.append(pos)
        elif key == normalize_token(neg):
            labels.append(neg)
        else:
            raise DomainViolation(
                f"{where_row}: class label {token!r} not in ({pos}, {neg})",
                row=r, attribute=schema.class_attribute,
            )
        typed = []
        for (name, kind), tok in zip(schema.attributes, row[:-1]):
            if tok is None:
                typed.append(None)
                continue
            where = f"{where_row}, attribute {name}"
            if kind.is_nominal:
                value = kind.match(tok)
                if value is None:
                    raise DomainViolation(
                        f"{where}: {tok!r} not in allowed values {kind.values}",
                        row=r, attribute=name,
                    )
                typed.append(value)
            else:
                typed.append(_parse_number(tok, kind, fractional, where))
        cells.append(tuple(typed))
    return Dataset(schema, tuple(cells), tuple(labels))


def load_dataset(path, format=None, schema=CKD_SCHEMA, fractional="error") -> Dataset:
    path = Path(path)
    if format is None:
        format = "csv" if path.suffix.lower() == ".csv" else "arff"
    try:
        text = path.read_text(encoding="utf-8", errors="replace")
    except OSError as exc:
        raise DataError(f"cannot read dataset {path}: {exc.strerror}") from exc
    raw = parse_csv(text) if format == "csv" else parse_arff(text)
    return apply_schema(raw, schema, fractional=fractional)


def _format_cell(value):
    if value is None:
        return MISSING_TOKEN
    if isinstance(value, float):
        return repr(value)
    return str(value)


def to_arff(ds: Dataset, relation="Chronic_Kidney_Disease") -> str:
    schema = ds.schema
    out = [f"@relation '{relation}'", ""]
    for name, kind in schema.attributes:
        decl = kind.describe() if kind.is_nominal else "numeric"
        out.append(f"@attribute '{name}' {decl}")
    out.append(f"@attribute '{schema.class_attribute}' {{{schema.positive_label},{schema.negative_label}}}")
    out += ["", "@data"]
    for row, label in zip(ds.cells, ds.labels):
        out.append(",".join([_format_cell(v) for v in row] + [label]))
    return "\n".join(out) + "\n"


def to_csv(ds: Dataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(ds.schema.names + [ds.schema.class_attribute])
    for row, label in zip(ds.cells, ds.labels):
        writer.writerow([_format_cell(v) for v in row] + [label])
    return buf.getvalue()


@dataclass
class Summary:
    n_rows: int
    class_counts: dict[str, int]
    missing_counts: dict[str, int]
    ranges: dict[str, tuple[float, float] | None]
    n_predictors: int = 0

    def to_dict(self):
        return {
            "rows": self.n_rows,
            "predictors": self.n_predictors,
            "class_counts": dict(self.class_counts),
            "missing_counts": dict(self.missing_counts),
            "ranges": {k: (list(v) if v else None) for k, v in self.ranges.items()},
        }

    def to_text(self):
        lines = [
            f"rows        {self.n_rows}",
            f"predictors  {self.n_predictors}",
            "classes     " + ", ".join(f"{k}={v}" for k, v in self.class_counts.items()),
            "",
            f"{'attribute':<10} {'missing':>7}  range",
        ]
        for name, missing in self.missing_counts.items():
            rng = self.ranges.get(name)
            span = f"{rng[0]:g} .. {rng[1]:g}" if rng else ""
            lines.append(f"{name:<10} {missing:>7}  {span}")
        return "\n".join(lines) + "\n"


def summarize(ds: Dataset) -> Summary:
    schema = ds.schema
    class_counts = {schema.positive_label: 0, schema.negative_label: 0}
    for label in ds.labels:
        class_counts[label] += 1
    missing, ranges = {}, {}
    for j, (name, kind) in enumerate(schema.attributes):
        col = [row[j] for row in ds.cells]
        missing[name] = sum(v is None for v in col)
        if not kind.is_nominal:
            seen = [v for v in col if v is not None]
            ranges[name] = (min(seen), max(seen)) if seen else None
    return Summary(len(ds), class_counts, missing, ranges, n_predictors=len(schema))


@dataclass
class SynthSpec:
    """Per-class generating distributions for ``synth_generate``.

    ``numeric`` maps attribute -> {label: (mean, stddev)}; ``nominal`` maps
    attribute -> {label: {token: probability}}.
    """

    schema: Schema
    numeric: dict[str, dict[str, tuple[float, float]]]
    nominal: dict[str, dict[str, dict[str, float]]] = field(default_factory=dict)
    positive_fraction: float = 0.5
    missing_rate: float = 0.0

    def validate(self):
        labels = (self.schema.positive_label, self.schema.negative_label)
        if not 0.0 <= self.positive_fraction <= 1.0:
            raise BadSpec("positive_fraction must lie in [0, 1]")
        if not 0.0 <= self.missing_rate < 1.0:
            raise BadSpec("missing_rate must lie in [0, 1)")
        for name, kind in self.schema.attributes:
            if kind.is_nominal:
                per_class = self.nominal.get(name)
                if per_class is None:
                    raise BadSpec(f"no nominal distribution for {name}")
                for label in labels:
                    probs = per_class.get(label)
                    if probs is None:
                        raise BadSpec(f"{name}: no distribution for class {label}")
                    if any(p < 0 for p in probs.values()):
                        raise BadSpec(f"{name}/{label}: negative probability")
                    if abs(sum(probs.values()) - 1.0) > 1e-9:
                        raise BadSpec(f"{name}/{label}: probabilities sum to {sum(probs.values())}")
                    for tok in probs:
                        if kind.match(tok) is None:
                            raise BadSpec(f"{name}: {tok!r} is not an allowed value")
            else:
                per_class = self.numeric.get(name)
                if per_class is None:
                    raise BadSpec(f"no numeric distribution for {name}")
                for label in labels:
                    if label not in per_class:
                        raise BadSpec(f"{name}: no distribution for class {label}")
                    _, sd = per_class[label]
                    if sd < 0:
                        raise BadSpec(f"{name}/{label}: negative stddev {sd}")


def synth_generate(spec: SynthSpec, n: int, seed: int) -> Dataset:
    """Draw ``n`` labelled rows; the positive count is floor(n * positive_fraction)."""
    if n < 1:
        raise BadSpec("n must be at least 1")
    spec.validate()
    schema = spec.schema
    rng = np.random.default_rng(seed)
    n_pos = math.floor(n * spec.positive_fraction)
    labels = [schema.positive_label] * n_pos + [schema.negative_label] * (n - n_pos)
    labels = [labels[i] for i in rng.permutation(n)]
    is_pos = np.array([lab == schema.positive_label for lab in labels])

    columns = []
    for name, kind in schema.attributes:
        col = [None] * n
        for label, mask in ((schema.positive_label, is_pos), (schema.negative_label, ~is_pos)):
            idx = np.flatnonzero(mask)
            if kind.is_nominal:
                probs = spec.nominal[name][label]
                tokens = [kind.match(t) for t in probs]
                p = np.array(list(probs.values()), dtype=float)
                draws = rng.choice(len(tokens), size=len(idx), p=p / p.sum())
                values = [tokens[d] for d in draws]
            else:
                mean, sd = spec.numeric[name][label]
                draws = rng.normal(mean, sd, size=len(idx))
                if kind.kind == INTEGER:
                    values = [int(v) for v in np.rint(draws)]
                else:
                    values = [float(v) for v in draws]
            for i, v in zip(idx, values):
                col[i] = v
        if spec.missing_rate > 0:
            holes = rng.random(n) < spec.missing_rate
            col = [None if h else v for v, h in zip(col, holes)]
        columns.append(col)

    cells = tuple(tuple(col[i] for col in columns) for i in range(n))
    return Dataset(schema, cells, tuple(labels))


def gaussian_pair_spec(separation=5.0, stddev=1.0, n_features=1, positive_fraction=0.5):
    """Two numeric classes centred at +separation / -separation on every feature."""
    attrs = tuple((f"x{j}", REAL) for j in range(n_features))
    schema = Schema(attrs, class_attribute="class", positive_label="pos", negative_label="neg")
    numeric = {
        name: {"pos": (separation, stddev), "neg": (-separation, stddev)} for name, _ in attrs
    }
    return SynthSpec(schema, numeric, positive_fraction=positive_fraction)


def _binary(p_first_ckd, p_first_not, first, second):
    return {
        "ckd": {first: p_first_ckd, second: 1.0 - p_first_ckd},
        "notckd": {first: p_first_not, second: 1.0 - p_first_not},
    }


def ckd_surrogate_spec(missing_rate=0.08) -> SynthSpec:
    """A synthetic stand-in with the CKD schema and a 250/150-style class mix.

    The distributions are rough clinical plausibility guesses; data drawn
    from this spec is a pipeline fixture, not the UCI dataset.
    """
    numeric = {
        "age": {"ckd": (54, 17), "notckd": (46, 15)},
        "bp": {"ckd": (79, 15), "notckd": (71, 8)},
        "bgr": {"ckd": (170, 80), "notckd": (107, 18)},
        "bu": {"ckd": (70, 45), "notckd": (33, 11)},
        "sc": {"ckd": (4.0, 2.5), "notckd": (0.9, 0.3)},
        "sod": {"ckd": (134, 8), "notckd": (141, 5)},
        "pot": {"ckd": (4.8, 1.0), "notckd": (4.3, 0.6)},
        "hemo": {"ckd": (10.6, 2.2), "notckd": (15.2, 1.3)},
        "pcv": {"ckd": (32, 7), "notckd": (46, 4)},
        "wbcc": {"ckd": (9000, 3000), "notckd": (7700, 1800)},
        "rbcc": {"ckd": (3.9, 0.9), "notckd": (5.4, 0.6)},
    }
    nominal_spec = {
        "sg": {
            "ckd": {"1.005": 0.1, "1.010": 0.35, "1.015": 0.3, "1.020": 0.2, "1.025": 0.05},
            "notckd": {"1.005": 0.0, "1.010": 0.0, "1.015": 0.0, "1.020": 0.5, "1.025": 0.5},
        },
        "al": {
            "ckd": {"0": 0.3, "1": 0.2, "2": 0.2, "3": 0.2, "4": 0.09, "5": 0.01},
            "notckd": {"0": 1.0},
        },
        "su": {
            "ckd": {"0": 0.7, "1": 0.07, "2": 0.08, "3": 0.07, "4": 0.06, "5": 0.02},
            "notckd": {"0": 1.0},
        },
        "rbc": _binary(0.6, 1.0, "normal", "abnormal"),
        "pc": _binary(0.55, 1.0, "normal", "abnormal"),
        "pcc": _binary(0.17, 0.0, "present", "notpresent"),
        "ba": _binary(0.09, 0.0, "present", "notpresent"),
        "htn": _binary(0.58, 0.0, "yes", "no"),
        "dm": _binary(0.5, 0.0, "yes", "no"),
        "cad": _binary(0.13, 0.0, "yes", "no"),
        "appet": _binary(0.7, 1.0, "good", "poor"),
        "pe": _binary(0.3, 0.0, "yes", "no"),
        "ane": _binary(0.24, 0.0, "yes", "no"),
    }
    return SynthSpec(CKD_SCHEMA, numeric, nominal_spec, positive_fraction=0.625,
                     missing_rate=missing_rate)


def schema_json(schema: Schema = CKD_SCHEMA) -> str:
    return schema.to_json()


def iter_missing_cells(ds: Dataset) -> Iterable[tuple[int, int]]:
    for i, row in enumerate(ds.cells):
        for j, v in enumerate(row):
            if v is None:
                yield i, j


def dataset_equal(a: Dataset, b: Dataset) -> bool:
    """Cell-by-cell equality that also distinguishes int from float."""
    if a.schema != b.schema or a.labels != b.labels or len(a.cells) != len(b.cells):
        return False
    for ra, rb in zip(a.cells, b.cells):
        for x, y in zip(ra, rb):
            if type(x) is not type(y) or x != y:
                return False
    return True


__all__ = [
    "AttributeKind", "Schema", "CKD_SCHEMA", "RawTable", "Dataset", "Summary",
    "SynthSpec", "parse_arff", "parse_csv", "apply_schema", "load_dataset",
    "summarize", "synth_generate", "to_arff", "to_csv", "gaussian_pair_spec",
    "ckd_surrogate_spec", "schema_json", "nominal", "DISCRETE_INTEGER", "REAL",
]
