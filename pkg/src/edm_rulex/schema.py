"""Attribute schema, score discretization, and the binary segment encoding.

A schema is an ordered list of categorical attributes, each with an ordered
level list and a role (predictive or target).  Predictive attributes are laid
out as contiguous bit segments, one bit per level, which gives every valid
record a fixed-length one-hot-per-segment encoding and gives the genetic
search its chromosome layout.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ValidationError
from .util import config_hash

ROLE_PREDICTIVE = "predictive"
ROLE_TARGET = "target"


@dataclass(frozen=True)
class Attribute:
    """One categorical attribute: a name, its ordered levels, and a role."""

    name: str
    levels: tuple[str, ...]
    role: str = ROLE_PREDICTIVE

    def __post_init__(self):
        if self.role not in (ROLE_PREDICTIVE, ROLE_TARGET):
            raise ValidationError(f"unknown role {self.role!r} for attribute {self.name!r}")
        if len(self.levels) == 0:
            raise ValidationError(f"attribute {self.name!r} declares zero levels")
        if len(set(self.levels)) != len(self.levels):
            raise ValidationError(f"attribute {self.name!r} has duplicate level tokens")

    def level_index(self, token: str) -> int:
        try:
            return self.levels.index(token)
        except ValueError:
            raise ValidationError(
                f"unknown token {token!r} for attribute {self.name!r}; "
                f"expected one of {list(self.levels)}"
            ) from None


@dataclass(frozen=True)
class AttributeSchema:
    """Ordered attribute list with a computed, stable bit-segment layout.

    Segments are contiguous and non-overlapping in attribute order, covering
    exactly ``[0, total_predictive_bits)``.  Instances are immutable and safe
    to share across threads.
    """

    attributes: tuple[Attribute, ...]

    def __post_init__(self):
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ValidationError(f"duplicate attribute names: {dupes}")
        targets = [a for a in self.attributes if a.role == ROLE_TARGET]
        if len(targets) == 0:
            raise ValidationError("schema declares no target attribute")
        if len(targets) > 1:
            raise ValidationError(
                f"schema declares {len(targets)} target attributes; exactly one is required"
            )

    @cached_property
    def predictive(self) -> tuple[Attribute, ...]:
        return tuple(a for a in self.attributes if a.role == ROLE_PREDICTIVE)

    @cached_property
    def target(self) -> Attribute:
        return next(a for a in self.attributes if a.role == ROLE_TARGET)

    @cached_property
    def segments(self) -> dict[str, tuple[int, int]]:
        """Per predictive attribute: (bit offset, bit width) in layout order."""
        out: dict[str, tuple[int, int]] = {}
        offset = 0
        for a in self.predictive:
            out[a.name] = (offset, len(a.levels))
            offset += len(a.levels)
        return out

    @property
    def total_predictive_bits(self) -> int:
        return sum(len(a.levels) for a in self.predictive)

    @property
    def target_bits(self) -> int:
        return len(self.target.levels)

    def attribute(self, name: str) -> Attribute:
        for a in self.attributes:
            if a.name == name:
                return a
        raise ValidationError(f"schema has no attribute named {name!r}")

    def validate_record(self, record: "StudentRecord") -> None:
        """Check that the record carries exactly the schema's attributes with
        known tokens."""
        expected = {a.name for a in self.attributes}
        got = set(record.values)
        if expected != got:
            missing = sorted(expected - got)
            extra = sorted(got - expected)
            raise ValidationError(f"record attributes mismatch: missing={missing} extra={extra}")
        for a in self.attributes:
            a.level_index(record.values[a.name])


@dataclass(frozen=True)
class StudentRecord:
    """One student: a level token per attribute, plus optional raw scores."""

    values: Mapping[str, str]
    raw: Mapping[str, float] | None = None


@dataclass(frozen=True)
class EncodedVector:
    """Fixed-length bit string over the predictive segments plus class index."""

    bits: np.ndarray  # uint8, shape (total_predictive_bits,)
    target_index: int

    def __post_init__(self):
        object.__setattr__(self, "bits", np.asarray(self.bits, dtype=np.uint8))


@dataclass(frozen=True)
class DimensionCuts:
    """Ascending cut points and the level tokens of the bands they bound.

    ``len(tokens) == len(cuts) + 1``; band i is ``[cuts[i-1], cuts[i])``
    (left-closed), scores below the first cut map to tokens[0] and scores at
    or above the last cut map to tokens[-1].
    """

    cuts: tuple[float, ...]
    tokens: tuple[str, ...]

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.cuts, self.cuts[1:])):
            raise ValidationError(f"cut points must be strictly increasing, got {self.cuts}")
        if len(self.tokens) != len(self.cuts) + 1:
            raise ValidationError(
                f"need {len(self.cuts) + 1} tokens for {len(self.cuts)} cuts, got {len(self.tokens)}"
            )


@dataclass(frozen=True)
class DiscretizationSpec:
    """Per raw dimension: the cut points mapping scores to level tokens."""

    dimensions: Mapping[str, DimensionCuts] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            name: {"cuts": list(dc.cuts), "tokens": list(dc.tokens)}
            for name, dc in self.dimensions.items()
        }

    @staticmethod
    def from_dict(doc: Mapping) -> "DiscretizationSpec":
        dims = {
            name: DimensionCuts(tuple(entry["cuts"]), tuple(entry["tokens"]))
            for name, entry in doc.items()
        }
        return DiscretizationSpec(dims)


def load_schema(document: str | Sequence[Mapping]) -> AttributeSchema:
    """Build a schema from its JSON document.

    The document is a list of ``{"name": ..., "levels": [...], "role": ...}``
    objects, or the JSON text of one.  Role defaults to predictive.
    """
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            raise ValidationError(f"schema document is not valid JSON: {e}") from None
    if not isinstance(document, Sequence) or isinstance(document, (str, bytes)):
        raise ValidationError("schema document must be a list of attribute objects")
    attrs = []
    for entry in document:
        try:
            attrs.append(
                Attribute(
                    name=str(entry["name"]),
                    levels=tuple(str(t) for t in entry["levels"]),
                    role=str(entry.get("role", ROLE_PREDICTIVE)),
                )
            )
        except KeyError as e:
            raise ValidationError(f"schema attribute entry missing key {e}") from None
    return AttributeSchema(tuple(attrs))


def schema_document(schema: AttributeSchema) -> list[dict]:
    """Inverse of load_schema: the plain-JSON form of a schema."""
    return [
        {"name": a.name, "levels": list(a.levels), "role": a.role} for a in schema.attributes
    ]


def schema_hash(schema: AttributeSchema) -> str:
    return config_hash(schema_document(schema))


def discretize_value(score: float, cuts: DimensionCuts) -> str:
    """Map a raw score to its band token (boundaries belong to the upper band)."""
    if not np.isfinite(score):
        raise ValidationError(f"cannot discretize non-finite score {score!r}")
    idx = int(np.searchsorted(np.asarray(cuts.cuts), score, side="right"))
    return cuts.tokens[idx]


def discretize_record(
    raw: Mapping[str, float], spec: DiscretizationSpec
) -> dict[str, str]:
    """Discretize every raw dimension of one record to level tokens."""
    out = {}
    for name, score in raw.items():
        if name not in spec.dimensions:
            raise ValidationError(f"no discretization entry for raw dimension {name!r}")
        out[name] = discretize_value(float(score), spec.dimensions[name])
    return out


def encode_record(record: StudentRecord, schema: AttributeSchema) -> EncodedVector:
    """One-hot encode the predictive segments; target becomes a class index."""
    schema.validate_record(record)
    bits = np.zeros(schema.total_predictive_bits, dtype=np.uint8)
    for a in schema.predictive:
        offset, _ = schema.segments[a.name]
        bits[offset + a.level_index(record.values[a.name])] = 1
    return EncodedVector(bits=bits, target_index=schema.target.level_index(record.values[schema.target.name]))


def decode_vector(vec: EncodedVector, schema: AttributeSchema) -> StudentRecord:
    """Invert encode_record.  Requires exactly one set bit per segment."""
    bits = np.asarray(vec.bits, dtype=np.uint8)
    if bits.shape != (schema.total_predictive_bits,):
        raise ValidationError(
            f"bit string has length {bits.shape}, schema expects {schema.total_predictive_bits}"
        )
    values: dict[str, str] = {}
    for a in schema.predictive:
        offset, width = schema.segments[a.name]
        seg = bits[offset : offset + width]
        on = np.flatnonzero(seg)
        if len(on) != 1:
            raise ValidationError(
                f"segment for {a.name!r} is not one-hot ({seg.tolist()}); cannot decode a record"
            )
        values[a.name] = a.levels[int(on[0])]
    if not 0 <= vec.target_index < schema.target_bits:
        raise ValidationError(f"target index {vec.target_index} out of range")
    values[schema.target.name] = schema.target.levels[vec.target_index]
    return StudentRecord(values=values)


def encode_dataset(records: Iterable[StudentRecord], schema: AttributeSchema) -> list[EncodedVector]:
    return [encode_record(r, schema) for r in records]


def parse_dataset_csv(text: str, schema: AttributeSchema) -> list[StudentRecord]:
    """Parse a level-token CSV whose header is the schema's attribute names.

    The first violation is reported with its data row number (1-based) and the
    offending attribute.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ValidationError("dataset CSV is empty") from None
    expected = [a.name for a in schema.attributes]
    if header != expected:
        raise ValidationError(
            f"header mismatch: expected {expected}, got {header}"
        )
    records = []
    for rownum, row in enumerate(reader, start=1):
        if not row:
            continue
        if len(row) != len(expected):
            raise ValidationError(
                f"row {rownum}: expected {len(expected)} columns, got {len(row)}"
            )
        values = {}
        for attr, token in zip(schema.attributes, row):
            if token not in attr.levels:
                raise ValidationError(
                    f"row {rownum}, attribute {attr.name!r}: unknown token {token!r}"
                )
            values[attr.name] = token
        records.append(StudentRecord(values=values))
    return records


def write_dataset_csv(records: Iterable[StudentRecord], schema: AttributeSchema) -> str:
    """Render records as the schema-conformant CSV (byte-stable)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([a.name for a in schema.attributes])
    for record in records:
        schema.validate_record(record)
        writer.writerow([record.values[a.name] for a in schema.attributes])
    return buf.getvalue()
