"""Walk through the attribute schema, discretization, and bit encoding.

Every categorical attribute occupies a contiguous bit segment, one bit per
level.  A student record becomes a fixed-length bit string with exactly one
set bit per segment, which is also the chromosome layout the genetic search
uses later.
"""

import numpy as np

from edm_rulex import default_student_schema
from edm_rulex.schema import (
    DimensionCuts,
    decode_vector,
    discretize_value,
    encode_record,
    StudentRecord,
)

schema = default_student_schema()

print("== the bundled student schema ==")
print(f"{len(schema.predictive)} predictive attributes, "
      f"{schema.total_predictive_bits} predictive bits, "
      f"target {schema.target.name!r} with levels {schema.target.levels}")
print()
for attr in schema.attributes[:6]:
    offset, width = (schema.segments.get(attr.name) or (None, None)) if attr.role == "predictive" else (None, None)
    print(f"  {attr.name:35s} levels={attr.levels} segment_offset={offset}")
print("  ...")
print()

print("== discretizing raw scores ==")
grade_cuts = DimensionCuts((50.0, 65.0, 80.0), ("F", "P", "G", "V.G"))
for score in (43.0, 60.0, 72.0, 80.0, 95.0):
    print(f"  unit score {score:5.1f} -> {discretize_value(score, grade_cuts)}")
print("  (a boundary score such as 80 joins the upper band)")
print()

print("== encoding one record ==")
values = {a.name: a.levels[0] for a in schema.attributes}
values.update({"Gender": "Fe", "Ambition": "H", "Unit 1": "G", "Reasoning": "P"})
record = StudentRecord(values)
vec = encode_record(record, schema)
print(f"  bits ({vec.bits.size} total): {''.join(map(str, vec.bits[:24]))}...")
print(f"  target index: {vec.target_index} ({schema.target.levels[vec.target_index]})")

gender_offset, gender_width = schema.segments["Gender"]
print(f"  Gender segment bits: {vec.bits[gender_offset:gender_offset + gender_width]}")

back = decode_vector(vec, schema)
print(f"  decode(encode(record)) == record: {back.values == record.values}")
print()

print("== round trip over random records ==")
rng = np.random.default_rng(0)
ok = 0
for _ in range(500):
    sample = {a.name: a.levels[rng.integers(len(a.levels))] for a in schema.attributes}
    rec = StudentRecord(sample)
    ok += decode_vector(encode_record(rec, schema), schema).values == rec.values
print(f"  {ok}/500 records survive encode -> decode unchanged")
