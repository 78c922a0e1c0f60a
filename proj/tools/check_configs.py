"""Validate the example configs with the reference jsonschema implementation.

Cross-checks the hand-written validator in src/config.cpp: both must accept
every file in tools/configs and reject the documents in INVALID.
"""

import json
import pathlib
import sys

import jsonschema

ROOT = pathlib.Path(__file__).resolve().parent
SCHEMA = json.loads((ROOT / "experiment.schema.json").read_text())

DEFS = {"tower.json": "tower", "tower_pairs.json": "tower_pairs"}

INVALID = [
    ("experiment", {"estimators": {"mc": {"N": 1000}}}),
    ("experiment", {"map": {"kind": "toral", "matrix": [[2, 1], [1, 1]]}, "colour": "red"}),
    ("experiment", {"map": {"kind": "baker", "k": 1}}),
    ("tower", {"branches": [{"w": 0, "R": 1}]}),
    ("tower_pairs", {"depth_pairs": {"depths": []}}),
]


def validator(defname):
    sub = dict(SCHEMA)
    sub["$ref"] = f"#/$defs/{defname}"
    return jsonschema.Draft202012Validator(sub)


def main():
    failures = 0
    for path in sorted((ROOT / "configs").glob("*.json")):
        errs = list(validator(DEFS.get(path.name, "experiment")).iter_errors(json.loads(path.read_text())))
        for e in errs:
            print(f"FAIL {path.name}: {e.message}")
        failures += bool(errs)
        if not errs:
            print(f"ok   {path.name}")
    for defname, doc in INVALID:
        if validator(defname).is_valid(doc):
            print(f"FAIL accepted invalid {defname}: {json.dumps(doc)}")
            failures += 1
        else:
            print(f"ok   rejects {json.dumps(doc)}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
