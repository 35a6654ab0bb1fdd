"""Run every CLI command with --format json and validate against the shipped schema."""
import json
import os
import subprocess
import sys
import tempfile

import jsonschema

cli, schema_path = sys.argv[1], sys.argv[2]
with open(schema_path) as f:
    schema = json.load(f)
validator = jsonschema.Draft202012Validator(schema)

tmp = tempfile.mkdtemp()
matrix = os.path.join(tmp, "m.json")
with open(matrix, "w") as f:
    json.dump({"rows": 2, "cols": 2, "data": [[0, 0], [1, 0], [0, 0], [0, 0]]}, f)

runs = [
    ["certify", "--n", "2:6", "--k", "1:3", "--trials", "5", "--seed", "1"],
    ["certify", "--gen", "truncated_shift", "--n", "10"],
    ["fraas", "--n", "1:8", "--k", "1:4", "--trials", "4"],
    ["fraas", "--input", matrix.replace("m.json", "fam.json")],
    ["split", "--n-qn", "1:4", "--n-n", "1:4", "--k", "1:3", "--trials", "4"],
    ["spread", "--input", matrix, "--grid", "256"],
    ["counterexample"],
]
with open(os.path.join(tmp, "fam.json"), "w") as f:
    json.dump({"members": [json.load(open(matrix))]}, f)

failures = 0
for args in runs:
    proc = subprocess.run([cli, *args, "--format", "json"], capture_output=True, text=True)
    if proc.returncode not in (0, 1):
        print(f"FAIL {args}: exit {proc.returncode}\n{proc.stderr}")
        failures += 1
        continue
    errors = sorted(validator.iter_errors(json.loads(proc.stdout)), key=lambda e: list(e.path))
    for e in errors[:5]:
        print(f"FAIL {args}: {list(e.path)}: {e.message}")
    failures += bool(errors)
    if not errors:
        print(f"ok   {' '.join(args[:1])}")

sys.exit(1 if failures else 0)
