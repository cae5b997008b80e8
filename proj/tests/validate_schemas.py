"""Runs every qcrb-lab command with --output json and validates the result
against the shipped schema. Usage: validate_schemas.py QCRB_LAB MODELS SCHEMAS"""

import json
import subprocess
import sys
from pathlib import Path

from jsonschema import Draft202012Validator

CASES = [
    ("qfi", ["--model", "ghz4.yaml", "--show-sld"], {0}),
    ("qfi", ["--model", "static_state.yaml"], {0}),
    ("sld", ["--model", "mixed_qubit.yaml"], {0}),
    ("errprop", ["--model", "ghz2_scan.yaml"], {4}),
    ("errprop", ["--model", "mixed_qubit.yaml"], {0, 4}),
    ("check-optimal", ["--model", "ghz3_sigma_x.yaml"], {0}),
    ("check-optimal", ["--model", "ghz2_scan.yaml"], {3}),
    ("scan", ["--model", "ghz2_scan.yaml"], {0}),
    ("scan", ["--model", "mixed_qubit.yaml"], {0}),
    ("cfi", ["--model", "ghz2_scan.yaml"], {4}),
    ("lambda", ["--phi-range", "0:pi:5"], {0}),
    ("lambda", ["--phi", "pi/4", "--basis", "y_basis"], {0}),
    ("simulate", ["--model", "ghz2_simulate.yaml", "--trials", "120", "--nu", "2000"], {0}),
    ("simulate", ["--model", "ghz2_simulate.yaml", "--trials", "3"], {0}),
]


def main() -> int:
    exe, models, schemas = sys.argv[1], Path(sys.argv[2]), Path(sys.argv[3])
    failures = 0
    for cmd, args, codes in CASES:
        args = [str(models / a) if a.endswith(".yaml") else a for a in args]
        proc = subprocess.run([exe, cmd, *args, "--output", "json"],
                              capture_output=True, text=True, check=False)
        label = " ".join([cmd, *args])
        if proc.returncode not in codes:
            print(f"FAIL {label}: exit {proc.returncode}, stderr: {proc.stderr.strip()}")
            failures += 1
            continue
        schema = json.loads((schemas / f"{cmd}.schema.json").read_text())
        Draft202012Validator.check_schema(schema)
        errors = list(Draft202012Validator(schema).iter_errors(json.loads(proc.stdout)))
        if errors:
            print(f"FAIL {label}: {errors[0].message} at {list(errors[0].absolute_path)}")
            failures += 1
        else:
            print(f"ok   {label}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
