"""Runs each invforge subcommand with --format json and validates the
output against the schema the binary embeds."""

import json
import subprocess
import sys

import jsonschema

RUNS = {
    "invariants": ["invariants", "--order", "4", "--explicit"],
    "frame": ["frame", "--order", "3"],
    "check": ["check", "--suite", "all", "--f", "exp(u)+v^3", "--samples", "5", "--order", "3"],
    "classify": ["classify", "--f", "u+v^2", "--point", "0,1"],
    "equiv": ["equiv", "--f1", "exp(u)", "--f2", "v^3", "--samples", "5"],
    "transform": ["transform", "--f", "exp(u)", "--seed", "3"],
}


def main(binary):
    failures = 0
    for name, args in RUNS.items():
        schema = json.loads(subprocess.run([binary, "--schema", name], capture_output=True, check=True, text=True).stdout)
        jsonschema.Draft202012Validator.check_schema(schema)
        out = subprocess.run([binary, *args, "--format", "json"], capture_output=True, text=True)
        if out.returncode not in (0, 1):
            print(f"[FAIL] {name}: exit {out.returncode}: {out.stderr.strip()}")
            failures += 1
            continue
        try:
            jsonschema.validate(json.loads(out.stdout), schema, cls=jsonschema.Draft202012Validator)
            print(f"[PASS] {name}")
        except (json.JSONDecodeError, jsonschema.ValidationError) as e:
            print(f"[FAIL] {name}: {e}")
            failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1]))
