# Copyright 2026 The bbwork Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Validates the fixtures and live CLI output against schemas/v1."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema
from referencing import Registry, Resource

FIXTURE_SCHEMAS = {
    "dh_singleton_tau.json": "ht_problem",
    "box_diagonal_qubit.json": "box",
    "box_coherent_qubit.json": "box",
    "box_protocol.json": "box",
    "stein_box.json": "box",
    "dilation_swap.json": "thermal_op",
    "mix_flat_ancillas.json": "mix_input",
    "icpto_reset_on_one.json": "icpto_input",
    "reconstruct_qubit.json": "reconstruct_input",
    "estimate_qubit.json": "estimate",
    "reference_qubit.json": "hamiltonian",
}

COMMANDS = [
    ["dh", "dh_singleton_tau.json"],
    ["work", "--channel", "box_coherent_qubit.json"],
    ["pinch", "--copies", "2", "box_coherent_qubit.json"],
    ["reconstruct", "--copies", "3", "reconstruct_qubit.json"],
    ["identify", "--estimate", "estimate_qubit.json", "box_protocol.json"],
    ["mix", "mix_flat_ancillas.json"],
    ["compile-icpto", "icpto_reset_on_one.json"],
    ["verify-dilation", "dilation_swap.json"],
]


def main(cli, root):
    root = pathlib.Path(root)
    schema_dir = root / "schemas" / "v1"
    fixtures = root / "fixtures"
    schemas = {}
    registry = Registry()
    for path in sorted(schema_dir.glob("*.schema.json")):
        schema = json.loads(path.read_text())
        jsonschema.Draft202012Validator.check_schema(schema)
        schemas[path.name.removesuffix(".schema.json")] = schema
        registry = registry.with_resource(schema["$id"], Resource.from_contents(schema))

    def validate(instance, name, what):
        validator = jsonschema.Draft202012Validator(schemas[name], registry=registry)
        errors = sorted(validator.iter_errors(instance), key=lambda e: list(e.path))
        for e in errors:
            print(f"FAIL {what}: {'/'.join(map(str, e.path))}: {e.message}")
        return not errors

    ok = True
    for path in sorted(fixtures.glob("*.json")):
        if path.name not in FIXTURE_SCHEMAS:
            print(f"FAIL {path.name}: no schema assigned")
            ok = False
            continue
        ok &= validate(json.loads(path.read_text()), FIXTURE_SCHEMAS[path.name], path.name)

    for argv in COMMANDS:
        args = [a if not a.endswith(".json") else str(fixtures / a) for a in argv]
        out = subprocess.run([cli, *args], capture_output=True, text=True)
        if out.returncode != 0:
            print(f"FAIL {' '.join(argv)}: exit {out.returncode}: {out.stderr.strip()}")
            ok = False
            continue
        envelope = json.loads(out.stdout)
        ok &= validate(envelope, "result_envelope", " ".join(argv))
        result = envelope["result"]
        if argv[0] == "verify-dilation":
            ok &= validate(result["choi"], "choi", "verify-dilation choi")
        if argv[0] in ("mix", "compile-icpto"):
            ok &= validate(result["op"], "thermal_op", f"{argv[0]} op")

    with tempfile.TemporaryDirectory() as tmp:
        out_path = pathlib.Path(tmp) / "rate.csv"
        run = subprocess.run([cli, "rate", "--n", "2,4", "--out", str(out_path), str(fixtures / "stein_box.json")],
                             capture_output=True, text=True)
        if run.returncode != 0:
            print(f"FAIL rate: exit {run.returncode}: {run.stderr.strip()}")
            ok = False
        else:
            meta = json.loads(pathlib.Path(str(out_path) + ".meta.json").read_text())
            ok &= validate(meta, "result_envelope", "rate meta")

    print("schemas: " + ("ok" if ok else "FAILED"))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main(sys.argv[1], sys.argv[2]))
