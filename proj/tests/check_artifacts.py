# Copyright 2026 The semcausal Authors
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

"""Runs the CLI on a config and validates every emitted JSON artifact
against the published schemas, key order and float formatting."""

import argparse
import json
import pathlib
import re
import subprocess
import sys

import jsonschema
from referencing import Registry, Resource

SCHEMA_FOR = {
    "comparison.json": "comparison.schema.json",
    "contour_grid.json": "contour_grid.schema.json",
    "discretization.json": "discretization.schema.json",
    "fit_indices.json": "fit_indices.schema.json",
    "info_gain.json": "info_gain.schema.json",
    "manifest.json": "manifest.schema.json",
    "metrics_train.json": "metrics.schema.json",
    "metrics_validation.json": "metrics.schema.json",
    "net.json": "net.schema.json",
    "net_train.json": "net.schema.json",
    "profiles.json": "profiles.schema.json",
}

STRING = re.compile(r'"(?:[^"\\]|\\.)*"')
FLOAT = re.compile(r"-?\d+\.\d+(?:e[+-]?\d+)?|-?\d+e[+-]?\d+")


def sorted_pairs(pairs):
    keys = [k for k, _ in pairs]
    if keys != sorted(keys):
        raise ValueError(f"keys not sorted: {keys}")
    return dict(pairs)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cli", required=True)
    ap.add_argument("--config", required=True)
    ap.add_argument("--schemas", required=True)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    out = pathlib.Path(args.out)
    for cmd in ("run", "compare"):
        subprocess.run([args.cli, cmd, args.config, "--out", str(out)], check=True, stdout=subprocess.DEVNULL)

    schemas_dir = pathlib.Path(args.schemas)
    resources = []
    for path in schemas_dir.glob("*.schema.json"):
        resources.append((path.name, Resource.from_contents(json.loads(path.read_text()))))
    registry = Registry().with_resources(resources)

    failures = 0
    checked = 0
    for name, schema_name in sorted(SCHEMA_FOR.items()):
        path = out / name
        if not path.exists():
            print(f"FAIL {name}: not written")
            failures += 1
            continue
        text = path.read_text()
        try:
            doc = json.loads(text, object_pairs_hook=sorted_pairs)
            schema = json.loads((schemas_dir / schema_name).read_text())
            jsonschema.Draft202012Validator(schema, registry=registry).validate(doc)
            for token in FLOAT.findall(STRING.sub('""', text)):
                if token != ("%.17g" % float(token)) and token != ("%.17g" % float(token)) + ".0":
                    raise ValueError(f"float {token} is not in 17-significant-digit form")
            print(f"ok   {name}")
            checked += 1
        except (ValueError, jsonschema.ValidationError) as exc:
            print(f"FAIL {name}: {exc}")
            failures += 1
    print(f"{checked} artifacts valid, {failures} failed")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
