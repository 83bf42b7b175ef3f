"""Validates every protocol fixture against its JSON schema."""

import json
import pathlib
import sys

import jsonschema


def main(fixtures: pathlib.Path, schemas: pathlib.Path) -> int:
    checked = 0
    for fixture in sorted(fixtures.glob("*.json")):
        schema = schemas / (fixture.stem + ".schema.json")
        if not schema.exists():
            print(f"no schema for {fixture.name}")
            return 1
        jsonschema.Draft202012Validator(json.loads(schema.read_text())).validate(json.loads(fixture.read_text()))
        checked += 1
    print(f"{checked} fixtures valid")
    return 0 if checked else 1


if __name__ == "__main__":
    sys.exit(main(pathlib.Path(sys.argv[1]), pathlib.Path(sys.argv[2])))
