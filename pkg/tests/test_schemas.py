import json
from pathlib import Path

import pytest

jsonschema = pytest.importorskip("jsonschema")
from referencing import Registry, Resource  # noqa: E402

from ellcommute.cli import main  # noqa: E402
from ellcommute.curve import char_poly, rep_matrix  # noqa: E402
from ellcommute.monodromy import lame_loops  # noqa: E402

DOCS = Path(__file__).resolve().parents[1] / "docs"


def validator(name):
    schemas = {p.name: json.loads(p.read_text()) for p in DOCS.glob("*.schema.json")}
    reg = Registry().with_resources((k, Resource.from_contents(v)) for k, v in schemas.items())
    return jsonschema.Draft202012Validator(schemas[name], registry=reg)


def test_operator_and_series(lame_i):
    p, _, _ = lame_i
    validator("operator.schema.json").validate(p.to_json())


def test_curve(lame_i):
    p, q, _ = lame_i
    validator("curve.schema.json").validate(char_poly(rep_matrix(p, q)).to_json())


def test_path():
    validator("path.schema.json").validate(lame_loops(1j)[0].to_json())


def test_report(capsys):
    assert main(["verify", "all", "--preset", "lame", "--omega", "2i", "--no-loops"]) == 0
    validator("report.schema.json").validate(json.loads(capsys.readouterr().out))
