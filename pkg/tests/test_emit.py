from dataclasses import replace

import pytest

from owx2proto import EmitConfig, check_text, emit, emit_options_file, generate, parse_owx, parse_proto, translate
from owx2proto.emit import EmitError, quote
from owx2proto.proto_ast import Field, Message, ProtoFile
from owxtext import owx
from conftest import FIXTURES

GOLDEN = FIXTURES / "golden"


@pytest.mark.parametrize("strategy", ["ledger", "hash"])
def test_fixture_matches_golden(cloud_bytes, cloud_config, strategy):
    gen = generate(cloud_bytes, replace(cloud_config, strategy=strategy))
    assert gen.text == (GOLDEN / f"cloud_{strategy}.proto").read_text()


def test_empty_ontology_file():
    doc, _ = parse_owx(owx("", prefixes='<Prefix name="ex" IRI="http://example.com/"/>'))
    ast, _ = translate(doc)
    text = emit(ast)
    assert "message" not in text
    assert 'syntax = "proto3";' in text
    assert "package owl.generated;" in text
    assert 'import "owl/options.proto";' in text
    assert "option (owl.meta)" in text


@pytest.mark.parametrize("strategy", ["ledger", "hash"])
def test_emit_parse_emit_is_idempotent(cloud_bytes, cloud_config, strategy):
    text = generate(cloud_bytes, replace(cloud_config, strategy=strategy)).text
    ast, diags = parse_proto(text)
    assert diags == []
    assert emit(ast) == text


def test_indent_and_header_options(cloud_bytes, cloud_config):
    text = generate(cloud_bytes, cloud_config, emit_config=EmitConfig(indent=4, header=False)).text
    assert not text.startswith("//")
    assert "\n    option (owl.class).iri" in text
    assert emit(parse_proto(text)[0], EmitConfig(indent=4, header=False)) == text


def test_output_layout(cloud_bytes, cloud_config):
    text = generate(cloud_bytes, cloud_config).text
    assert text.endswith("}\n") and not text.endswith("\n\n")
    assert "\r" not in text and "\t" not in text


def test_options_file_declarations():
    text = emit_options_file()
    assert "optional EntityEntry class = 50000;" in text
    assert "repeated PrefixEntry prefixes = 1;" in text
    _, diags = check_text(text)
    assert diags == []


def test_invalid_ast_is_refused():
    bad = ProtoFile(messages=(Message("M", None, (Field("a", "string", 1), Field("b", "string", 1))),))
    with pytest.raises(EmitError):
        emit(bad)


def test_quote_escapes():
    assert quote('a"b\\c\n') == '"a\\"b\\\\c\\n"'


def test_quoted_iris_round_trip():
    ast = ProtoFile(package="p", prefixes=(("q", 'http://x/"odd"\\'),))
    text = emit(ast)
    assert parse_proto(text)[0].prefixes == ast.prefixes
