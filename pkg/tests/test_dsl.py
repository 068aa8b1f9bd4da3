import cmath
import pathlib

import numpy as np
import pytest

import wigner as wg
from wigner import dsl
from wigner.errors import (
    DimensionMismatch,
    DivisionNearZero,
    ParseError,
    SchemaError,
    UnknownIdentifier,
    UnknownMatrix,
)

from oracles import jacobian_oracle

CORPUS = pathlib.Path(__file__).parent / "corpus"
CORPUS_FILES = sorted(CORPUS.glob("*.wig"))
CONSTANTS = dsl.load_constants(CORPUS / "constants.json")

# canonical form of a representative file, frozen byte for byte
GOLDEN_SOURCE = "dim 2;\nT1 = conj(z2) * (1.0 + 2.0i);\nT2 = -z1 / (0.5 - im(z2));\n"


def test_parse_conjugation_structure():
    spec = dsl.parse("dim 2; T1 = conj(z1); T2 = conj(z2);")
    assert spec.dimension == 2
    assert spec.outputs == (
        dsl.Call("conj", (dsl.Var(1),)),
        dsl.Call("conj", (dsl.Var(2),)),
    )
    assert spec.uses_conjugation


def test_parse_phase_dressed_structure():
    spec = dsl.parse("dim 1; T1 = expi(norm2()) * z1;")
    (out,) = spec.outputs
    assert out == dsl.BinOp("*", dsl.Call("expi", (dsl.Call("norm2", ()),)), dsl.Var(1))


def test_dangling_operator_reports_position():
    with pytest.raises(ParseError) as err:
        dsl.parse("dim 2; T1 = z1 + ;")
    assert err.value.line == 1
    assert err.value.column == 18
    assert err.value.expected


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifier):
        dsl.parse("dim 1; T1 = q7;")


def test_variable_out_of_range():
    with pytest.raises(UnknownIdentifier):
        dsl.parse("dim 2; T1 = z3; T2 = z1;")


def test_output_count_mismatch():
    with pytest.raises(DimensionMismatch):
        dsl.parse("dim 2; T1 = z1;")


def test_duplicate_output():
    with pytest.raises(ParseError):
        dsl.parse("dim 1; T1 = z1; T1 = z1;")


def test_output_index_out_of_range():
    with pytest.raises(DimensionMismatch):
        dsl.parse("dim 1; T1 = z1; T2 = z1;")


def test_evaluate_conjugation():
    spec = dsl.parse("dim 2; T1 = conj(z1); T2 = conj(z2);")
    out = dsl.evaluate(spec, np.array([1 + 2j, 3 + 0j]))
    assert np.array_equal(out, np.array([1 - 2j, 3 - 0j]))


def test_evaluate_permutation_matrix():
    spec = dsl.parse("dim 2; T1 = mat(U); T2 = mat(U);")
    out = dsl.evaluate(spec, np.array([5 + 1j, 7 - 2j]), CONSTANTS)
    assert np.abs(out - np.array([7 - 2j, 5 + 1j])).max() < 1e-15


def test_evaluate_expi_literal_point():
    spec = dsl.parse("dim 1; T1 = expi(re(z1)) * z1;")
    out = dsl.evaluate(spec, np.array([2.0 + 0j]))
    expected = cmath.exp(2j) * 2.0  # -0.832294 + 1.818595i
    assert abs(out[0] - expected) < 1e-12
    assert abs(out[0] - complex(-0.8322936730942848, 1.8185948536513634)) < 1e-12


def test_complex_literal_sugar():
    spec = dsl.parse("dim 1; T1 = (1+2i) * z1;")
    out = dsl.evaluate(spec, np.array([3.0 + 0j]))
    assert out[0] == (1 + 2j) * 3.0


def test_division_near_zero():
    spec = dsl.parse("dim 1; T1 = z1 / (z1 - z1);")
    with pytest.raises(DivisionNearZero):
        dsl.evaluate(spec, np.array([1.0 + 0j]))


def test_unknown_matrix_at_compile():
    spec = dsl.parse("dim 2; T1 = mat(W); T2 = z2;")
    with pytest.raises(UnknownMatrix):
        dsl.compile_to_transformation(spec, CONSTANTS)


def test_matrix_shape_checked():
    spec = dsl.parse("dim 1; T1 = mat(U);")
    with pytest.raises(DimensionMismatch):
        dsl.compile_to_transformation(spec, CONSTANTS)


def test_compiled_specs_classify_downstream():
    conj = dsl.compile_to_transformation(dsl.parse("dim 2; T1 = conj(z1); T2 = conj(z2);"))
    assert wg.classify(conj).branch == "antilinear"
    ident = dsl.compile_to_transformation(dsl.parse("dim 2; T1 = z1; T2 = z2;"))
    result = wg.classify(ident)
    assert result.branch == "linear"
    assert np.abs(result.operator - np.eye(2)).max() < 1e-9


def test_compiled_matches_manual_matvec():
    spec = dsl.parse("dim 2; T1 = mat(V); T2 = mat(V);")
    transform = dsl.compile_to_transformation(spec, CONSTANTS)
    v = CONSTANTS["V"]
    rng = np.random.default_rng(3)
    for _ in range(10):
        z = wg.random_state(2, rng)
        assert np.abs(transform(z) - v @ z).max() < 1e-12


def test_parse_constant():
    assert dsl.parse_constant("1+2i") == 1 + 2j
    assert dsl.parse_constant("-i") == -1j
    assert dsl.parse_constant("2.5e-3") == 2.5e-3
    with pytest.raises(ParseError):
        dsl.parse_constant("z1")


def test_golden_canonical_form():
    spec = dsl.parse(GOLDEN_SOURCE)
    assert dsl.pretty_print(spec) == GOLDEN_SOURCE


@pytest.mark.parametrize("path", CORPUS_FILES, ids=lambda p: p.stem)
def test_print_parse_round_trip(path):
    spec = dsl.parse(path.read_text())
    printed = dsl.pretty_print(spec)
    reparsed = dsl.parse(printed)
    assert reparsed.dimension == spec.dimension
    assert reparsed.outputs == spec.outputs
    # canonical form is a fixed point
    assert dsl.pretty_print(reparsed) == printed


@pytest.mark.parametrize("path", CORPUS_FILES, ids=lambda p: p.stem)
def test_corpus_jacobians_match_symbolic_oracle(path):
    spec = dsl.parse(path.read_text())
    transform = dsl.compile_to_transformation(spec, CONSTANTS)
    rng = np.random.default_rng(len(path.name))
    for _ in range(5):
        z = wg.random_state(spec.dimension, rng)
        numeric = wg.wirtinger_jacobian(transform, z)
        d_z, d_zbar = jacobian_oracle(spec, z, CONSTANTS)
        assert np.abs(numeric.d_z - d_z).max() < 1e-6
        assert np.abs(numeric.d_zbar - d_zbar).max() < 1e-6


def test_analytic_fragment_passes_analyticity():
    rng = np.random.default_rng(23)
    for path in CORPUS_FILES:
        if not path.name.startswith("analytic_"):
            continue
        spec = dsl.parse(path.read_text())
        assert not spec.uses_conjugation
        transform = dsl.compile_to_transformation(spec, CONSTANTS)
        points = [wg.random_state(spec.dimension, rng) for _ in range(20)]
        assert wg.analyticity_test(transform, points, tol=1e-6).analytic


def test_conjugating_specs_fail_analyticity():
    rng = np.random.default_rng(29)
    for path in CORPUS_FILES:
        if not path.name.startswith("nonanal_"):
            continue
        spec = dsl.parse(path.read_text())
        assert spec.uses_conjugation
        transform = dsl.compile_to_transformation(spec, CONSTANTS)
        points = [wg.random_state(spec.dimension, rng) for _ in range(20)]
        report = wg.analyticity_test(transform, points, tol=1e-6)
        assert not any(report.per_point)


def test_constants_schema_errors(tmp_path):
    bad = tmp_path / "c.json"
    bad.write_text('{"U": [[1, 2], [3, 4]]}')
    with pytest.raises(SchemaError):
        dsl.load_constants(bad)
    bad.write_text("not json")
    with pytest.raises(SchemaError):
        dsl.load_constants(bad)
