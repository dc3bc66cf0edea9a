import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grammar_cases import BINDINGS, ERRORS, VALID
from metrikos.expr import (
    BINARY_FUNCS,
    UNARY_FUNCS,
    Binary,
    BinaryFn,
    Constant,
    DomainError,
    ParseError,
    ScalarFn,
    Unary,
    Variable,
    evaluate,
    evaluate_array,
    f_preset,
    parse,
    pretty_print,
    theta_preset,
    variables,
)

VARS = ("x", "y", "s", "t")
BIN_OPS = ("add", "sub", "mul", "div", "pow", *BINARY_FUNCS)
UN_OPS = ("neg", *UNARY_FUNCS)


def random_ast(rng: np.random.Generator, depth: int):
    """Random AST with nonnegative constants (a negative literal prints as negation)."""
    roll = rng.random()
    if depth == 0 or roll < 0.25:
        if rng.random() < 0.5:
            return Variable(VARS[rng.integers(len(VARS))])
        return Constant(float(rng.choice([0.0, 1.0, 2.0, 0.5, round(float(rng.uniform(0, 100)), 4), 1e-7, 3e20])))
    if roll < 0.45:
        return Unary(UN_OPS[rng.integers(len(UN_OPS))], random_ast(rng, depth - 1))
    return Binary(BIN_OPS[rng.integers(len(BIN_OPS))], random_ast(rng, depth - 1), random_ast(rng, depth - 1))


@pytest.mark.parametrize("src,printed,value", VALID, ids=[c[0] for c in VALID])
def test_valid_grammar(src, printed, value):
    e = parse(src, BINDINGS)
    assert pretty_print(e) == printed
    assert evaluate(e, BINDINGS) == pytest.approx(value, rel=1e-12)


@pytest.mark.parametrize("src,offset", ERRORS, ids=[repr(c[0]) for c in ERRORS])
def test_parse_errors_report_offset(src, offset):
    with pytest.raises(ParseError) as info:
        parse(src, BINDINGS)
    assert info.value.offset == offset
    assert f"offset {offset}" in str(info.value)


def test_unknown_variable_message():
    with pytest.raises(ParseError, match="unknown variable q at offset 3"):
        parse("ln(q)", ["t"])


def test_round_trip_seeded():
    rng = np.random.default_rng(123)
    for _ in range(300):
        ast = random_ast(rng, 4)
        assert parse(pretty_print(ast), VARS) == ast


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_round_trip_property(seed):
    ast = random_ast(np.random.default_rng(seed), 5)
    text = pretty_print(ast)
    assert parse(text, VARS) == ast
    assert pretty_print(parse(text, VARS)) == text


@pytest.mark.parametrize(
    "src,fragment",
    [
        ("ln(t)", "ln(t)"),
        ("1/t", "(1/t)"),
        ("sqrt(t-5)", "sqrt((t-5))"),
        ("t^(-1)", "(t^(-1))"),
    ],
)
def test_domain_errors_name_node_and_bindings(src, fragment):
    with pytest.raises(DomainError) as info:
        evaluate(parse(src, ["t"]), {"t": 0.0})
    msg = str(info.value)
    assert fragment in msg and "t=0" in msg


def test_overflow_is_domain_error():
    with pytest.raises(DomainError, match="overflow"):
        evaluate(parse("exp(t)", ["t"]), {"t": 1000.0})


def test_evaluate_array_matches_scalar():
    rng = np.random.default_rng(5)
    for _ in range(100):
        ast = random_ast(rng, 3)
        vals = rng.uniform(0.1, 3.0, size=(4, 6))
        bindings = dict(zip(VARS, vals))
        try:
            arr = evaluate_array(ast, bindings)
        except DomainError:
            continue
        for j in range(6):
            scalar = evaluate(ast, {v: float(bindings[v][j]) for v in VARS})
            assert arr[j] == pytest.approx(scalar, rel=1e-12, abs=1e-300) or (math.isnan(scalar) and math.isnan(arr[j]))


def test_evaluate_array_raises_on_first_bad_element():
    with pytest.raises(DomainError):
        evaluate_array(parse("ln(t)", ["t"]), {"t": np.array([1.0, 0.0, -1.0])})


def test_variables_and_fn_wrappers():
    assert variables(parse("s+t*2", ["s", "t"])) == frozenset({"s", "t"})
    f = ScalarFn.parse("ln(t)+t")
    assert f(1.0) == 1.0
    np.testing.assert_allclose(f.vec([1.0, 2.0]), [1.0, math.log(2) + 2])
    th = BinaryFn.parse("s+t+s*t")
    assert th(1.0, 1.0) == 3.0
    with pytest.raises(ParseError):
        ScalarFn.parse("s+1")


def test_presets():
    assert f_preset("neg_inv")(2.0) == -0.5
    assert theta_preset("max")(1.0, 3.0) == 3.0
    with pytest.raises(KeyError):
        f_preset("nope")
