"""Differential-operator algebra: parsing, normal ordering, application to
sections, and the symbol map to ring relations."""

import random
from fractions import Fraction

import pytest

from qcoh.algebra import HLaurent
from qcoh.model import builtin_model
from qcoh.operators import (
    ParseError,
    QDEOperator,
    apply_classical,
    apply_gauge,
    builtin_operators,
    builtin_relations,
    builtin_rowspec,
    defining_count,
    load_rowspec,
    normalize,
    parse_operator,
    parse_relation,
    symbol_map,
)
from qcoh.quantum import eval_relation
from qcoh.sections import closed_form
from qcoh.series import GaugeSeries


# -- oracle: hand-computed normal ordering -------------------------------------
# theta q = q (theta + h) gives theta^2 q = q theta^2 + 2 h q theta + h^2 q.


def test_normal_ordering_theta_squared_q():
    rank = 1
    th = QDEOperator.gen_theta(rank, 1)
    q = QDEOperator.gen_q(rank, 1)
    got = th * th * q
    want = {
        (0, (1,), (2,)): Fraction(1),
        (1, (1,), (1,)): Fraction(2),
        (2, (1,), (0,)): Fraction(1),
    }
    assert got.c == want
    assert str(got) == "q1*D1^2 + 2*h*q1*D1 + h^2*q1"


def test_normal_ordering_q_through_theta_is_trivial():
    rank = 1
    th = QDEOperator.gen_theta(rank, 1)
    q = QDEOperator.gen_q(rank, 1)
    # q theta is already normal-ordered
    assert (q * th).c == {(0, (1,), (1,)): Fraction(1)}


def test_normal_ordering_multivariate_cross_terms():
    rank = 2
    th1 = QDEOperator.gen_theta(rank, 1)
    q2 = QDEOperator.gen_q(rank, 2)
    # theta_1 and q_2 commute
    assert th1 * q2 == q2 * th1


def test_parse_canonical_string_round_trip():
    cases = [
        "D1^2 - q1",
        "D1^2*D2 - q1*D2",
        "D1^3 - q1*D1 - q1*D2 - h*q1",
        "D1*D2^2 - q2*D1 - q1*q2",
        "1/2*D1 + 7",
        "h^2*q1*D1 - 3/4",
    ]
    for text in cases:
        op = parse_operator(text, 2)
        assert parse_operator(str(op), 2) == op


def test_parser_precedence_and_unary_minus():
    op = parse_operator("-(D1 - 2)*D1", 1)
    assert op == parse_operator("2*D1 - D1^2", 1)
    op = parse_operator("3/6*D1", 1)
    assert op == parse_operator("1/2*D1", 1)


def test_parser_rejects_malformed_input():
    with pytest.raises(ParseError):
        parse_operator("D1 D2", 2)  # implicit product
    with pytest.raises(ParseError):
        parse_operator("D1^D1", 1)  # exponent must be an integer literal
    with pytest.raises(ParseError):
        parse_operator("(D1", 1)  # unbalanced
    with pytest.raises(ParseError):
        parse_operator("D3", 2)  # index out of range
    with pytest.raises(ParseError):
        parse_operator("b1", 1)  # basis symbol is a relation-only name
    with pytest.raises(ParseError):
        parse_relation("h*b1", 1)  # h is an operator-only name
    with pytest.raises(ParseError):
        parse_relation("D1", 1)


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as err:
        parse_operator("D1 + $", 1)
    assert err.value.pos == 5


def test_negative_h_power_rejected():
    with pytest.raises(ValueError):
        QDEOperator(1, {(-1, (0,), (0,)): Fraction(1)})


def test_rowspec_requires_trailing_identity(tmp_path):
    good = tmp_path / "rows.txt"
    good.write_text("D1\n1\n")
    ops = load_rowspec(good, 1)
    assert len(ops) == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("D1\nD1^2\n")
    with pytest.raises(ValueError):
        load_rowspec(bad, 1)


def test_expression_files_skip_comments(tmp_path):
    f = tmp_path / "ops.txt"
    f.write_text("# header\n\nD1^2 - q1  # trailing note\n")
    from qcoh.operators import load_operators

    (op,) = load_operators(f, 1)
    assert op == parse_operator("D1^2 - q1", 1)


# -- shipped files -----------------------------------------------------------------


@pytest.mark.parametrize("name,count", [("cp1", 1), ("cp3", 1), ("f3", 5), ("sigma1", 4)])
def test_builtin_operator_files_parse(name, count):
    model = builtin_model(name)
    ops = builtin_operators(model)
    assert len(ops) == count
    assert len(builtin_operators(model, defining_only=True)) == defining_count(model)


def test_builtin_rowspec_shapes():
    for name in ("cp1", "cp2", "cp3", "cp4", "cp5", "f3", "sigma1"):
        model = builtin_model(name)
        rows = builtin_rowspec(model)
        assert len(rows) == model.size
        assert rows[-1] == QDEOperator.const(model.rank, 1)


def test_builtin_operators_missing_for_gr24():
    with pytest.raises(LookupError):
        builtin_operators(builtin_model("gr24"))


# -- symbol map ---------------------------------------------------------------------


@pytest.mark.parametrize("name", ["cp1", "cp2", "cp3", "cp4", "cp5", "f3", "sigma1"])
def test_symbol_map_of_defining_operators_vanishes(name):
    """h -> 0, theta -> generator sends every annihilating operator to a
    relation that holds in the quantum ring."""
    model = builtin_model(name)
    for op in builtin_operators(model):
        elem = symbol_map(op, model, 6)
        assert not elem.c, (name, str(op))


def test_symbol_map_matches_shipped_relations():
    """For the defining operators the symbol map reproduces the relation
    polynomial evaluated in the ring."""
    model = builtin_model("f3")
    for op, rel in zip(
        builtin_operators(model, defining_only=True), builtin_relations(model)
    ):
        assert not symbol_map(op, model, 6).c
        assert not eval_relation(model, rel, 6).c


def test_symbol_map_drops_h_terms():
    model = builtin_model("cp1")
    op = parse_operator("h*D1 + D1", 1)
    elem = symbol_map(op, model, 4)
    # only the h-free D1 survives: the class x
    assert elem.c == {(0,): model.basis_class(1)}


# -- application soundness ------------------------------------------------------------


def _random_operator(rng, rank, nterms=3):
    out = QDEOperator.const(rank, 0)
    for _ in range(nterms):
        term = QDEOperator.const(
            rank, Fraction(rng.randint(-6, 6), rng.randint(1, 4))
        )
        term = term * QDEOperator.gen_h(rank) ** rng.randint(0, 2)
        for i in range(1, rank + 1):
            term = term * QDEOperator.gen_q(rank, i) ** rng.randint(0, 1)
            term = term * QDEOperator.gen_theta(rank, i) ** rng.randint(0, 2)
    # multiply in a random order too, to exercise commutation
        if rng.random() < 0.5:
            term = QDEOperator.gen_theta(rank, 1) * term
        out = out + term
    return out


def _random_section(rng, model, order):
    from qcoh.model import CohClass

    terms = {}
    for D in _all_degrees(model.rank, order):
        coords = tuple(
            HLaurent(
                {
                    rng.randint(-2, 2): Fraction(rng.randint(-5, 5))
                    for _ in range(2)
                }
            )
            for _ in range(model.size)
        )
        cls = CohClass(coords)
        if cls:
            terms[D] = cls
    return GaugeSeries(model, order, terms)


def _all_degrees(rank, order):
    if rank == 1:
        return [(d,) for d in range(order + 1)]
    out = []
    for a in range(order + 1):
        for b in range(order + 1 - a):
            out.append((a, b))
    return out


def test_operator_product_agrees_with_sequential_application():
    """Normal-ordering soundness: (A*B) applied to a random section equals
    A applied after B, for 100 seeded random operator pairs."""
    rng = random.Random(912830)
    model = builtin_model("f3")
    order = 2
    for trial in range(100):
        A = _random_operator(rng, model.rank)
        B = _random_operator(rng, model.rank)
        s = _random_section(rng, model, order)
        left = apply_gauge(A * B, s)
        right = apply_gauge(A, apply_gauge(B, s))
        assert left.c == right.c, trial


def test_normalize_is_identity_on_normal_forms():
    rng = random.Random(5511)
    for _ in range(20):
        op = _random_operator(rng, 2)
        assert normalize(op) == op


def test_apply_gauge_annihilates_closed_form():
    model = builtin_model("cp2")
    J = closed_form(model, 5)
    (op,) = builtin_operators(model)
    assert not apply_gauge(op, J)


def test_apply_classical_requires_q_free():
    model = builtin_model("cp1")
    from qcoh.sections import asymptotic_J

    aj = asymptotic_J(model)
    with pytest.raises(ValueError):
        apply_classical(parse_operator("D1 - q1", 1), aj, model)
    res = apply_classical(parse_operator("D1^2", 1), aj, model)
    assert not res.c  # x^2 = 0 classically


def test_theta_part_and_q_free_part():
    op = parse_operator("D1^2*D2 - q1*D2 + h*D1 - q1", 2)
    tp = op.theta_part()
    assert tp == parse_operator("D1^2*D2", 2)
    qf = op.q_free_part()
    assert qf == parse_operator("D1^2*D2 + h*D1", 2)
