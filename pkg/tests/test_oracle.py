"""The brute-force references themselves, on hand-checked instances."""

from fractions import Fraction

import pytest

from tdcount.errors import TooLargeError
from tdcount.graphs import Graph
from tdcount.model import Atom, CnfFormula, GroundProgram
from tdcount.oracle import (
    brute_answer_sets,
    brute_count_models,
    brute_projected_count,
    brute_treewidth,
    brute_weighted_count,
)
from tdcount.parsers import parse_dimacs, parse_ground_program


def answer_sets(text):
    p = parse_ground_program(text)
    names = p.atom_names()
    return sorted(frozenset(names[a] for a in s) for s in brute_answer_sets(p))


def test_even_negation_cycle_has_two_answer_sets():
    assert answer_sets("a :- not b. b :- not a.") == [
        frozenset({"a"}),
        frozenset({"b"}),
    ]


def test_positive_self_loop_is_not_founded():
    assert answer_sets("a :- a.") == [frozenset()]


def test_fact():
    assert answer_sets("a.") == [frozenset({"a"})]


def test_empty_program_has_the_empty_answer_set():
    assert brute_answer_sets(parse_ground_program("")) == [frozenset()]


def test_disjunction_yields_minimal_models():
    assert answer_sets("a | b.") == [frozenset({"a"}), frozenset({"b"})]


def test_constraint_filters_answer_sets():
    assert answer_sets("a | b. :- a.") == [frozenset({"b"})]
    assert answer_sets("a :- not b. b :- not a. :- a.") == [frozenset({"b"})]


def test_fact_with_contradicting_constraint_is_inconsistent():
    assert answer_sets("a. :- a.") == []
    assert answer_sets(":- .") == []


def test_positive_cycle_needs_external_support():
    assert answer_sets("a :- b. b :- a.") == [frozenset()]
    assert answer_sets("a | b. a :- b. b :- a.") == [frozenset({"a", "b"})]


def test_odd_negation_cycle_is_inconsistent():
    assert answer_sets("a :- not a.") == []


def test_unfounded_classical_models_rejected():
    # {c} and {a, b, c} are classical models but leave c unsupported;
    # {a, b} is founded because the reduct keeps "a." when c is false
    assert answer_sets("a :- b. b :- a. a :- not c.") == [frozenset({"a", "b"})]


def test_brute_answer_sets_guard():
    atoms = [Atom(i, f"a{i}") for i in range(21)]
    with pytest.raises(TooLargeError):
        brute_answer_sets(GroundProgram(atoms, []))


def test_projected_answer_set_count():
    p = parse_ground_program("a :- not b. b :- not a. c :- a.")
    assert brute_projected_count(p, {2}) == 2
    assert brute_projected_count(p, {0, 1, 2}) == 2
    assert brute_projected_count(p, set()) == 1


def test_projected_count_of_inconsistent_program_is_zero():
    p = parse_ground_program("a. :- a.")
    assert brute_projected_count(p, {0}) == 0


def test_count_models_golden():
    assert brute_count_models(parse_dimacs("p cnf 2 1\n1 -2 0\n")) == 3
    assert brute_count_models(parse_dimacs("p cnf 3 0\n")) == 8
    assert brute_count_models(parse_dimacs("p cnf 2 2\n1 0\n-1 0\n")) == 0
    assert brute_count_models(parse_dimacs("p cnf 1 1\n0\n")) == 0


def test_projected_model_count():
    f = parse_dimacs("p cnf 2 1\n1 -2 0\n")
    assert brute_projected_count(f, {2}) == 2
    assert brute_projected_count(f, {1}) == 2
    assert brute_projected_count(f, set()) == 1


def test_weighted_count_golden():
    text = "p cnf 2 1\n" + "".join(
        f"w {lit} 1/2 0\n" for lit in (1, -1, 2, -2)
    ) + "1 -2 0\n"
    assert brute_weighted_count(parse_dimacs(text)) == Fraction(3, 4)


def test_weighted_count_defaults_match_plain_count():
    f = parse_dimacs("p cnf 3 2\n1 2 0\n-2 3 0\n")
    assert brute_weighted_count(f) == brute_count_models(f)


def test_zero_weight_literal_removes_models():
    f = parse_dimacs("p cnf 2 1\nw 2 0 0\n1 -2 0\n")
    # models (1,0) (0,0) (1,1); the last is wiped by w(2)=0
    assert brute_weighted_count(f) == 2


def test_brute_models_guard():
    with pytest.raises(TooLargeError):
        brute_count_models(CnfFormula(21, []))


def test_brute_treewidth_guard():
    with pytest.raises(TooLargeError):
        brute_treewidth(Graph(12))
