from pathlib import Path

import pytest

from painleve_backlund.exprio import (
    ExprSyntaxError,
    UnknownSymbol,
    load_fixtures,
    parse_expr,
    print_expr,
    print_series,
)
from painleve_backlund.ratfn import ratfn_equal
from painleve_backlund.series import EpsSeries

from conftest import rand_ratfn, rng_for


def test_parse_generator_entry():
    f = parse_expr("p - alpha0/(q - t)")
    direct = parse_expr("p") - parse_expr("alpha0") / (parse_expr("q") - parse_expr("t"))
    assert ratfn_equal(f, direct)


def test_parse_zero():
    assert parse_expr("0").is_zero()


def test_parse_polynomial_hamiltonian():
    f = parse_expr("(1/2)*p^2 - (q^2 + t/2)*p - alpha1*q")
    assert f.den.is_one()
    expanded = parse_expr("1/2*p^2 - q^2*p - 1/2*t*p - alpha1*q")
    assert ratfn_equal(f, expanded)


def test_power_binds_tighter_than_mul_and_div():
    assert ratfn_equal(parse_expr("1/q^2"), parse_expr("1/(q*q)"))
    assert ratfn_equal(parse_expr("2*q^2"), parse_expr("2*(q^2)"))


def test_unary_minus_and_rationals():
    assert ratfn_equal(parse_expr("-q + 1/2"), parse_expr("1/2 - q"))
    assert ratfn_equal(parse_expr("3/4/5"), parse_expr("3/20"))


def test_negative_exponent():
    assert ratfn_equal(parse_expr("q^-2"), parse_expr("1/q^2"))


def test_syntax_error_carries_position():
    with pytest.raises(ExprSyntaxError) as err:
        parse_expr("q + ")
    assert err.value.pos == 4
    with pytest.raises(ExprSyntaxError):
        parse_expr("q q")


def test_unknown_symbol():
    with pytest.raises(UnknownSymbol):
        parse_expr("q + zeta")


def test_print_zero_and_simple_fraction():
    assert print_expr(parse_expr("0")) == "0"
    assert print_expr(parse_expr("2/q")) == "2/q"


def test_print_is_deterministic_on_equal_values():
    a = parse_expr("q + t + q") - parse_expr("q")
    b = parse_expr("t + q")
    assert print_expr(a) == print_expr(b)


def test_round_trip_hamiltonian():
    H4 = parse_expr("q*p*(2*p-q-2*t) - 2*alpha1*p - alpha2*q")
    assert ratfn_equal(parse_expr(print_expr(H4)), H4)


def test_round_trip_fuzz(seed):
    rng = rng_for(seed, "exprio-roundtrip")
    from painleve_backlund.symbols import p_, q_, t_

    for _ in range(150):
        f = rand_ratfn(rng, (q_, p_, t_))
        assert ratfn_equal(parse_expr(print_expr(f)), f)


def test_print_series_format():
    s = EpsSeries.from_ratfn(parse_expr("T/eps + 1"), 1)
    text = print_series(s)
    assert text == "(-1, T) + (0, 1) + O(eps^2)"


def test_fixture_loading(tmp_path: Path):
    path = tmp_path / "exprs.txt"
    path.write_text(
        "# fixture sample\n"
        "q + alpha2/p   # inline comment\n"
        "\n"
        "(1/2)*p^2 - (q^2 + t/2)*p - alpha1*q\n"
    )
    fixtures = load_fixtures(path)
    assert len(fixtures) == 2
    assert ratfn_equal(fixtures[0], parse_expr("q + alpha2/p"))


def test_shipped_fixture_matches_the_systems():
    from pathlib import Path

    from painleve_backlund.systems import LABELS, hamiltonian

    path = Path(__file__).parent / "fixtures" / "hamiltonians.txt"
    fixtures = load_fixtures(path)
    assert len(fixtures) == 6
    for label, fixture in zip(LABELS, fixtures):
        assert ratfn_equal(fixture, hamiltonian(label)), label
