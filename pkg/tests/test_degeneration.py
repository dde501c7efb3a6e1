from fractions import Fraction

import pytest

from painleve_backlund.degeneration import (
    ARROW_KEYS,
    UnsupportedArrow,
    arrow,
    arrows,
    degenerate_hamiltonian,
    degenerate_hamiltonian_exact,
    hamiltonian_gauge_terms,
    hamiltonian_limit,
    hamiltonian_limit_residual,
    is_flow_trivial,
    lift_generator,
    lift_word,
    limit_action,
    target_table_action,
    transformed_system_factor,
    verify_arrow_data,
    verify_eps_actions,
    verify_hamiltonian,
    verify_limits,
    verify_param_actions,
    verify_subgroup_relations,
)
from painleve_backlund.exprio import parse_expr as P
from painleve_backlund.ratfn import ratfn_equal
from painleve_backlund.series import (
    DivergesAtZero,
    EpsSeries,
    binomial_series,
    ratfn_eps_valuation,
    series_equal,
)
from painleve_backlund.symbols import A, P_, Q_, T_, eps

ALL = tuple(ARROW_KEYS)


def S(text, trunc):
    return EpsSeries.from_ratfn(P(text), trunc)


# ----------------------------------------------------------------------
# arrow data

def test_unsupported_arrows():
    with pytest.raises(UnsupportedArrow):
        arrow("VI", "IV")
    with pytest.raises(UnsupportedArrow) as err:
        arrow("II", "I")
    assert "converges to the identity as eps -> 0" in str(err.value)


def test_arrow_components():
    a = arrow("VI", "V")
    assert ratfn_equal(a.param_map[P("alpha0").symbols_used().pop()], P("1/eps"))
    b = arrow("IV", "II")
    q_sym = P("q").symbols_used().pop()
    assert ratfn_equal(b.var_forward[q_sym], P("(1 + 2*eps^2*Q)/(sqrt2*eps^3)"))
    c = arrow("V", "IV")
    assert c.subgroup_words["S0"] == ("s3", "s0", "s3")
    assert c.alt_words["S0"] == ("s0", "s3", "s0")


def test_arrow_structural_data():
    for J, K in ALL:
        results = verify_arrow_data(arrow(J, K))
        bad = [label for label, ok in results if not ok]
        assert not bad, (J, K, bad)


def test_subgroup_word_spellings_agree():
    from painleve_backlund.groups import apply_word, field_symbols
    from painleve_backlund.ratfn import RatFn

    for J, K in ALL:
        a = arrow(J, K)
        for name, alt in a.alt_words.items():
            word = a.subgroup_words[name]
            for s in field_symbols(J):
                assert ratfn_equal(
                    apply_word(J, word, RatFn.variable(s)),
                    apply_word(J, alt, RatFn.variable(s)),
                ), (a.name, name, s.name)


def test_III_to_II_stage_maps_are_each_symplectic():
    # the variable change composes two canonical maps:
    #   (q, p) from (x, y):  q = -tau/x, p = (x/tau)(alpha0 + x y)
    #   (x, y) from (Q, P):  x = 1 + 2 eps Q, y = P/(2 eps)
    from painleve_backlund.symbols import sym
    from painleve_backlund.systems import poisson_bracket

    x, y = sym("x"), sym("y")
    q_of = P("-tau/x")
    p_of = P("x*(alpha0 + x*y)/tau")
    assert ratfn_equal(poisson_bracket(p_of, q_of, p=y, q=x), P("1"))
    x_of = P("1 + 2*eps*Q")
    y_of = P("P/(2*eps)")
    assert ratfn_equal(poisson_bracket(y_of, x_of, p=P_, q=Q_), P("1"))


def test_truncation_orders():
    truncs = {(a.source, a.target): a.trunc for a in arrows()}
    assert truncs == {
        ("VI", "V"): 8, ("V", "IV"): 12, ("V", "III"): 8,
        ("IV", "II"): 12, ("III", "II"): 12,
    }
    assert arrow("VI", "V", order=10).trunc == 10


# ----------------------------------------------------------------------
# lifted parameter actions

def test_param_actions_match_target_tables():
    for J, K in ALL:
        results = verify_param_actions(arrow(J, K))
        bad = [label for label, ok in results if not ok]
        assert not bad, (J, K, bad)


def test_lifted_param_examples():
    a = arrow("VI", "V")
    g0 = lift_generator(a, "S0")
    assert ratfn_equal(g0.param_actions[A[0]], P("-A0"))
    assert ratfn_equal(g0.param_actions[A[1]], P("A1 + A0"))
    assert ratfn_equal(g0.param_actions[A[2]], P("A2"))
    assert ratfn_equal(g0.param_actions[A[3]], P("A3 + A0"))
    b = arrow("IV", "II")
    h0 = lift_generator(b, "S0")
    assert ratfn_equal(h0.param_actions[A[0]], P("-A0"))
    assert ratfn_equal(h0.param_actions[A[1]], P("A1 + 2*A0"))


def test_lifted_param_full_tables():
    # complete published lists, frozen per arrow and generator
    tables = {
        ("VI", "V"): {
            "S0": ("-A0", "A1+A0", "A2", "A3+A0"),
            "S1": ("A0+A1", "-A1", "A2+A1", "A3"),
            "S2": ("A0", "A1+A2", "-A2", "A3+A2"),
            "S3": ("A0+A3", "A1", "A2+A3", "-A3"),
        },
        ("V", "IV"): {
            "S0": ("-A0", "A1+A0", "A2+A0"),
            "S1": ("A0+A1", "-A1", "A2+A1"),
            "S2": ("A0+A2", "A1+A2", "-A2"),
        },
        ("V", "III"): {
            "S0": ("-A0", "A1+A0", "A2"),
            "S1": ("A0+2*A1", "-A1", "A2+2*A1"),
            "S2": ("A0", "A1+A2", "-A2"),
        },
        ("IV", "II"): {
            "S0": ("-A0", "A1+2*A0"),
            "S1": ("A0+2*A1", "-A1"),
        },
        ("III", "II"): {
            "S0": ("-A0", "A1+2*A0"),
            "S1": ("A0+2*A1", "-A1"),
        },
    }
    for (J, K), rows in tables.items():
        arr = arrow(J, K)
        for name, entries in rows.items():
            lifted = lift_generator(arr, name)
            for i, text in enumerate(entries):
                assert ratfn_equal(lifted.param_actions[A[i]], P(text)), (
                    J, K, name, A[i].name,
                )


def test_eps_actions_exact_for_birational_arrows():
    # eps is rational in the source parameters, so the lifted eps-action can
    # be computed exactly and must agree with the declared one.
    # The A0 in the S0 denominator is forced: with A2 there instead,
    # S0(S0(eps)) would be eps/(1 - 2*A2*eps) rather than eps.
    expected = {
        ("VI", "V"): {
            "S0": "eps/(1 - A0*eps)", "S1": "eps",
            "S2": "eps/(1 + A2*eps)", "S3": "eps",
        },
        ("V", "III"): {
            "S0": "eps/(1 + A0*eps)", "S1": "-eps", "S2": "eps/(1 + A2*eps)",
        },
    }
    for (J, K), table in expected.items():
        a = arrow(J, K)
        for name, text in table.items():
            derived = lift_word(a, a.subgroup_words[name])
            assert series_equal(derived.eps_series, S(text, a.trunc)), (J, K, name)
            assert series_equal(a.eps_action[name], S(text, a.trunc)), (J, K, name)


def test_eps_branch_consistency_all_arrows():
    for J, K in ALL:
        results = verify_eps_actions(arrow(J, K))
        bad = [label for label, ok in results if not ok]
        assert not bad, (J, K, bad)


def test_declared_branches_match_binomial_construction():
    a = arrow("V", "IV")
    built = binomial_series(S("2*A0*eps^2", a.trunc), Fraction(-1, 2)).shift(1)
    assert series_equal(a.eps_action["S0"], built)
    b = arrow("IV", "II")
    built = binomial_series(S("-4*A0*eps^6", b.trunc), Fraction(-1, 6)).shift(1)
    assert series_equal(b.eps_action["S0"], built)
    c = arrow("III", "II")
    assert series_equal(c.eps_action["S0"], S("-eps", c.trunc))
    built = binomial_series(S("4*A1*eps^3", c.trunc), Fraction(-1, 3)).shift(1)
    assert series_equal(c.eps_action["S1"], built)


def test_square_of_branch_recovers_exact_action():
    # oracle by hand: S0(eps)^2 must be eps^2/(1 + 2*A0*eps^2) on V -> IV
    a = arrow("V", "IV")
    sq = a.eps_action["S0"] ** 2
    assert series_equal(sq, S("eps^2/(1 + 2*A0*eps^2)", a.trunc))


# ----------------------------------------------------------------------
# exact lifted variable actions (birational arrows)

def test_exact_var_actions_VI_to_V():
    # The S0 row is pinned by three independent facts checked here and
    # below: it satisfies the defining conjugation equation, preserves the
    # (Q, P) bracket, and squares to the identity.  Both (Q-1) factors are
    # essential; with Q*(Q-1)*P resp. A0 + Q*P in their place all three
    # checks fail.
    a = arrow("VI", "V")
    expected = {
        "S0": {
            T_: "T*(1 - A0*eps)",
            Q_: "Q + A0*(1 - T*(Q-1)*eps)/(P + T - T*(Q-1)*P*eps)",
            P_: "P*(1 + A0*T*eps/(P + T - T*(A0 + (Q-1)*P)*eps))",
        },
        "S1": {T_: "T", Q_: "Q", P_: "P - A1/Q"},
        "S2": {T_: "T*(1 + A2*eps)", Q_: "Q + A2/P", P_: "P"},
        "S3": {T_: "T", Q_: "Q", P_: "P - A3/(Q-1)"},
    }
    for name, table in expected.items():
        lifted = lift_generator(a, name)
        for X, text in table.items():
            assert ratfn_equal(lifted.exact_var[X], P(text)), (name, X.name)


def test_VI_to_V_S0_row_satisfies_defining_equation():
    from painleve_backlund.factored import substitute_reduced
    from painleve_backlund.groups import _word_on_symbol
    from painleve_backlund.symbols import p_

    a = arrow("VI", "V")
    g = lift_generator(a, "S0")
    images = {Q_: g.exact_var[Q_], T_: g.exact_var[T_], P_: g.exact_var[P_],
              eps: P("eps/(1 - A0*eps)")}
    images.update(g.param_actions)
    lhs = substitute_reduced(a.var_forward[p_], images)
    rhs = a.pushforward(_word_on_symbol("VI", a.subgroup_words["S0"], p_))
    assert ratfn_equal(lhs, rhs)


def test_lifted_actions_stay_symplectic_VI_to_V():
    from painleve_backlund.systems import poisson_bracket

    a = arrow("VI", "V")
    for name in a.subgroup_words:
        lifted = lift_generator(a, name)
        bracket = poisson_bracket(
            lifted.exact_var[P_], lifted.exact_var[Q_], p=P_, q=Q_
        )
        assert ratfn_equal(bracket, P("1")), name


def test_exact_var_actions_V_to_III():
    a = arrow("V", "III")
    expected = {
        "S0": {T_: "T*(1 + A0*eps)", Q_: "Q + A0/P", P_: "P"},
        "S1": {T_: "-T", Q_: "Q"},
        "S2": {T_: "T*(1 + A2*eps)", Q_: "Q + A2/(P-1)", P_: "P"},
    }
    for name, table in expected.items():
        lifted = lift_generator(a, name)
        for X, text in table.items():
            assert ratfn_equal(lifted.exact_var[X], P(text)), (name, X.name)


def test_V_to_III_S1_P_remainder_has_positive_valuation():
    a = arrow("V", "III")
    lifted = lift_generator(a, "S1")
    remainder = lifted.exact_var[P_] - P("P - 2*A1/Q + T/Q^2")
    assert ratfn_eps_valuation(remainder) >= 1


def test_series_pipeline_matches_branch_algebra_V_to_IV():
    # S0(T) = (T - A0 eps) (1 + 2 A0 eps^2)^(-1/2) and its S2 mirror.
    a = arrow("V", "IV")
    unit_plus = binomial_series(S("2*A0*eps^2", a.trunc), Fraction(-1, 2))
    s0_T = lift_generator(a, "S0").action_series(T_, 8)
    assert series_equal(s0_T, (S("T - A0*eps", 8) * unit_plus.truncate(8)))
    unit_minus = binomial_series(S("-2*A2*eps^2", a.trunc), Fraction(-1, 2))
    s2_T = lift_generator(a, "S2").action_series(T_, 8)
    assert series_equal(s2_T, (S("T + A2*eps", 8) * unit_minus.truncate(8)))
    # S1 fixes eps, so its Q and P actions are exact
    assert series_equal(lift_generator(a, "S1").action_series(Q_, 6), S("Q", 6))
    assert series_equal(
        lift_generator(a, "S1").action_series(P_, 6), S("P - A1/Q", 6)
    )
    # S2 multiplies eps by the branch unit, so S2(eps) S2(Q) = eps (Q + A2/P)
    # exactly and the Q and P actions each carry one branch factor; both
    # converge to the table entries Q + A2/P and P.
    s2 = lift_generator(a, "S2")
    assert series_equal(
        s2.action_series(Q_, 6),
        S("Q + A2/P", 8) * binomial_series(S("-2*A2*eps^2", 8), Fraction(1, 2)).truncate(6),
    )
    assert series_equal(
        s2.action_series(P_, 6),
        S("P", 8) * unit_minus.truncate(6),
    )
    assert ratfn_equal(s2.action_limit(Q_), P("Q + A2/P"))
    assert ratfn_equal(s2.action_limit(P_), P("P"))


# ----------------------------------------------------------------------
# convergence: eps -> 0 limits

def test_all_limits_match_target_tables():
    for J, K in ALL:
        results = verify_limits(arrow(J, K))
        bad = [label for label, ok in results if not ok]
        assert not bad, (J, K, bad)


def test_limit_examples_frozen():
    a = arrow("V", "IV")
    assert ratfn_equal(limit_action(a, "S0", Q_), P("Q + 2*A0/(2*P - Q - 2*T)"))
    assert ratfn_equal(limit_action(a, "S0", P_), P("P + A0/(2*P - Q - 2*T)"))
    b = arrow("IV", "II")
    assert ratfn_equal(
        limit_action(b, "S0", P_),
        P("P + 4*A0*Q/(P - 2*Q^2 - T) + 2*A0^2/(P - 2*Q^2 - T)^2"),
    )
    assert ratfn_equal(limit_action(b, "S0", T_), P("T"))
    c = arrow("III", "II")
    assert ratfn_equal(limit_action(c, "S1", Q_), P("Q + A1/P"))
    assert ratfn_equal(
        limit_action(c, "S0", Q_), P("Q + A0/(P - 2*Q^2 - T)")
    )
    d = arrow("VI", "V")
    assert ratfn_equal(limit_action(d, "S0", Q_), P("Q + A0/(P + T)"))


def test_target_table_action_relabeling():
    a = arrow("VI", "V")
    assert ratfn_equal(target_table_action(a, "S0", Q_), P("Q + A0/(P + T)"))
    assert ratfn_equal(target_table_action(a, "S0", A[0]), P("-A0"))


def test_negative_control_raw_s3_diverges():
    a = arrow("VI", "V")
    raw = lift_word(a, ("s3",))
    assert ratfn_equal(raw.param_actions[A[0]], P("A2 + 1/eps"))
    with pytest.raises(DivergesAtZero) as err:
        raw.action_limit(A[0])
    assert err.value.order == -1


def test_lift_word_needs_branch_on_non_birational_arrows():
    a = arrow("V", "IV")
    with pytest.raises(ValueError):
        lift_word(a, ("s3",))


# ----------------------------------------------------------------------
# Hamiltonians

def test_hamiltonian_checks_all_arrows():
    for J, K in ALL:
        results = verify_hamiltonian(arrow(J, K))
        bad = [label for label, ok in results if not ok]
        assert not bad, (J, K, bad)


def test_hamiltonian_limit_residuals():
    # VI -> V leaves a parameter constant; the other arrows none at all
    res = hamiltonian_limit_residual(arrow("VI", "V"))
    assert ratfn_equal(res, P("-A2*(A1 + A2 + A3)"))
    for J, K in ALL[1:]:
        assert hamiltonian_limit_residual(arrow(J, K)).is_zero(), (J, K)


def test_hamiltonian_gauge_terms():
    gauge = hamiltonian_gauge_terms(arrow("IV", "II"))
    assert set(gauge) == {-2}
    assert ratfn_equal(gauge[-2], P("-A1/2"))
    assert is_flow_trivial(gauge[-2])
    assert hamiltonian_gauge_terms(arrow("VI", "V")) == {}


def test_V_to_III_shift_identity():
    a = arrow("V", "III")
    from painleve_backlund.systems import system

    lhs = degenerate_hamiltonian_exact(a)
    rhs = a.pushforward(system("V").hamiltonian) + P("Q*P")
    assert ratfn_equal(lhs, rhs)


def test_degenerate_hamiltonian_series_has_arrow_truncation():
    a = arrow("V", "III")
    series = degenerate_hamiltonian(a)
    assert series.trunc == a.trunc
    assert ratfn_equal(series.coeff(0), hamiltonian_limit(a))


# ----------------------------------------------------------------------
# subgroup relations and transform factors

def test_subgroup_relations_all_arrows():
    for J, K in ALL:
        for rel_label, ok_a, ok_b in verify_subgroup_relations(arrow(J, K)):
            assert ok_a, (J, K, rel_label, "source-field check")
            assert ok_b, (J, K, rel_label, "lifted parameter check")


def test_transformed_system_factor():
    vi_v = arrow("VI", "V")
    for name in vi_v.subgroup_words:
        assert series_equal(
            transformed_system_factor(vi_v, name),
            EpsSeries.const(1, vi_v.trunc),
        )
    v_iv = arrow("V", "IV")
    s1 = transformed_system_factor(v_iv, "S1")
    assert series_equal(s1, EpsSeries.const(1, s1.trunc))
    s0 = transformed_system_factor(v_iv, "S0")
    expected = binomial_series(S("2*A0*eps^2", s0.trunc), Fraction(-1, 2))
    assert series_equal(s0, expected.truncate(min(s0.trunc, expected.trunc)))
    assert ratfn_equal(s0.coeff(0), P("1"))
    assert ratfn_equal(s0.coeff(2), P("-A0"))


def test_transformed_system_factor_remaining_arrows():
    # every correction factor is 1 + O(eps): the transformed system keeps the
    # target Hamiltonian form in the limit
    for J, K in (("IV", "II"), ("III", "II")):
        a = arrow(J, K)
        for name in a.subgroup_words:
            factor = transformed_system_factor(a, name)
            assert ratfn_equal(factor.coeff(0), P("1")), (J, K, name)
            assert all(n >= 0 for n in factor.coeffs), (J, K, name)
    # hand checks: with r = sqrt2/eps the factor is (1 -+ 4 A eps^6)^(1/6),
    # whose leading correction is -+(2/3) A eps^6
    iv_ii = arrow("IV", "II")
    s0 = transformed_system_factor(iv_ii, "S0")
    assert ratfn_equal(s0.coeff(6), P("-2/3*A0"))
    s1 = transformed_system_factor(iv_ii, "S1")
    assert ratfn_equal(s1.coeff(6), P("2/3*A1"))
    # S0 of III -> II fixes both eps^2 and T, so its factor is exactly 1
    s0_iii = transformed_system_factor(arrow("III", "II"), "S0")
    assert series_equal(s0_iii, EpsSeries.const(1, s0_iii.trunc))
