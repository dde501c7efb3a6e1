import math

import pytest

from painleve_backlund.degeneration import arrow
from painleve_backlund.exprio import parse_expr as P
from painleve_backlund.groups import generator
from painleve_backlund.numeric import (
    NearPole,
    backlund_numeric_check,
    degeneration_numeric_check,
    eval_ratfn,
    integrate,
)
from painleve_backlund.symbols import alpha, p_, q_, t_
from painleve_backlund.systems import hamiltonian, poisson_bracket


def test_eval_examples():
    H1 = hamiltonian("I")
    assert eval_ratfn(H1, {q_: 0.0, p_: 0.0, t_: 0.0}) == 0.0
    H2 = hamiltonian("II")
    value = eval_ratfn(H2, {q_: 1.0, p_: 1.0, t_: 0.0, alpha[1]: 0.0})
    assert abs(value - (-0.5)) < 1e-15
    bracket = poisson_bracket(P("p"), P("q"))
    assert eval_ratfn(bracket, {q_: 3.7, p_: -1.2, t_: 9.9}) == 1.0


def test_eval_near_pole():
    with pytest.raises(NearPole):
        eval_ratfn(P("1/q"), {q_: 1e-13})


def test_eval_sqrt2_is_numeric():
    assert abs(eval_ratfn(P("sqrt2"), {}) - math.sqrt(2.0)) < 1e-15


def test_one_rk4_step_of_first_system():
    # oracle by hand from dq/dt = p, dp/dt = 6q^2 + t starting at (0, 0, 0):
    # k1 = (0,0), k2 = (0, h/2), k3 = (h^2/4, h/2), k4 = (h^2/2, h + 6h^6/16)
    # giving q1 = h^3/6 and p1 = h^2/2 + h^7/16
    h = 0.1
    traj = integrate("I", [], (0.0, 0.0, 0.0), h, h)
    assert len(traj.samples) == 2
    _, q1, p1 = traj.samples[-1]
    assert abs(q1 - h**3 / 6) < 1e-18
    assert abs(p1 - (h**2 / 2 + h**7 / 16)) < 1e-18


def test_stationary_point_is_exact_for_fourth_system():
    # with alpha1 = alpha2 = 0 the field of P_IV vanishes identically at
    # q = p = 0, for every t, so RK4 stays put to the bit
    traj = integrate("IV", [1.0, 0.0, 0.0], (0.3, 0.0, 0.0), 1.3, 1e-2)
    assert all(q == 0.0 and p == 0.0 for _, q, p in traj.samples)


def test_near_stationary_start_for_second_system():
    # the field vanishes at t0 = 0, q = p = 0 when alpha1 = 0, but RK4
    # stages sample t = h/2 where it does not; drift stays O(h^2)
    h = 1e-3
    traj = integrate("II", [1.0, 0.0], (0.0, 0.0, 0.0), h, h)
    _, q1, p1 = traj.samples[-1]
    assert abs(q1) <= h**2 and abs(p1) <= h**2


def test_trajectory_spacing_and_csv(tmp_path):
    traj = integrate("II", [2 / 3, 1 / 3], (0.0, 1.0, 1.0), 0.01, 1e-3)
    ts = [t for t, _, _ in traj.samples]
    hs = [b - a for a, b in zip(ts, ts[1:])]
    assert all(abs(h - 1e-3) < 1e-12 for h in hs)
    path = tmp_path / "traj.csv"
    traj.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,q,p"
    assert len(lines) == len(traj.samples) + 1
    t0, q0, p0 = (float(x) for x in lines[1].split(","))
    assert (t0, q0, p0) == traj.samples[0]


def test_sixth_system_against_adaptive_oracle():
    # independent adaptive RKF45 oracle, written from the Fehlberg tableau
    params = (0.3, 0.2, 0.15, 0.1, 0.1)
    traj = integrate("VI", params, (2.0, 0.5, 0.3), 2.5, 1e-3)
    assert traj.complete

    H = hamiltonian("VI")
    dq_expr = H.partial(p_)
    dp_expr = -H.partial(q_)
    w_expr = P("t*(t-1)")
    assign = dict(zip(alpha, params))

    def field(t, y):
        point = {**assign, t_: t, q_: y[0], p_: y[1]}
        w = w_expr.num.eval_float(point) / w_expr.den.eval_float(point)
        return (
            eval_ratfn(dq_expr, point) / w,
            eval_ratfn(dp_expr, point) / w,
        )

    # Fehlberg 4(5) coefficients
    A_ = (
        (),
        (1 / 4,),
        (3 / 32, 9 / 32),
        (1932 / 2197, -7200 / 2197, 7296 / 2197),
        (439 / 216, -8, 3680 / 513, -845 / 4104),
        (-8 / 27, 2, -3544 / 2565, 1859 / 4104, -11 / 40),
    )
    C = (0, 1 / 4, 3 / 8, 12 / 13, 1, 1 / 2)
    B5 = (16 / 135, 0, 6656 / 12825, 28561 / 56430, -9 / 50, 2 / 55)
    B4 = (25 / 216, 0, 1408 / 2565, 2197 / 4104, -1 / 5, 0)

    def rkf45(t, y, t_end, tol=1e-10):
        h = 1e-3
        while t < t_end:
            h = min(h, t_end - t)
            ks = []
            for i in range(6):
                yi = list(y)
                for j, a in enumerate(A_[i]):
                    yi[0] += h * a * ks[j][0]
                    yi[1] += h * a * ks[j][1]
                ks.append(field(t + C[i] * h, yi))
            y5 = [y[d] + h * sum(b * ks[i][d] for i, b in enumerate(B5)) for d in (0, 1)]
            y4 = [y[d] + h * sum(b * ks[i][d] for i, b in enumerate(B4)) for d in (0, 1)]
            err = max(abs(y5[0] - y4[0]), abs(y5[1] - y4[1]))
            if err <= tol or h < 1e-6:
                t += h
                y = y5
            h *= 0.9 * (tol / err) ** 0.2 if err > 0 else 2.0
        return y

    q_end, p_end = rkf45(2.0, [0.5, 0.3], 2.5)
    _, q_fixed, p_fixed = traj.samples[-1]
    assert abs(q_end - q_fixed) < 1e-6
    assert abs(p_end - p_fixed) < 1e-6


def test_backlund_check_second_system():
    g = generator("II", "s1")
    dev = backlund_numeric_check("II", g, [2 / 3, 1 / 3], (0.0, 1.0, 1.0), 1.0, 1e-3)
    assert dev < 1e-6


def test_backlund_check_fifth_system():
    g = generator("V", "s2")
    dev = backlund_numeric_check(
        "V", g, [0.4, 0.3, 0.2, 0.1], (1.0, 0.5, 0.3), 2.0, 1e-3
    )
    assert dev < 1e-6


def test_backlund_check_identity_like_generator():
    # s1 of W_VI fixes q, p and t: mapped and re-integrated flows coincide
    g = generator("VI", "s1")
    dev = backlund_numeric_check(
        "VI", g, (0.3, 0.2, 0.15, 0.1, 0.1), (2.0, 0.5, 0.3), 2.2, 1e-3
    )
    assert dev < 1e-12


def test_rk4_order_scaling():
    g = generator("II", "s1")
    devs = [
        backlund_numeric_check("II", g, [2 / 3, 1 / 3], (0.0, 1.0, 1.0), 1.0, h)
        for h in (2e-3, 1e-3)
    ]
    ratio = devs[0] / devs[1]
    assert 8 <= ratio <= 32


def test_degeneration_check_at_zero_eps_coincides():
    a = arrow("V", "III")
    dev = degeneration_numeric_check(
        a, 0.0, [0.3, 0.2, 0.3], (1.0, 0.5, 0.3), 1.5, 1e-3
    )
    assert dev < 1e-12


def test_degeneration_deviation_shrinks_with_eps():
    a = arrow("VI", "V")
    dev2 = degeneration_numeric_check(
        a, 1e-2, [0.4, 0.3, 0.2, 0.1], (1.0, 0.5, 0.3), 1.5, 1e-3
    )
    dev3 = degeneration_numeric_check(
        a, 1e-3, [0.4, 0.3, 0.2, 0.1], (1.0, 0.5, 0.3), 1.5, 1e-3
    )
    assert dev3 < dev2
    assert dev3 < 10 * 1e-3


def test_energy_rate_matches_time_partial_along_fourth_system():
    # along a trajectory dH/dt = dH/dt|_explicit, since {H, H} = 0; centered
    # differences of H along RK4 samples must match the exact t-partial
    params = (0.4, 0.3, 0.3)
    h = 1e-3
    traj = integrate("IV", params, (0.0, 0.5, 0.4), 1.0, h)
    H = hamiltonian("IV")
    Ht = H.partial(t_)
    assign = dict(zip(alpha, params))
    values = [
        eval_ratfn(H, {**assign, t_: t, q_: q, p_: p}) for t, q, p in traj.samples
    ]
    worst = 0.0
    for i in range(1, len(values) - 1):
        t, q, p = traj.samples[i]
        rate = (values[i + 1] - values[i - 1]) / (2 * h)
        exact = eval_ratfn(Ht, {**assign, t_: t, q_: q, p_: p})
        worst = max(worst, abs(rate - exact))
    assert worst < 5e-5  # centered-difference O(h^2) floor for this window
