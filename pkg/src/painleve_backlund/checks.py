"""Catalog of verification checks, addressable by string id.

Check ids make the work distributable: the CLI builds an id list, a worker
pool maps run_check over it (ids and result dicts are picklable), and the
report assembles the records in catalog order.  Ids look like

    groups/VI/relation/(s0 s2)^3
    groups/II/gen/s0/symplectic
    degen/VI-V/limit/S0/Q
    degen/IV-II/ham/limit

Every failure record carries a printable witness.
"""

from __future__ import annotations

from . import degeneration as dg
from . import groups as gr
from .exprio import print_expr, print_series
from .ratfn import RatFn, ratfn_equal
from .series import DivergesAtZero
from .symbols import A, P_, Q_, T_, p_, q_
from .systems import system

GROUPS = ("VI", "V", "IV", "III", "II")


def group_check_ids(label: str) -> list[str]:
    ids = [f"groups/{label}/relation/{rel}" for rel, _ in gr.fundamental_relations(label)]
    for g in gr.generators(label):
        ids += [
            f"groups/{label}/gen/{g.name}/symplectic",
            f"groups/{label}/gen/{g.name}/constraint",
            f"groups/{label}/gen/{g.name}/commutes",
        ]
    return ids


def arrow_check_ids(arr: dg.DegenerationArrow, what: str = "all") -> list[str]:
    key = f"{arr.source}-{arr.target}"
    ids: list[str] = []
    if what in ("all", "params"):
        ids += [f"degen/{key}/data/{i}" for i, _ in enumerate(dg.verify_arrow_data(arr))]
        n = len(system(arr.target).params)
        for name in arr.subgroup_words:
            ids += [f"degen/{key}/param/{name}/{A[i].name}" for i in range(n)]
            ids.append(f"degen/{key}/eps/{name}")
    if what in ("all", "limits"):
        for name in arr.subgroup_words:
            ids += [f"degen/{key}/limit/{name}/{X.name}" for X in (T_, Q_, P_)]
    if what in ("all", "hamiltonian"):
        ids += [f"degen/{key}/ham/gauge", f"degen/{key}/ham/limit"]
        if not arr.ham_shift.is_zero():
            ids.append(f"degen/{key}/ham/shift-identity")
    if what in ("all", "relations"):
        for rel, _ in gr.fundamental_relations(arr.target):
            ids += [f"degen/{key}/relation/{rel}/a", f"degen/{key}/relation/{rel}/b"]
    if what == "all":
        ids += [f"degen/{key}/factor/{name}" for name in arr.subgroup_words]
    return ids


# ----------------------------------------------------------------------
# runner

def run_check(check_id: str) -> dict:
    """Execute one catalog check; returns a record dict for the report."""
    parts = check_id.split("/")
    try:
        if parts[0] == "groups":
            return _run_group_check(check_id, parts)
        if parts[0] == "degen":
            return _run_degen_check(check_id, parts)
    except Exception as exc:  # surface, never crash the pool
        return _record(check_id, "error", parts[1], "fail", detail=str(exc))
    return _record(check_id, "unknown", "", "fail", detail="unknown check id")


def _record(check_id, kind, subject, outcome, detail="", witness=None) -> dict:
    if outcome == "fail" and witness is None:
        witness = detail or subject or check_id
    return {
        "id": check_id,
        "kind": kind,
        "subject": subject,
        "source": _source_of(check_id),
        "outcome": outcome,
        "detail": detail,
        "witness": witness,
    }


def _source_of(check_id: str) -> str:
    parts = check_id.split("/")
    if parts[0] == "groups":
        return f"generator table W_{parts[1]} ({gr.weyl_type(parts[1])})"
    if parts[0] == "degen":
        return f"degeneration data {parts[1].replace('-', ' -> ')}"
    return "internal"


def _run_group_check(check_id: str, parts: list[str]) -> dict:
    label = parts[1]
    if parts[2] == "relation":
        rel = parts[3]
        words = dict(gr.fundamental_relations(label))
        word = words[rel]
        ok = gr.verify_relation(label, word)
        witness = None
        if not ok:
            for s in gr.field_symbols(label):
                image = gr.apply_word(label, word, RatFn.variable(s))
                if not ratfn_equal(image, RatFn.variable(s)):
                    witness = f"{rel}({s.name}) = {print_expr(image)}"
                    break
        return _record(
            check_id, "relation", f"W_{label}: {rel} = 1",
            "pass" if ok else "fail",
            detail=f"identity on {len(gr.field_symbols(label))} field generators",
            witness=witness,
        )
    gen = gr.generator(label, parts[3])
    kind = parts[4]
    if kind == "symplectic":
        bracket = gr.poisson_bracket(gen.acts_on(p_), gen.acts_on(q_))
        ok = ratfn_equal(bracket, RatFn.const(1))
        return _record(
            check_id, "symplectic", f"W_{label} {gen.name}",
            "pass" if ok else "fail",
            detail="{g(p), g(q)} = 1",
            witness=None if ok else print_expr(bracket),
        )
    if kind == "constraint":
        expr = system(label).constraint_expr()
        image = gen(expr)
        ok = ratfn_equal(image, expr)
        return _record(
            check_id, "constraint", f"W_{label} {gen.name}",
            "pass" if ok else "fail",
            detail="parameter sum preserved",
            witness=None if ok else print_expr(image),
        )
    if kind == "commutes":
        from .systems import derivation_apply, equal_mod_constraint

        for s in gr.field_symbols(label):
            lhs = derivation_apply(label, gen.acts_on(s))
            rhs = gen(derivation_apply(label, RatFn.variable(s)))
            if not equal_mod_constraint(label, lhs, rhs):
                return _record(
                    check_id, "commutation", f"W_{label} {gen.name}", "fail",
                    detail=f"delta(g({s.name})) != g(delta({s.name}))",
                    witness=f"lhs = {print_expr(lhs)}; rhs = {print_expr(rhs)}",
                )
        return _record(
            check_id, "commutation", f"W_{label} {gen.name}", "pass",
            detail="delta o g = g o delta on all field generators",
        )
    raise ValueError(f"bad group check {check_id}")


def _arrow_of(key: str) -> dg.DegenerationArrow:
    src, tgt = key.split("-")
    return dg.arrow(src, tgt)


def _run_degen_check(check_id: str, parts: list[str]) -> dict:
    arr = _arrow_of(parts[1])
    kind = parts[2]
    if kind == "data":
        results = dg.verify_arrow_data(arr)
        label, ok = results[int(parts[3])]
        return _record(
            check_id, "arrow-data", f"{arr.name}: {label}",
            "pass" if ok else "fail", detail=label,
        )
    if kind == "param":
        name, a_name = parts[3], parts[4]
        Ai = next(s for s in A if s.name == a_name)
        got = dg.lift_generator(arr, name).param_actions[Ai]
        expected = dg.target_table_action(arr, name, Ai)
        ok = ratfn_equal(got, expected)
        return _record(
            check_id, "lifted-param", f"{arr.name} {name}({a_name})",
            "pass" if ok else "fail",
            detail=f"= {print_expr(got)}",
            witness=None if ok else f"expected {print_expr(expected)}",
        )
    if kind == "eps":
        name = parts[3]
        results = dict(
            (label, ok) for label, ok in dg.verify_eps_actions(arr)
            if label.startswith(f"{name}(")
        )
        ok = all(results.values())
        branch = arr.eps_action[name]
        shown = print_series(branch.truncate(min(arr.eps_power + 1, branch.trunc)))
        return _record(
            check_id, "eps-branch", f"{arr.name} {name}(eps)",
            "pass" if ok else "fail",
            detail=f"chosen branch {shown}; verified: " + "; ".join(results),
            witness=None if ok else print_series(branch),
        )
    if kind == "limit":
        name, x_name = parts[3], parts[4]
        X = {"T": T_, "Q": Q_, "P": P_}[x_name]
        expected = dg.target_table_action(arr, name, X)
        try:
            got = dg.limit_action(arr, name, X)
        except DivergesAtZero as exc:
            return _record(
                check_id, "limit", f"{arr.name} {name}({x_name})", "fail",
                detail="diverges", witness=str(exc),
            )
        ok = ratfn_equal(got, expected)
        return _record(
            check_id, "limit", f"{arr.name} {name}({x_name})",
            "pass" if ok else "fail",
            detail=f"-> {print_expr(got)} ; table entry {print_expr(expected)}",
            witness=None if ok else f"limit differs from {print_expr(expected)}",
        )
    if kind == "ham":
        return _run_ham_check(check_id, arr, parts[3])
    if kind == "relation":
        rel, side = parts[3], parts[4]
        results = {r[0]: r for r in dg.verify_subgroup_relations(arr)}
        label, ok_a, ok_b = results[rel]
        ok = ok_a if side == "a" else ok_b
        detail = (
            "exact identity in the source field" if side == "a"
            else "identity on lifted (A, eps) actions"
        )
        return _record(
            check_id, "subgroup-relation", f"{arr.name} {rel} ({side})",
            "pass" if ok else "fail", detail=detail,
        )
    if kind == "factor":
        name = parts[3]
        factor = dg.transformed_system_factor(arr, name)
        ok = ratfn_equal(factor.coeff(0), RatFn.const(1)) and all(
            n >= 0 for n in factor.coeffs
        )
        return _record(
            check_id, "transform-factor", f"{arr.name} {name}",
            "pass" if ok else "fail",
            detail=f"= {print_series(factor.truncate(min(4, factor.trunc)))}",
            witness=None if ok else print_series(factor),
        )
    raise ValueError(f"bad degeneration check {check_id}")


def _run_ham_check(check_id: str, arr: dg.DegenerationArrow, which: str) -> dict:
    if which == "gauge":
        gauge = dg.hamiltonian_gauge_terms(arr)
        ok = all(dg.is_flow_trivial(c) for c in gauge.values())
        orders = ", ".join(
            f"eps^{n}: {print_expr(c)}" for n, c in sorted(gauge.items())
        )
        return _record(
            check_id, "hamiltonian", f"{arr.name} gauge terms",
            "pass" if ok else "fail",
            detail=orders or "none",
        )
    if which == "limit":
        try:
            residual = dg.hamiltonian_limit_residual(arr)
        except DivergesAtZero as exc:
            return _record(
                check_id, "hamiltonian", f"{arr.name} limit", "fail",
                detail="diverges", witness=str(exc),
            )
        ok = dg.is_flow_trivial(residual)
        return _record(
            check_id, "hamiltonian", f"{arr.name} limit",
            "pass" if ok else "fail",
            detail="order-0 coefficient generates the target flow"
            + ("" if residual.is_zero() else
               f"; flow-trivial residual {print_expr(residual)}"),
            witness=None if ok else print_expr(residual),
        )
    if which == "shift-identity":
        results = dict(
            (label, ok) for label, ok in dg.verify_hamiltonian(arr)
        )
        ok = results.get("H_V + Q*P identity", False)
        return _record(
            check_id, "hamiltonian", f"{arr.name} additive shift",
            "pass" if ok else "fail",
            detail="exact identity before expansion",
        )
    raise ValueError(f"bad hamiltonian check {check_id}")
