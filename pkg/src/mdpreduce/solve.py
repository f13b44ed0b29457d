"""Solvers for discounted MDPs with stochastic transitions.

Three routes to the same fixed point: value iteration (contraction
mapping), Howard policy iteration (all-state greedy improvement, the
block-pivoting simplex on the occupation-measure LP), and simple policy
iteration with Dantzig's rule (one most-negative-reduced-cost switch per
round).  The LP itself is emitted as text for external verification; the
policy-iteration algorithms *are* its simplex methods, so no general LP
solver is embedded.

Tie-breaking is deterministic everywhere: prefer the incumbent action,
then the lowest index.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import _linalg
from .errors import NotConvergedWithinBudget
from .hv import DiscountedMdp
from .model import StationaryPolicy, policy_matrices

#: Strict-improvement threshold for policy iteration; avoids cycling under
#: floating-point ties.
IMPROVE_TOL = 1e-12

#: Default membership tolerance for reported optimal-action sets.
ACTION_TOL = 1e-8


@dataclass(frozen=True)
class SolveReport:
    """Result of one solver run on one discounted instance."""

    values: np.ndarray
    policy: StationaryPolicy
    optimal_actions: tuple[tuple[int, ...], ...]
    iterations: int
    bellman_residual: float
    method: str
    elapsed_s: float

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class OccupationMeasure:
    """LP variables z(x, a): discounted expected state-action visitation."""

    z: dict[tuple[int, int], float]

    def objective(self, dmdp: DiscountedMdp) -> float:
        total = 0.0
        for (x, a), weight in self.z.items():
            total += dmdp.base.actions[x][a].cost * weight
        return total

    def constraint_residuals(self, dmdp: DiscountedMdp) -> np.ndarray:
        """Per-state violation of
        sum_a z(x,a) - beta sum_{y,a} p(x|y,a) z(y,a) = 1."""
        n = dmdp.n_states
        residual = np.full(n, -1.0)
        for (x, a), weight in self.z.items():
            residual[x] += weight
            for y, p in dmdp.base.actions[x][a].transitions:
                residual[y] -= dmdp.beta * p * weight
        return residual


def _state_tables(dmdp: DiscountedMdp):
    """Per-state dense action tables: costs (k,) and transition rows (k, n)."""
    n = dmdp.n_states
    tables = []
    for acts in dmdp.base.actions:
        costs = np.array([act.cost for act in acts])
        P = np.zeros((len(acts), n))
        for a, act in enumerate(acts):
            for y, p in act.transitions:
                P[a, y] = p
        tables.append((costs, P))
    return tables


def _bellman(tables, beta: float, v: np.ndarray):
    """One application of the optimality operator; returns (Tv, greedy)."""
    tv = np.empty(len(tables))
    greedy = np.empty(len(tables), dtype=int)
    for x, (costs, P) in enumerate(tables):
        q = costs + beta * (P @ v)
        a = int(np.argmin(q))
        tv[x] = q[a]
        greedy[x] = a
    return tv, greedy


def policy_evaluate(dmdp: DiscountedMdp, phi: StationaryPolicy) -> np.ndarray:
    """Discounted value of ``phi``: the solution of (I - beta P_phi) v = c_phi.

    The system is nonsingular for beta < 1 because P_phi is stochastic
    (strict diagonal dominance).  At beta = 0 the value is just c_phi.
    """
    pm = policy_matrices(dmdp.base, phi)
    if dmdp.beta == 0.0:
        return pm.c.copy()
    n = dmdp.n_states
    return _linalg.solve(
        np.eye(n) - dmdp.beta * pm.Q, pm.c, context="discounted policy evaluation"
    )


def optimal_actions(dmdp: DiscountedMdp, v: np.ndarray, tol: float):
    """Per-state sets {a : |v(x) - c(x,a) - beta sum_y p(y|x,a) v(y)| <= tol}.

    An empty set at some state means ``v`` does not solve the optimality
    equation at this tolerance, which is an error.
    """
    v = np.asarray(v, dtype=float)
    sets = []
    for x, acts in enumerate(dmdp.base.actions):
        members = []
        for a, act in enumerate(acts):
            q = act.cost
            for y, p in act.transitions:
                q += dmdp.beta * p * v[y]
            if abs(v[x] - q) <= tol:
                members.append(a)
        if not members:
            raise ValueError(
                f"no action within {tol} at state {x}; v does not solve the "
                f"optimality equation at this tolerance"
            )
        sets.append(tuple(members))
    return sets


def _finish(dmdp, tables, v, phi_choice, iterations, method, action_tol, started):
    tv, _ = _bellman(tables, dmdp.beta, v)
    residual = float(np.max(np.abs(tv - v)))
    sets = tuple(optimal_actions(dmdp, v, action_tol))
    assert all(a in sets[x] for x, a in enumerate(phi_choice)), (
        "returned policy must lie in the reported optimal-action sets"
    )
    return SolveReport(
        values=v,
        policy=StationaryPolicy(tuple(phi_choice)),
        optimal_actions=sets,
        iterations=iterations,
        bellman_residual=residual,
        method=method,
        elapsed_s=time.perf_counter() - started,
    )


def value_iteration(
    dmdp: DiscountedMdp,
    tol: float = 1e-10,
    max_iter: int = 1_000_000,
    v0: np.ndarray | None = None,
    action_tol: float = ACTION_TOL,
) -> SolveReport:
    """Iterate the optimality operator until the sup-norm increment drops
    below tol (1 - beta) / (2 beta), which guarantees the returned values
    are within ``tol`` of the fixed point.  At beta = 0 one application is
    exact.  Successive increments must shrink by a factor of beta
    (contraction), which is asserted each iteration.
    """
    started = time.perf_counter()
    beta = dmdp.beta
    tables = _state_tables(dmdp)
    v = np.zeros(dmdp.n_states) if v0 is None else np.asarray(v0, dtype=float)
    threshold = np.inf if beta == 0.0 else tol * (1.0 - beta) / (2.0 * beta)
    previous_delta = None
    for iteration in range(1, max_iter + 1):
        tv, greedy = _bellman(tables, beta, v)
        delta = float(np.max(np.abs(tv - v)))
        if previous_delta is not None:
            assert delta <= beta * previous_delta * (1.0 + 1e-9) + 1e-15, (
                "optimality operator failed to contract"
            )
        v, previous_delta = tv, delta
        if delta <= threshold:
            return _finish(
                dmdp, tables, v, greedy, iteration, "value-iteration",
                action_tol, started,
            )
    raise NotConvergedWithinBudget(
        f"value iteration still moving by {previous_delta:.3g} after {max_iter} iterations"
    )


def howard_pi(
    dmdp: DiscountedMdp,
    phi0: StationaryPolicy | None = None,
    action_tol: float = ACTION_TOL,
) -> SolveReport:
    """Howard policy iteration: evaluate, then switch every state to its
    greedy action (ties to the incumbent, then the lowest index); stop when
    no state improves by more than 1e-12.  Values are nonincreasing
    entrywise across rounds, which is asserted.
    """
    started = time.perf_counter()
    beta = dmdp.beta
    tables = _state_tables(dmdp)
    phi = phi0 if phi0 is not None else StationaryPolicy((0,) * dmdp.n_states)
    v = policy_evaluate(dmdp, phi)
    iterations = 0
    while True:
        iterations += 1
        improved = False
        new_choice = []
        for x, (costs, P) in enumerate(tables):
            q = costs + beta * (P @ v)
            best = int(np.argmin(q))
            if q[best] < q[phi[x]] - IMPROVE_TOL:
                new_choice.append(best)
                improved = True
            else:
                new_choice.append(phi[x])
        if not improved:
            return _finish(
                dmdp, tables, v, tuple(phi), iterations, "howard-pi",
                action_tol, started,
            )
        phi = StationaryPolicy(tuple(new_choice))
        v_next = policy_evaluate(dmdp, phi)
        assert np.all(v_next <= v + 1e-9), "policy iteration must not increase values"
        v = v_next


def dantzig_pi(
    dmdp: DiscountedMdp,
    phi0: StationaryPolicy | None = None,
    action_tol: float = ACTION_TOL,
    max_switches: int | None = None,
) -> SolveReport:
    """Simple policy iteration with Dantzig's rule: per round, switch the
    single state-action pair with the most negative reduced cost
    c(x,a) + beta sum p(y|x,a) v(y) - v(x) (ties: lowest state, then lowest
    action); stop when all reduced costs are >= -1e-12.  The iteration
    count is the number of switches.
    """
    started = time.perf_counter()
    beta = dmdp.beta
    tables = _state_tables(dmdp)
    phi = phi0 if phi0 is not None else StationaryPolicy((0,) * dmdp.n_states)
    v = policy_evaluate(dmdp, phi)
    switches = 0
    total_actions = dmdp.base.n_state_actions
    cap = max_switches if max_switches is not None else 10_000 + 100 * total_actions**2
    while True:
        best_pair = None
        best_reduced = -IMPROVE_TOL
        for x, (costs, P) in enumerate(tables):
            q = costs + beta * (P @ v)
            for a in range(len(costs)):
                reduced = q[a] - v[x]
                if reduced < best_reduced:
                    best_reduced = reduced
                    best_pair = (x, a)
        if best_pair is None:
            return _finish(
                dmdp, tables, v, tuple(phi), switches, "dantzig-pi",
                action_tol, started,
            )
        switches += 1
        if switches > cap:
            raise NotConvergedWithinBudget(
                f"Dantzig policy iteration exceeded {cap} switches (degeneracy cycle?)"
            )
        choice = list(phi)
        choice[best_pair[0]] = best_pair[1]
        phi = StationaryPolicy(tuple(choice))
        v = policy_evaluate(dmdp, phi)


METHODS = {
    "vi": value_iteration,
    "howard": howard_pi,
    "dantzig": dantzig_pi,
}


def solve(dmdp: DiscountedMdp, method: str = "howard", **kwargs) -> SolveReport:
    """Dispatch to one of the three solvers by name (vi | howard | dantzig)."""
    try:
        solver = METHODS[method]
    except KeyError:
        raise ValueError(
            f"unknown method {method!r}; expected one of {sorted(METHODS)}"
        ) from None
    return solver(dmdp, **kwargs)


def occupation_measure(dmdp: DiscountedMdp, phi: StationaryPolicy) -> OccupationMeasure:
    """The feasible point of the occupation-measure LP induced by ``phi``:
    z(x, phi(x)) solves z (I - beta P_phi) = 1 with all other entries zero.

    Its objective equals the summed policy values sum_x v_phi(x).
    """
    pm = policy_matrices(dmdp.base, phi)
    n = dmdp.n_states
    z = _linalg.solve(
        (np.eye(n) - dmdp.beta * pm.Q).T,
        np.ones(n),
        context="occupation measure",
    )
    return OccupationMeasure(z={(x, phi[x]): float(z[x]) for x in range(n)})


# ---------------------------------------------------------------------------
# LP emission (standard textual LP file format).
# ---------------------------------------------------------------------------


def _format_terms(terms) -> list[str]:
    """Render (coefficient, variable) pairs as LP-format tokens."""
    rendered = []
    for i, (coef, var) in enumerate(terms):
        magnitude = f"{abs(coef):.17g} {var}"
        if i == 0:
            rendered.append(f"-{magnitude}" if coef < 0 else magnitude)
        else:
            rendered.append(f"{'-' if coef < 0 else '+'} {magnitude}")
    return rendered


def _wrap(tokens: list[str], prefix: str) -> list[str]:
    lines = []
    current = prefix
    for token in tokens:
        if len(current) + len(token) + 1 > 200:
            lines.append(current)
            current = "   " + token
        else:
            current = f"{current} {token}"
    lines.append(current)
    return lines


def emit_lp(dmdp: DiscountedMdp) -> str:
    """Emit the occupation-measure LP of the instance:

        minimize sum c(x,a) z_{x,a}
        s.t.     sum_a z(x,a) - beta sum_{y,a} p(x|y,a) z(y,a) = 1   for all x
                 z >= 0

    Variables are named z_<state>_<action>; ordering is state-major,
    action-minor; coefficients carry 17 significant digits.  Output is
    deterministic byte-for-byte.
    """
    base = dmdp.base
    beta = dmdp.beta
    lines = [f"\\ occupation-measure LP (beta = {beta:.17g})"]

    objective = [
        (base.actions[x][a].cost, f"z_{x}_{a}")
        for x, a in base.state_action_pairs()
    ]
    lines.append("Minimize")
    lines.extend(_wrap(_format_terms(objective), " obj:"))

    lines.append("Subject To")
    for x in range(base.n_states):
        terms = []
        for y, a in base.state_action_pairs():
            coef = (1.0 if y == x else 0.0) - beta * base.actions[y][a].rate_to(x)
            if coef != 0.0:
                terms.append((coef, f"z_{y}_{a}"))
        tokens = _format_terms(terms) + ["=", "1"]
        lines.extend(_wrap(tokens, f" flow_{x}:"))

    lines.append("Bounds")
    for x, a in base.state_action_pairs():
        lines.append(f" z_{x}_{a} >= 0")
    lines.append("End")
    return "\n".join(lines) + "\n"


def format_report(report: SolveReport) -> str:
    """Serialize a SolveReport as structured text (12 significant digits)."""
    lines = [
        f"method: {report.method}",
        f"iterations: {report.iterations}",
        f"bellman_residual: {report.bellman_residual:.12g}",
        f"elapsed_s: {report.elapsed_s:.6g}",
        "values: " + " ".join(f"{v:.12g}" for v in report.values),
        "policy: " + " ".join(str(a) for a in report.policy),
        "optimal_actions: "
        + " ".join(
            f"{x}:{','.join(str(a) for a in acts)}"
            for x, acts in enumerate(report.optimal_actions)
        ),
    ]
    return "\n".join(lines) + "\n"
