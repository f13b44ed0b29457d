"""Reduction of an average-cost MDP to a discounted MDP.

Requires a distinguished state ``ell`` with uniformly bounded expected
hitting time (certified by :func:`mdpreduce.transience.check_ht`).  The
construction rescales by the truncated-lifetime vector mu, reroutes the
lifetime-surplus mass into ``ell``, and sends the rest to a cost-free
absorbing sink:

    c'(x, a)    = c(x, a) / mu(x)
    p'(y | x, a) = q(y | x, a) mu(y) / (beta mu(x))                y != ell
    p'(ell|x, a) = [mu(x) - 1 - sum_{y != ell} q(y|x,a) mu(y)] / (beta mu(x))
    p'(sink|x,a) = 1 - [mu(x) - 1] / (beta mu(x))

with beta in [(K* - 1)/K*, 1).  For stochastic instances the optimal
discounted value at ``ell`` is the optimal average cost, and
h(x) = mu(x) [dv(x) - dv(ell)] solves the average-cost optimality
equation (ACOE)

    w + h(x) = min_a [ c(x, a) + sum_y q(y | x, a) h(y) ].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AcoeResidualError
from .hv import (
    DiscountedMdp,
    HvagOrigin,
    _check_certificate,
    _clamped_row,
    _extend_labels,
    check_discounted,
)
from .model import ActionData, RateClass, RateMdp, classify_rates
from .transience import HtCertificate, check_ht


@dataclass(frozen=True)
class AverageSolution:
    """Optimal average cost ``w`` plus the relative-value function ``h``,
    normalized so h(ell) = 0 (the ACOE only pins h up to a constant)."""

    w: float
    h: np.ndarray
    ell: int

    def __post_init__(self):
        h = np.asarray(self.h, dtype=float)
        h.flags.writeable = False
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "w", float(self.w))


@dataclass(frozen=True)
class AcoeReport:
    """Residuals of the ACOE and the per-state optimal-action sets."""

    max_residual: float
    residuals: np.ndarray
    optimal_actions: tuple[tuple[int, ...], ...]


def build_hvag(
    mdp: RateMdp, cert: HtCertificate, beta: float | None = None
) -> DiscountedMdp:
    """Build the discounted reduction of an average-cost instance.

    ``beta`` defaults to (K* - 1)/K*.  K* = 1 means ``ell`` is absorbing
    under every policy; then beta = 0 and every action is wired straight
    into the sink, whose kernel a 0-discount solver never consults.

    ``cert`` is normally the minimal mu from check_ht (it minimizes K* and
    hence beta), but any vector satisfying the truncated inequality is
    accepted, e.g. the constant 1/alpha when every action carries
    probability >= alpha into ``ell``.
    """
    mu = np.asarray(cert.mu, dtype=float)
    ell = cert.ell
    _check_certificate(mdp, mu, cert.K_star, exclude=ell)
    low = (cert.K_star - 1.0) / cert.K_star
    if beta is None:
        beta = low
    beta = float(beta)
    if beta < low or beta >= 1.0:
        raise ValueError(
            f"discount factor {beta} outside the admissible interval [{low}, 1)"
        )

    n = mdp.n_states
    sink = n
    new_actions = []
    for x, acts in enumerate(mdp.actions):
        entry = []
        for a, act in enumerate(acts):
            cost = act.cost / mu[x]
            if beta == 0.0:
                transitions = ((sink, 1.0),)
            else:
                denom = beta * mu[x]
                probs = [
                    (y, r * mu[y] / denom) for y, r in act.transitions if y != ell
                ]
                surplus = mu[x] - 1.0 - sum(
                    r * mu[y] for y, r in act.transitions if y != ell
                )
                probs.append((ell, surplus / denom))
                probs.append((sink, 1.0 - (mu[x] - 1.0) / denom))
                transitions = _clamped_row(
                    probs, f"({x}, {mdp.action_name(x, a)})"
                )
            entry.append(ActionData(cost=cost, transitions=transitions, name=act.name))
        new_actions.append(tuple(entry))
    new_actions.append((ActionData(cost=0.0, transitions=((sink, 1.0),)),))

    dmdp = DiscountedMdp(
        base=RateMdp(
            n_states=n + 1,
            actions=tuple(new_actions),
            state_labels=_extend_labels(mdp.state_labels),
        ),
        absorbing_state=sink,
        beta=beta,
        origin=HvagOrigin(mu=mu, ell=ell),
    )
    check_discounted(dmdp)
    return dmdp


def extract_average_solution(dv: np.ndarray, cert: HtCertificate) -> AverageSolution:
    """Map optimal discounted values of the reduction back to the
    average-cost solution: w = dv(ell), h(x) = mu(x) [dv(x) - dv(ell)].

    ``dv`` runs over the augmented state space with the absorbing state
    last; its value there must be zero.
    """
    dv = np.asarray(dv, dtype=float)
    mu = cert.mu
    if len(dv) != len(mu) + 1:
        raise ValueError(f"expected {len(mu) + 1} values, got {len(dv)}")
    if abs(dv[-1]) > 1e-12:
        raise ValueError(f"absorbing-state value must be 0, got {dv[-1]!r}")
    w = float(dv[cert.ell])
    h = mu * (dv[:-1] - w)
    return AverageSolution(w=w, h=h, ell=cert.ell)


def acoe_residuals(mdp: RateMdp, sol: AverageSolution) -> np.ndarray:
    """Per-state residuals w + h(x) - min_a [c(x,a) + sum q(y|x,a) h(y)]."""
    h = sol.h
    residuals = np.empty(mdp.n_states)
    for x, acts in enumerate(mdp.actions):
        best = np.inf
        for act in acts:
            value = act.cost
            for y, rate in act.transitions:
                value += rate * h[y]
            best = min(best, value)
        residuals[x] = sol.w + h[x] - best
    return residuals


def average_optimal_actions(mdp: RateMdp, sol: AverageSolution, tol: float):
    """Per-state sets {a : |w + h(x) - c(x,a) - sum q(y|x,a) h(y)| <= tol}."""
    h = sol.h
    sets = []
    for x, acts in enumerate(mdp.actions):
        members = []
        for a, act in enumerate(acts):
            value = act.cost
            for y, rate in act.transitions:
                value += rate * h[y]
            if abs(sol.w + h[x] - value) <= tol:
                members.append(a)
        sets.append(tuple(members))
    return sets


def verify_acoe(
    mdp: RateMdp, sol: AverageSolution, tol: float, cross_check: bool = True
) -> AcoeReport:
    """Check that (w, h) solves the ACOE within ``tol``.

    Returns the residuals and the optimal-action sets; raises
    AcoeResidualError (carrying the residuals) when the worst residual
    exceeds ``tol``.  With ``cross_check`` the per-state sets are also
    asserted to coincide with the optimal-action sets of the discounted
    reduction, which requires re-running the reduction pipeline.

    Only meaningful for stochastic instances (the average-cost criterion
    needs probabilities), which is enforced.
    """
    if classify_rates(mdp) is not RateClass.STOCHASTIC:
        raise ValueError("the average-cost criterion requires stochastic rates")
    residuals = acoe_residuals(mdp, sol)
    max_residual = float(np.max(np.abs(residuals)))
    if max_residual > tol:
        raise AcoeResidualError(max_residual, residuals)
    sets = average_optimal_actions(mdp, sol, tol)
    if any(not members for members in sets):
        raise AcoeResidualError(max_residual, residuals)
    if cross_check:
        from .solve import howard_pi, optimal_actions

        cert = check_ht(mdp, sol.ell)
        if not isinstance(cert, HtCertificate):
            raise ValueError(
                f"bounded hitting time to state {sol.ell} no longer certifiable"
            )
        dmdp = build_hvag(mdp, cert)
        report = howard_pi(dmdp)
        discounted_sets = optimal_actions(dmdp, report.values, tol)
        if list(discounted_sets[: mdp.n_states]) != list(sets):
            raise AssertionError(
                "ACOE optimal-action sets disagree with the discounted "
                f"reduction's: {sets} vs {discounted_sets[: mdp.n_states]}"
            )
    return AcoeReport(
        max_residual=max_residual,
        residuals=residuals,
        optimal_actions=tuple(sets),
    )


def lemma2_identity(
    mdp: RateMdp,
    cert: HtCertificate,
    dmdp: DiscountedMdp,
    f: np.ndarray,
    x: int,
    a: int,
) -> tuple[float, float]:
    """Evaluate both sides of the one-step correspondence identity for a
    bounded f on the augmented state space with f(sink) = 0:

        lhs = c'(x,a) + beta sum_y p'(y|x,a) f(y)
        rhs = [c(x,a) + sum_y q(y|x,a) mu(y) (f(y) - f(ell))
                      + (mu(x) - 1) f(ell)] / mu(x)

    Both numbers are returned for comparison; they agree to round-off for
    any valid certificate.
    """
    f = np.asarray(f, dtype=float)
    if len(f) != mdp.n_states + 1:
        raise ValueError(f"expected {mdp.n_states + 1} entries, got {len(f)}")
    if f[-1] != 0.0:
        raise ValueError(f"f must vanish at the absorbing state, got {f[-1]!r}")

    act = dmdp.base.actions[x][a]
    lhs = act.cost
    for y, p in act.transitions:
        lhs += dmdp.beta * p * f[y]

    mu, ell = cert.mu, cert.ell
    orig = mdp.actions[x][a]
    rhs = orig.cost + (mu[x] - 1.0) * f[ell]
    for y, rate in orig.transitions:
        rhs += rate * mu[y] * (f[y] - f[ell])
    rhs /= mu[x]
    return float(lhs), float(rhs)
