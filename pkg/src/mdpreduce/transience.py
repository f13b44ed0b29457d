"""Transience checking and lifetime maximization.

An instance is *transient* when the expected-lifetime matrices
``sum_n Q_phi^n`` are uniformly bounded over stationary policies.  The
checker here is policy iteration on the lifetime-maximization problem:
every evaluated policy is certified by the M-matrix criterion (for
nonnegative Q, the spectral radius is below one iff I - Q is nonsingular
with an entrywise-nonnegative inverse), and the terminal lifetime vector
``mu`` is a certificate that covers *all* policies, since it satisfies

    mu(x) >= 1 + sum_y q(y | x, a) mu(y)    for every (x, a).

The same machinery run on a truncated instance (all rates into one state
``ell`` zeroed) checks the bounded-hitting-time condition used by the
average-cost reduction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _linalg
from .errors import NotConvergedWithinBudget
from .model import ActionData, RateMdp, StationaryPolicy, policy_matrices

#: Slack allowed when re-checking certificate inequalities.
CERT_SLACK = 1e-9

#: Strict-improvement threshold for lifetime policy iteration.
IMPROVE_TOL = 1e-12

#: Inverse entries below this are treated as genuinely negative.
NEG_INVERSE_TOL = 1e-9


@dataclass(frozen=True)
class SingularSystem:
    """I - Q_phi was numerically singular."""


@dataclass(frozen=True)
class NegativeInverseEntry:
    """(I - Q_phi)^-1 has a negative entry in row ``state``."""

    state: int


@dataclass(frozen=True)
class DivergentIteration:
    """An iterative evaluation diverged at ``state`` (reserved for
    approximate checkers; the exact policy-iteration path never emits it)."""

    state: int
    value: float


@dataclass(frozen=True)
class NonTransienceWitness:
    """A policy whose lifetime matrix is unbounded, with the evidence that
    convicted it.  The witness policy's Q_phi has spectral radius >= 1 - 1e-9,
    re-checkable via :func:`policy_spectral_radius`.
    """

    policy: StationaryPolicy
    evidence: SingularSystem | NegativeInverseEntry | DivergentIteration


@dataclass(frozen=True)
class TransienceCertificate:
    """Bounding vector mu (the optimal expected lifetime) and K = max mu.

    Invariants: mu(x) >= 1 + sum_y q(y|x,a) mu(y) within 1e-9 for every
    (x, a), and 1 <= mu(x) <= K.
    """

    mu: np.ndarray
    K: float
    method: str

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        mu.flags.writeable = False
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "K", float(self.K))


@dataclass(frozen=True)
class HtCertificate:
    """Certificate that every policy reaches ``ell`` fast: mu bounds the
    lifetime of the instance truncated at ``ell`` and K* = max mu.

    Invariants: mu(x) >= 1 + sum_{y != ell} q(y|x,a) mu(y) within 1e-9,
    and 1 <= mu(x) <= K*.
    """

    ell: int
    K_star: float
    mu: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        mu.flags.writeable = False
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "K_star", float(self.K_star))


@dataclass(frozen=True)
class MuIterationResult:
    mu_approx: np.ndarray
    iterations: int


def policy_spectral_radius(mdp: RateMdp, phi: StationaryPolicy) -> float:
    """Spectral radius of Q_phi; used to re-check a NonTransienceWitness."""
    Q = policy_matrices(mdp, phi).Q
    return float(np.abs(np.linalg.eigvals(Q)).max())


def certificate_residual(
    mdp: RateMdp, mu: np.ndarray, exclude: int | None = None
) -> float:
    """Worst violation of mu(x) >= 1 + sum q(y|x,a) mu(y) over all (x, a).

    Positive values are violations.  With ``exclude`` set, transitions into
    that state are left out of the sum (the truncated inequality).
    """
    mu = np.asarray(mu, dtype=float)
    worst = -np.inf
    for x, acts in enumerate(mdp.actions):
        for act in acts:
            total = 1.0
            for y, rate in act.transitions:
                if y != exclude:
                    total += rate * mu[y]
            worst = max(worst, total - mu[x])
    return worst


def evaluate_lifetime(mdp: RateMdp, phi: StationaryPolicy):
    """Expected lifetime tau of ``phi``: the solution of (I - Q_phi) tau = 1.

    The M-matrix criterion certifies transience of the policy: the inverse
    of I - Q_phi must exist and be entrywise nonnegative.  Returns the tau
    vector (>= 1 entrywise) or a NonTransienceWitness.
    """
    n = mdp.n_states
    Q = policy_matrices(mdp, phi).Q
    inv = _linalg.inverse(np.eye(n) - Q)
    if inv is None:
        return NonTransienceWitness(policy=phi, evidence=SingularSystem())
    negative = np.argwhere(inv < -NEG_INVERSE_TOL)
    if negative.size:
        state = int(negative[0][0])
        return NonTransienceWitness(
            policy=phi, evidence=NegativeInverseEntry(state=state)
        )
    return inv.sum(axis=1)


def _greedy_lifetime_improvement(mdp: RateMdp, phi: StationaryPolicy, tau):
    """One round of greedy improvement on 1 + sum q(y|x,a) tau(y)."""
    improved = False
    new_choice = []
    for x, acts in enumerate(mdp.actions):
        best_a = phi[x]
        best_val = tau[x]
        for a, act in enumerate(acts):
            val = 1.0
            for y, rate in act.transitions:
                val += rate * tau[y]
            if val > best_val + IMPROVE_TOL:
                best_val, best_a = val, a
                improved = True
        new_choice.append(best_a)
    return StationaryPolicy(tuple(new_choice)), improved


def maximize_lifetime(mdp: RateMdp):
    """Exact mu = sup over policies of the expected lifetime, by policy
    iteration; doubles as the transience checker.

    Any evaluated policy that fails the M-matrix check aborts with its
    NonTransienceWitness (the instance is then not transient, since the
    lifetime sup is infinite).  On success the returned certificate's mu is
    a fixed point of the lifetime operator and bounds every policy.
    """
    phi = StationaryPolicy((0,) * mdp.n_states)
    while True:
        result = evaluate_lifetime(mdp, phi)
        if isinstance(result, NonTransienceWitness):
            return result
        tau = result
        phi, improved = _greedy_lifetime_improvement(mdp, phi, tau)
        if not improved:
            return TransienceCertificate(
                mu=tau, K=float(tau.max()), method="exact-policy-iteration"
            )


def mu_value_iteration(
    mdp: RateMdp, tol: float = 1e-10, max_iter: int = 100_000
) -> MuIterationResult:
    """Monotone iteration of U u(x) = max_a [1 + sum q(y|x,a) u(y)] from 0.

    Stops when the sup-norm increment drops below ``tol``; raises
    NotConvergedWithinBudget when the budget runs out first, which signals
    possible non-transience (run :func:`maximize_lifetime` to get an exact
    verdict either way).
    """
    u = np.zeros(mdp.n_states)
    delta = np.inf
    for iteration in range(1, max_iter + 1):
        nxt = np.empty_like(u)
        for x, acts in enumerate(mdp.actions):
            best = -np.inf
            for act in acts:
                val = 1.0
                for y, rate in act.transitions:
                    val += rate * u[y]
                best = max(best, val)
            nxt[x] = best
        assert np.all(nxt >= u), "lifetime iterates must be nondecreasing"
        delta = float(np.max(nxt - u))
        u = nxt
        if delta < tol:
            return MuIterationResult(mu_approx=u, iterations=iteration)
    raise NotConvergedWithinBudget(
        f"lifetime value iteration still moving by {delta:.3g} after "
        f"{max_iter} iterations (possible non-transience)"
    )


def vi_certificate(
    mdp: RateMdp, tol: float = 1e-10, max_iter: int = 100_000
) -> TransienceCertificate:
    """Approximate certificate from value iteration, cross-checkable against
    the exact one from :func:`maximize_lifetime`."""
    result = mu_value_iteration(mdp, tol=tol, max_iter=max_iter)
    mu = result.mu_approx
    violation = certificate_residual(mdp, mu)
    if violation > CERT_SLACK:
        raise NotConvergedWithinBudget(
            f"value-iteration mu violates the certificate inequality by "
            f"{violation:.3g}; tighten tol"
        )
    return TransienceCertificate(
        mu=mu, K=float(mu.max()), method=f"value-iteration(tol={tol:g})"
    )


def truncate_at_state(mdp: RateMdp, ell: int) -> RateMdp:
    """Copy of the instance with every transition *into* ``ell`` removed."""
    if not 0 <= ell < mdp.n_states:
        raise ValueError(f"state index {ell} out of range")
    new_actions = tuple(
        tuple(
            ActionData(
                cost=act.cost,
                transitions=tuple(
                    (y, r) for y, r in act.transitions if y != ell
                ),
                name=act.name,
            )
            for act in acts
        )
        for acts in mdp.actions
    )
    return RateMdp(
        n_states=mdp.n_states,
        actions=new_actions,
        state_labels=mdp.state_labels,
    )


def check_ht(mdp: RateMdp, ell: int):
    """Check the bounded-hitting-time condition at ``ell``.

    Runs :func:`maximize_lifetime` on the instance truncated at ``ell``.
    Returns an HtCertificate (mu of the truncated problem, K* = max mu) or
    the NonTransienceWitness of a policy that avoids ``ell`` forever.
    """
    result = maximize_lifetime(truncate_at_state(mdp, ell))
    if isinstance(result, NonTransienceWitness):
        return result
    return HtCertificate(ell=ell, K_star=result.K, mu=result.mu)


def find_ht_states(mdp: RateMdp) -> list[tuple[int, float]]:
    """All states at which the bounded-hitting-time condition holds, with
    their K*, sorted by K* (ties by state index)."""
    hits = []
    for ell in range(mdp.n_states):
        result = check_ht(mdp, ell)
        if isinstance(result, HtCertificate):
            hits.append((ell, result.K_star))
    hits.sort(key=lambda pair: (pair[1], pair[0]))
    return hits
