"""Rate MDPs, expected lifetimes, and the two boundedness checkers.

A rate MDP carries nonnegative transition *rates* that need not sum to
one.  When they sum to less than one, the missing mass is the chance the
process dies this step, and the expected lifetime of a policy is finite
exactly when its rate matrix has spectral radius below one.
"""

import numpy as np

from mdpreduce import (
    ActionData,
    RateMdp,
    StationaryPolicy,
    check_ht,
    evaluate_lifetime,
    find_ht_states,
    maximize_lifetime,
    mu_value_iteration,
    policy_spectral_radius,
    truncate_at_state,
    validate,
)

print("== a one-state instance with two actions ==")
# action 0 survives with rate 0.5 per step, action 1 with rate 0.9
mdp = RateMdp(
    n_states=1,
    actions=(
        (
            ActionData(cost=1.0, transitions=((0, 0.5),), name="cautious"),
            ActionData(cost=1.0, transitions=((0, 0.9),), name="greedy"),
        ),
    ),
)
report = validate(mdp)
print(f"valid: {report.ok}, max row sum {report.max_row_sum}, class {report.rate_class.value}")

for a, name in ((0, "cautious"), (1, "greedy")):
    tau = evaluate_lifetime(mdp, StationaryPolicy((a,)))
    print(f"expected lifetime under {name!r}: {tau[0]:g}  (geometric series)")

cert = maximize_lifetime(mdp)
print(f"lifetime maximizer certifies mu = {cert.mu.tolist()}, K = {cert.K:g}")
print("the certificate inequality mu >= 1 + Q mu holds for *every* action,")
print("so every policy is transient and the instance satisfies the")
print("uniform-boundedness condition the total-cost reduction needs.\n")

print("== the same computation, approximately, by value iteration ==")
approx = mu_value_iteration(mdp, tol=1e-10)
print(f"after {approx.iterations} monotone iterations: {approx.mu_approx.tolist()}")
print(f"gap to the exact mu: {abs(approx.mu_approx[0] - cert.mu[0]):.2e}\n")

print("== a non-transient instance and its witness ==")
cycle = RateMdp(
    n_states=2,
    actions=(
        (ActionData(cost=0.0, transitions=((1, 1.0),)),),
        (ActionData(cost=2.0, transitions=((0, 1.0),)),),
    ),
)
witness = maximize_lifetime(cycle)
print(f"witness policy {tuple(witness.policy)}, evidence {type(witness.evidence).__name__}")
rho = policy_spectral_radius(cycle, witness.policy)
print(f"re-check: spectral radius of the witness policy = {rho:g} >= 1\n")

print("== bounded hitting times via truncation ==")
# removing all transitions *into* a state turns 'reach it fast' into a
# plain transience question for the truncated instance
truncated = truncate_at_state(cycle, 0)
print("after truncating at state 0, state 1 has transitions:",
      truncated.actions[1][0].transitions)
ht = check_ht(cycle, 0)
print(f"hitting time to state 0 bounded: K* = {ht.K_star:g}, mu = {ht.mu.tolist()}")
print("every state of the cycle qualifies:", find_ht_states(cycle))
