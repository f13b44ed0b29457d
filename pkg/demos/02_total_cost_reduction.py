"""Total-cost MDPs solved through the discounted reduction.

The transform divides costs by the optimal-lifetime vector mu, rescales
rates into probabilities, and routes leftover mass into one cost-free
absorbing sink.  The discounted problem is then solved by any standard
method, and total-cost values come back as v(x) = mu(x) * v'(x).
"""

import numpy as np

from mdpreduce import (
    ActionData,
    RateMdp,
    brute_force_total,
    build_hv,
    dantzig_pi,
    howard_pi,
    lift_total_value,
    maximize_lifetime,
    optimal_actions,
    similarity_transform,
    solve_total_cost,
    total_optimal_actions,
    value_iteration,
)

mdp = RateMdp(
    n_states=2,
    actions=(
        (
            ActionData(cost=1.0, transitions=((0, 0.3), (1, 0.4)), name="mix"),
            ActionData(cost=0.2, transitions=((1, 0.85),), name="hop"),
        ),
        (
            ActionData(cost=-0.5, transitions=((0, 0.5),), name="back"),
            ActionData(cost=0.1, transitions=((1, 0.6),), name="stay"),
        ),
    ),
)

print("== certificate and transform ==")
cert = maximize_lifetime(mdp)
print(f"mu = {np.round(cert.mu, 6).tolist()}, K = {cert.K:.6g}")
dmdp = build_hv(mdp, cert)
print(f"discount factor beta = (K-1)/K = {dmdp.beta:.6g}")
print(f"augmented state space has {dmdp.base.n_states} states "
      f"(sink = {dmdp.absorbing_state})\n")

print("== three solvers, one fixed point ==")
for report in (
    value_iteration(dmdp, tol=1e-12),
    howard_pi(dmdp),
    dantzig_pi(dmdp),
):
    lifted = lift_total_value(report.values, cert.mu)
    print(f"{report.method:16s} iterations {report.iterations:3d}  "
          f"total-cost values {np.round(lifted, 9).tolist()}")

print()
print("== optimal actions agree on both sides of the reduction ==")
report = howard_pi(dmdp)
lifted = lift_total_value(report.values, cert.mu)
print("total-cost side:", total_optimal_actions(mdp, lifted, 1e-8))
print("discounted side:", optimal_actions(dmdp, report.values, 1e-8)[: mdp.n_states])
print()

print("== brute-force cross-check ==")
oracle = brute_force_total(mdp)
deviation = np.max(np.abs(oracle.optimal_value - lifted))
print(f"enumerated optimum {np.round(oracle.optimal_value, 9).tolist()}")
print(f"max deviation from the pipeline: {deviation:.2e}")
print(f"optimal policies: {[tuple(p) for p in oracle.optimal_policies]}\n")

print("== the whole pipeline in one call ==")
solution = solve_total_cost(mdp, method="howard")
print(f"values {np.round(solution.values, 9).tolist()}, "
      f"policy {tuple(solution.policy)}\n")

print("== positive rescalings leave optimality untouched ==")
rng = np.random.default_rng(1)
b = rng.uniform(0.5, 2.0, size=2)
rescaled = similarity_transform(mdp, b)
same = set(brute_force_total(rescaled).optimal_policies) == set(
    oracle.optimal_policies
)
print(f"b = {np.round(b, 4).tolist()}: optimal-policy set unchanged: {same}")
