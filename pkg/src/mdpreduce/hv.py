"""Reduction of a transient total-cost MDP to a discounted MDP.

The construction rescales rates by the optimal-lifetime vector mu and adds
one cost-free absorbing state that soaks up the leftover probability mass:

    c'(x, a) = c(x, a) / mu(x)
    p'(y | x, a) = q(y | x, a) mu(y) / (beta mu(x))          y in X
    p'(sink | x, a) = 1 - sum_y p'(y | x, a)

with discount factor beta in [(K - 1)/K, 1).  The certificate inequality
mu(x) >= 1 + sum q(y|x,a) mu(y) makes every row a probability distribution.
Total-cost values come back via v(x) = mu(x) * v'(x).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import CertificateError, InstanceFormatError
from .model import ActionData, RateMdp, instance_from_obj, instance_to_obj
from .transience import CERT_SLACK, TransienceCertificate, certificate_residual

#: Transformed probabilities in [-1e-12, 0) are treated as round-off,
#: clamped to zero, and the row renormalized.  Anything more negative is a
#: hard error: the certificate cannot be valid.
CLAMP_TOL = 1e-12

ROW_TOL = 1e-12


@dataclass(frozen=True)
class HvOrigin:
    """Back-mapping metadata of a total-cost reduction."""

    mu: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        mu.flags.writeable = False
        object.__setattr__(self, "mu", mu)


@dataclass(frozen=True)
class HvagOrigin:
    """Back-mapping metadata of an average-cost reduction."""

    mu: np.ndarray
    ell: int

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        mu.flags.writeable = False
        object.__setattr__(self, "mu", mu)


@dataclass(frozen=True)
class DiscountedMdp:
    """A stochastic-transition MDP with a cost-free absorbing state and a
    scalar discount factor, plus metadata for mapping solutions back."""

    base: RateMdp
    absorbing_state: int
    beta: float
    origin: HvOrigin | HvagOrigin | None = None

    @property
    def n_states(self) -> int:
        return self.base.n_states


def check_discounted(dmdp: DiscountedMdp) -> None:
    """Raise ValueError unless every DiscountedMdp invariant holds:
    probability rows (nonnegative, summing to 1 within 1e-12), a single
    cost-free absorbing action at the absorbing state, beta in [0, 1).
    """
    base = dmdp.base
    if not 0.0 <= dmdp.beta < 1.0:
        raise ValueError(f"discount factor {dmdp.beta} outside [0, 1)")
    if not 0 <= dmdp.absorbing_state < base.n_states:
        raise ValueError(f"absorbing state {dmdp.absorbing_state} out of range")
    for x, acts in enumerate(base.actions):
        for a, act in enumerate(acts):
            total = 0.0
            for y, p in act.transitions:
                if p < 0.0:
                    raise ValueError(
                        f"negative probability {p} at ({x}, {base.action_name(x, a)}, {y})"
                    )
                total += p
            if abs(total - 1.0) > ROW_TOL:
                raise ValueError(
                    f"row ({x}, {base.action_name(x, a)}) sums to {total!r}, not 1"
                )
    sink = base.actions[dmdp.absorbing_state]
    if len(sink) != 1 or sink[0].cost != 0.0:
        raise ValueError("absorbing state must have exactly one cost-free action")
    if abs(sink[0].rate_to(dmdp.absorbing_state) - 1.0) > ROW_TOL:
        raise ValueError("absorbing state must transition to itself with probability 1")


def _clamped_row(entries, location: str):
    """Clamp round-off negatives to zero and renormalize when needed."""
    clamped = False
    row = []
    for y, p in entries:
        if p < -CLAMP_TOL:
            raise CertificateError(
                f"transformed probability {p:.3e} at {location} is genuinely "
                f"negative; the certificate does not fit this instance"
            )
        if p < 0.0:
            p, clamped = 0.0, True
        if p != 0.0:
            row.append((y, p))
    if clamped:
        total = sum(p for _, p in row)
        row = [(y, p / total) for y, p in row]
    return tuple(row)


def _check_certificate(mdp: RateMdp, mu: np.ndarray, bound: float, exclude=None):
    if len(mu) != mdp.n_states:
        raise CertificateError(
            f"certificate has {len(mu)} entries for {mdp.n_states} states"
        )
    if np.any(mu < 1.0 - CERT_SLACK) or np.any(mu > bound + CERT_SLACK):
        raise CertificateError("certificate mu outside [1, K]")
    violation = certificate_residual(mdp, mu, exclude=exclude)
    if violation > CERT_SLACK:
        raise CertificateError(
            f"certificate inequality violated by {violation:.3g}"
        )


def _absorbing_label(labels):
    if labels is None:
        return None
    label = "sink"
    while label in labels:
        label += "~"
    return label


def _extend_labels(labels):
    if labels is None:
        return None
    return tuple(labels) + (_absorbing_label(labels),)


def build_hv(
    mdp: RateMdp, cert: TransienceCertificate, beta: float | None = None
) -> DiscountedMdp:
    """Build the discounted reduction of a transient total-cost instance.

    ``beta`` defaults to (K - 1)/K, the smallest admissible discount factor
    (solver iteration bounds degrade as beta approaches 1).  K = 1 forces
    beta = 0; the instance then has no transitions at all and every action
    is wired straight into the sink, whose kernel a 0-discount solver never
    consults.
    """
    mu = np.asarray(cert.mu, dtype=float)
    _check_certificate(mdp, mu, cert.K)
    low = (cert.K - 1.0) / cert.K
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
                probs = [(y, r * mu[y] / denom) for y, r in act.transitions]
                p_sink = 1.0 - sum(p for _, p in probs)
                transitions = _clamped_row(
                    probs + [(sink, p_sink)],
                    f"({x}, {mdp.action_name(x, a)})",
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
        origin=HvOrigin(mu=mu),
    )
    check_discounted(dmdp)
    return dmdp


def lift_total_value(dv: np.ndarray, mu: np.ndarray) -> np.ndarray:
    """Map discounted values back to total-cost values: v(x) = mu(x) dv(x).

    ``dv`` runs over the augmented state space with the absorbing state
    last; its value there must be zero (the state is cost-free).
    """
    dv = np.asarray(dv, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if len(dv) != len(mu) + 1:
        raise ValueError(f"expected {len(mu) + 1} values, got {len(dv)}")
    if abs(dv[-1]) > 1e-12:
        raise ValueError(
            f"absorbing-state value must be 0, got {dv[-1]!r}"
        )
    return mu * dv[:-1]


def total_optimal_actions(mdp: RateMdp, v: np.ndarray, tol: float):
    """Per-state sets of actions optimal for the total-cost criterion:
    those with |v(x) - c(x,a) - sum_y q(y|x,a) v(y)| <= tol.

    An empty set at some state means ``v`` is not the total-cost value
    function at this tolerance, which is an error.
    """
    v = np.asarray(v, dtype=float)
    sets = []
    for x, acts in enumerate(mdp.actions):
        members = []
        for a, act in enumerate(acts):
            value = act.cost
            for y, rate in act.transitions:
                value += rate * v[y]
            if abs(v[x] - value) <= tol:
                members.append(a)
        if not members:
            raise ValueError(
                f"no action within {tol} at state {x}; v does not solve the "
                f"total-cost optimality equation at this tolerance"
            )
        sets.append(tuple(members))
    return sets


def similarity_transform(mdp: RateMdp, b: np.ndarray) -> RateMdp:
    """Positive diagonal similarity: c'(x,a) = b(x) c(x,a) and
    q'(y|x,a) = b(x) q(y|x,a) / b(y).

    Transience of a policy, optimality of a policy, and geometric value
    iteration are all invariant under this rescaling; with b = 1/mu the
    transformed row sums drop below (K - 1)/K.
    """
    b = np.asarray(b, dtype=float)
    if len(b) != mdp.n_states:
        raise ValueError(f"b has {len(b)} entries for {mdp.n_states} states")
    if np.any(b <= 0.0):
        raise ValueError("similarity vector must be entrywise positive")
    new_actions = tuple(
        tuple(
            ActionData(
                cost=b[x] * act.cost,
                transitions=tuple(
                    (y, b[x] * r / b[y]) for y, r in act.transitions
                ),
                name=act.name,
            )
            for act in acts
        )
        for x, acts in enumerate(mdp.actions)
    )
    return RateMdp(
        n_states=mdp.n_states, actions=new_actions, state_labels=mdp.state_labels
    )


# ---------------------------------------------------------------------------
# Serialization: same instance format as RateMdp plus a "discounted" header
# carrying beta, the absorbing-state index, and the origin metadata.
# ---------------------------------------------------------------------------


def discounted_to_obj(dmdp: DiscountedMdp) -> dict:
    obj = instance_to_obj(dmdp.base)
    header: dict = {
        "beta": dmdp.beta,
        "absorbing_state": dmdp.absorbing_state,
    }
    if isinstance(dmdp.origin, HvOrigin):
        header["origin"] = {"kind": "hv", "mu": list(dmdp.origin.mu)}
    elif isinstance(dmdp.origin, HvagOrigin):
        header["origin"] = {
            "kind": "hvag",
            "mu": list(dmdp.origin.mu),
            "ell": dmdp.origin.ell,
        }
    else:
        header["origin"] = None
    obj["discounted"] = header
    return obj


def discounted_from_obj(obj) -> DiscountedMdp:
    if not isinstance(obj, dict) or "discounted" not in obj:
        raise InstanceFormatError("missing 'discounted' header")
    header = obj["discounted"]
    rest = {k: v for k, v in obj.items() if k != "discounted"}
    base = instance_from_obj(rest)
    if not isinstance(header, dict):
        raise InstanceFormatError("'discounted' header must be an object")
    unknown = set(header) - {"beta", "absorbing_state", "origin"}
    if unknown:
        raise InstanceFormatError(
            f"unknown field '{sorted(unknown)[0]}' in 'discounted' header"
        )
    for key in ("beta", "absorbing_state", "origin"):
        if key not in header:
            raise InstanceFormatError(f"missing field '{key}' in 'discounted' header")
    raw_origin = header["origin"]
    origin: HvOrigin | HvagOrigin | None
    if raw_origin is None:
        origin = None
    elif isinstance(raw_origin, dict) and raw_origin.get("kind") == "hv":
        if set(raw_origin) != {"kind", "mu"}:
            raise InstanceFormatError("hv origin must carry exactly 'kind' and 'mu'")
        origin = HvOrigin(mu=np.asarray(raw_origin["mu"], dtype=float))
    elif isinstance(raw_origin, dict) and raw_origin.get("kind") == "hvag":
        if set(raw_origin) != {"kind", "mu", "ell"}:
            raise InstanceFormatError(
                "hvag origin must carry exactly 'kind', 'mu' and 'ell'"
            )
        origin = HvagOrigin(
            mu=np.asarray(raw_origin["mu"], dtype=float), ell=int(raw_origin["ell"])
        )
    else:
        raise InstanceFormatError("unrecognized 'origin' in 'discounted' header")
    dmdp = DiscountedMdp(
        base=base,
        absorbing_state=int(header["absorbing_state"]),
        beta=float(header["beta"]),
        origin=origin,
    )
    check_discounted(dmdp)
    return dmdp


def dumps_discounted(dmdp: DiscountedMdp) -> str:
    return json.dumps(discounted_to_obj(dmdp), indent=2) + "\n"


def loads_discounted(text: str) -> DiscountedMdp:
    return discounted_from_obj(json.loads(text))


def dump_discounted(dmdp: DiscountedMdp, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_discounted(dmdp))


def load_discounted(path) -> DiscountedMdp:
    with open(path, "r", encoding="utf-8") as fh:
        return discounted_from_obj(json.load(fh))
