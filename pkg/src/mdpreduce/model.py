"""Core data types for rate MDPs: validation, policy algebra, instance I/O.

A rate MDP is a finite MDP whose transitions carry nonnegative *rates*
rather than probabilities; row sums may be anything finite.  Rates are
stored sparsely per action and dense matrices are only materialized per
policy, which is what the small dense solvers downstream want.

All types are immutable after construction and safe to share across
threads; every operation here is a pure function.
"""

from __future__ import annotations

import enum
import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InstanceFormatError, PolicyCapExceeded

#: Absolute row-sum tolerance for stochasticity classification.  Inputs are
#: textual decimals; anything tighter would misclassify round-tripped files.
ROW_SUM_TOL = 1e-12

#: Default bound on enumerable policy spaces.
POLICY_CAP = 10**6


class RateClass(enum.Enum):
    """Row-sum classification of an instance."""

    STOCHASTIC = "stochastic"
    SUBSTOCHASTIC = "substochastic"
    GENERAL_RATES = "general-rates"


@dataclass(frozen=True)
class ActionData:
    """One action at one state: its one-step cost and sparse outgoing rates.

    ``transitions`` is a tuple of ``(target_state, rate)`` pairs.  Targets
    must be distinct within an action; duplicates are rejected by
    :func:`validate` rather than summed, since they usually signal input
    mistakes.
    """

    cost: float
    transitions: tuple[tuple[int, float], ...] = ()
    name: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "cost", float(self.cost))
        object.__setattr__(
            self,
            "transitions",
            tuple((int(t), float(r)) for t, r in self.transitions),
        )

    def row_sum(self) -> float:
        return float(sum(r for _, r in self.transitions))

    def rate_to(self, target: int) -> float:
        """Rate carried into ``target`` (0.0 when absent from the sparse list)."""
        for t, r in self.transitions:
            if t == target:
                return r
        return 0.0


@dataclass(frozen=True)
class RateMdp:
    """Finite MDP with nonnegative transition rates and bounded real costs."""

    n_states: int
    actions: tuple[tuple[ActionData, ...], ...]
    state_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(
            self, "actions", tuple(tuple(acts) for acts in self.actions)
        )
        if self.state_labels is not None:
            object.__setattr__(
                self, "state_labels", tuple(str(s) for s in self.state_labels)
            )

    def n_actions(self, x: int) -> int:
        return len(self.actions[x])

    def action_name(self, x: int, a: int) -> str:
        act = self.actions[x][a]
        return act.name if act.name is not None else f"a{a}"

    @property
    def n_state_actions(self) -> int:
        """Total number of state-action pairs (the LP's ``m``)."""
        return sum(len(acts) for acts in self.actions)

    def state_action_pairs(self):
        for x, acts in enumerate(self.actions):
            for a in range(len(acts)):
                yield x, a


@dataclass(frozen=True)
class StationaryPolicy:
    """One action index per state."""

    choice: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "choice", tuple(int(a) for a in self.choice))

    def __getitem__(self, x: int) -> int:
        return self.choice[x]

    def __len__(self) -> int:
        return len(self.choice)

    def __iter__(self):
        return iter(self.choice)


@dataclass(frozen=True)
class PolicyMatrices:
    """Dense one-step data of a policy: Q[x, y] = q(y | x, phi(x)), c[x] = c(x, phi(x))."""

    Q: np.ndarray
    c: np.ndarray


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of :func:`validate`: summary numbers plus the first violation."""

    ok: bool
    max_row_sum: float
    rate_class: RateClass
    error: str | None = None


def _first_violation(mdp: RateMdp) -> str | None:
    if not isinstance(mdp.n_states, int) or mdp.n_states < 1:
        return f"n_states must be a positive integer, got {mdp.n_states!r}"
    if len(mdp.actions) != mdp.n_states:
        return (
            f"actions lists {len(mdp.actions)} states, expected {mdp.n_states}"
        )
    if mdp.state_labels is not None:
        if len(mdp.state_labels) != mdp.n_states:
            return (
                f"{len(mdp.state_labels)} state labels for {mdp.n_states} states"
            )
        if len(set(mdp.state_labels)) != mdp.n_states:
            return "state labels are not unique"
    for x, acts in enumerate(mdp.actions):
        if len(acts) == 0:
            return f"state {x} has no actions"
        for a, act in enumerate(acts):
            name = mdp.action_name(x, a)
            if not math.isfinite(act.cost):
                return f"non-finite cost at ({x}, {name})"
            seen: set[int] = set()
            for y, rate in act.transitions:
                if not 0 <= y < mdp.n_states:
                    return f"transition target {y} out of range at ({x}, {name})"
                if not math.isfinite(rate):
                    return f"non-finite rate at ({x}, {name}, {y})"
                if rate < 0.0:
                    return f"negative rate at ({x}, {name}, {y})"
                if y in seen:
                    return f"duplicate transition target at ({x}, {name}, {y})"
                seen.add(y)
    return None


def _row_sums(mdp: RateMdp):
    for acts in mdp.actions:
        for act in acts:
            yield act.row_sum()


def _classify(sums) -> RateClass:
    sums = list(sums)
    if sums and all(abs(s - 1.0) <= ROW_SUM_TOL for s in sums):
        return RateClass.STOCHASTIC
    if sums and all(s <= 1.0 + ROW_SUM_TOL for s in sums):
        return RateClass.SUBSTOCHASTIC
    return RateClass.GENERAL_RATES


def validate(mdp: RateMdp) -> ValidationReport:
    """Check every structural invariant and report the first violation.

    The maximal row sum (finite by construction on finite instances, but
    still computed and reported) and the stochasticity class are included
    whether or not the instance is valid.
    """
    error = _first_violation(mdp)
    sums = list(_row_sums(mdp))
    max_row_sum = max(sums) if sums else 0.0
    return ValidationReport(
        ok=error is None,
        max_row_sum=max_row_sum,
        rate_class=_classify(sums),
        error=error,
    )


def classify_rates(mdp: RateMdp) -> RateClass:
    """Stochastic (all row sums 1 within 1e-12), substochastic (all <= 1 + 1e-12),
    or general rates."""
    return _classify(_row_sums(mdp))


def policy_matrices(mdp: RateMdp, phi: StationaryPolicy) -> PolicyMatrices:
    """Assemble the dense transition matrix and cost vector of ``phi``."""
    n = mdp.n_states
    if len(phi) != n:
        raise ValueError(f"policy has {len(phi)} entries for {n} states")
    Q = np.zeros((n, n))
    c = np.zeros(n)
    for x in range(n):
        a = phi[x]
        if not 0 <= a < mdp.n_actions(x):
            raise ValueError(
                f"action index {a} out of range at state {x} "
                f"({mdp.n_actions(x)} actions)"
            )
        act = mdp.actions[x][a]
        c[x] = act.cost
        for y, rate in act.transitions:
            Q[x, y] = rate
    return PolicyMatrices(Q=Q, c=c)


def count_policies(mdp: RateMdp) -> int:
    return math.prod(len(acts) for acts in mdp.actions)


def enumerate_policies(mdp: RateMdp, cap: int = POLICY_CAP):
    """Iterate every stationary policy once, in lexicographic order of
    action indices.  Raises PolicyCapExceeded eagerly when the policy space
    is larger than ``cap``.
    """
    total = count_policies(mdp)
    if total > cap:
        raise PolicyCapExceeded(f"{total} policies exceed cap {cap}")

    def _iter():
        for combo in itertools.product(
            *(range(len(acts)) for acts in mdp.actions)
        ):
            yield StationaryPolicy(combo)

    return _iter()


# ---------------------------------------------------------------------------
# Instance file format (JSON).  Grammar:
#
#   instance   := {"states": states, "actions": [state-actions x n]}
#   states     := positive integer n | [label x n]    (labels unique strings)
#   state-actions := nonempty array of action
#   action     := {"cost": number, "transitions": [transition...], "name"?: string}
#   transition := {"to": state-ref, "rate": number}
#   state-ref  := integer index | label (only when labels are defined)
#
# Unknown fields are rejected anywhere.
# ---------------------------------------------------------------------------


def _require_keys(obj: dict, allowed: set[str], required: set[str], path: str):
    for key in obj:
        if key not in allowed:
            raise InstanceFormatError(f"unknown field '{key}' at {path}")
    for key in required:
        if key not in obj:
            raise InstanceFormatError(f"missing field '{key}' at {path}")


def _as_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InstanceFormatError(f"expected a number at {path}, got {value!r}")
    return float(value)


def _as_index(value, n: int, labels, path: str) -> int:
    if isinstance(value, bool):
        raise InstanceFormatError(f"expected a state at {path}, got {value!r}")
    if isinstance(value, int):
        if not 0 <= value < n:
            raise InstanceFormatError(
                f"state index {value} out of range at {path}"
            )
        return value
    if isinstance(value, str):
        if labels is None:
            raise InstanceFormatError(
                f"state label {value!r} at {path}, but the instance has no labels"
            )
        try:
            return labels.index(value)
        except ValueError:
            raise InstanceFormatError(
                f"unknown state label {value!r} at {path}"
            ) from None
    raise InstanceFormatError(f"expected a state at {path}, got {value!r}")


def instance_from_obj(obj) -> RateMdp:
    """Build a RateMdp from a decoded JSON object, rejecting unknown fields."""
    if not isinstance(obj, dict):
        raise InstanceFormatError("top level must be an object")
    _require_keys(obj, {"states", "actions"}, {"states", "actions"}, "top level")

    states = obj["states"]
    labels: tuple[str, ...] | None
    if isinstance(states, bool):
        raise InstanceFormatError("'states' must be an integer or a label array")
    if isinstance(states, int):
        if states < 1:
            raise InstanceFormatError(f"'states' must be positive, got {states}")
        n, labels = states, None
    elif isinstance(states, list):
        if not states or not all(isinstance(s, str) for s in states):
            raise InstanceFormatError("'states' labels must be a nonempty string array")
        if len(set(states)) != len(states):
            raise InstanceFormatError("'states' labels must be unique")
        n, labels = len(states), tuple(states)
    else:
        raise InstanceFormatError("'states' must be an integer or a label array")

    raw_actions = obj["actions"]
    if not isinstance(raw_actions, list) or len(raw_actions) != n:
        raise InstanceFormatError(f"'actions' must be an array of {n} entries")

    all_actions = []
    for x, acts in enumerate(raw_actions):
        path_x = f"actions[{x}]"
        if not isinstance(acts, list):
            raise InstanceFormatError(f"{path_x} must be an array of actions")
        state_actions = []
        for a, act in enumerate(acts):
            path_a = f"{path_x}[{a}]"
            if not isinstance(act, dict):
                raise InstanceFormatError(f"{path_a} must be an object")
            _require_keys(
                act, {"name", "cost", "transitions"}, {"cost", "transitions"}, path_a
            )
            name = act.get("name")
            if name is not None and not isinstance(name, str):
                raise InstanceFormatError(f"'name' must be a string at {path_a}")
            cost = _as_number(act["cost"], f"{path_a}.cost")
            raw_trans = act["transitions"]
            if not isinstance(raw_trans, list):
                raise InstanceFormatError(
                    f"'transitions' must be an array at {path_a}"
                )
            transitions = []
            for i, tr in enumerate(raw_trans):
                path_t = f"{path_a}.transitions[{i}]"
                if not isinstance(tr, dict):
                    raise InstanceFormatError(f"{path_t} must be an object")
                _require_keys(tr, {"to", "rate"}, {"to", "rate"}, path_t)
                to = _as_index(tr["to"], n, labels, f"{path_t}.to")
                rate = _as_number(tr["rate"], f"{path_t}.rate")
                transitions.append((to, rate))
            state_actions.append(
                ActionData(cost=cost, transitions=tuple(transitions), name=name)
            )
        all_actions.append(tuple(state_actions))

    return RateMdp(n_states=n, actions=tuple(all_actions), state_labels=labels)


def instance_to_obj(mdp: RateMdp) -> dict:
    states = list(mdp.state_labels) if mdp.state_labels is not None else mdp.n_states
    actions = []
    for acts in mdp.actions:
        entry = []
        for act in acts:
            record: dict = {}
            if act.name is not None:
                record["name"] = act.name
            record["cost"] = act.cost
            record["transitions"] = [
                {"to": y, "rate": r} for y, r in act.transitions
            ]
            entry.append(record)
        actions.append(entry)
    return {"states": states, "actions": actions}


def loads_instance(text: str) -> RateMdp:
    return instance_from_obj(json.loads(text))


def dumps_instance(mdp: RateMdp) -> str:
    return json.dumps(instance_to_obj(mdp), indent=2) + "\n"


def load_instance(path) -> RateMdp:
    with open(path, "r", encoding="utf-8") as fh:
        return instance_from_obj(json.load(fh))


def dump_instance(mdp: RateMdp, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_instance(mdp))
