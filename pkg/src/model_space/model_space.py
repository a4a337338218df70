from __future__ import annotations
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence, Tuple, Union
import math

import numpy as np

import config
from utils.errors import DimensionError, DomainError


def _frozen_array(values: np.ndarray) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class StateSpace:
    """A finite state space S; events are subsets of its labels."""
    labels: Tuple[str, ...]

    def __post_init__(self):
        labels = tuple(str(s) for s in self.labels)
        if not labels:
            raise DomainError("a state space needs at least one state")
        if any(not s for s in labels):
            raise DomainError("state labels must be nonempty")
        if len(set(labels)) != len(labels):
            raise DomainError(f"state labels must be unique, got {labels}")
        object.__setattr__(self, 'labels', labels)

    @property
    def n(self) -> int:
        return len(self.labels)

    @classmethod
    def default(cls, n: int) -> "StateSpace":
        return cls(tuple(f"s{i}" for i in range(n)))

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise DomainError(f"unknown state {label!r}") from None

    def event_mask(self, event: Iterable[Union[str, int]]) -> np.ndarray:
        """Boolean indicator of an event given by labels or state indices."""
        mask = np.zeros(self.n, dtype=bool)
        for s in event:
            i = s if isinstance(s, (int, np.integer)) else self.index(s)
            if not 0 <= int(i) < self.n:
                raise DomainError(f"state index {i} out of range for {self.n} states")
            mask[int(i)] = True
        return mask


def _check_space(space: Optional[StateSpace], n: int) -> StateSpace:
    if space is None:
        return StateSpace.default(n)
    if space.n != n:
        raise DimensionError(f"vector of length {n} does not match {space.n} states")
    return space


@dataclass(frozen=True, eq=False)
class Model:
    """A probability vector on a finite state space (an element of the simplex).

    Weights summing to 1 within NORMALIZATION_TOL are renormalized; anything else
    is rejected.
    """
    weights: np.ndarray
    space: Optional[StateSpace] = None
    name: str = ""

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).reshape(-1)
        if w.size == 0:
            raise DomainError("a model needs at least one weight")
        if not np.all(np.isfinite(w)):
            raise DomainError(f"model weights must be finite, got {w.tolist()}")
        if np.any(w < 0):
            raise DomainError(f"model weights must be nonnegative, got {w.tolist()}")
        total = float(w.sum())
        if abs(total - 1.0) > config.NORMALIZATION_TOL:
            raise DomainError(f"model weights sum to {total!r}, expected 1")
        object.__setattr__(self, 'weights', _frozen_array(w / total))
        object.__setattr__(self, 'space', _check_space(self.space, w.size))

    @property
    def n(self) -> int:
        return int(self.weights.shape[0])

    @property
    def support(self) -> np.ndarray:
        return self.weights > 0

    def matches(self, other: "Model", tol: float = config.MODEL_EQUALITY_TOL) -> bool:
        require_same_space(self, other)
        return bool(np.all(np.abs(self.weights - other.weights) <= tol))

    def probability(self, event: Iterable[Union[str, int]]) -> float:
        return float(self.weights[self.space.event_mask(event)].sum())

    def __repr__(self) -> str:
        label = f"{self.name}=" if self.name else ""
        return f"Model({label}{np.round(self.weights, 6).tolist()})"


class HullMode(str, Enum):
    EXTREME_POINTS_ONLY = "extreme_points_only"
    CONVEX_HULL = "convex_hull"


@dataclass(frozen=True, eq=False)
class ModelSet:
    """The structured set Q, optionally read as its convex hull."""
    models: Tuple[Model, ...]
    hull_mode: HullMode = HullMode.EXTREME_POINTS_ONLY

    def __post_init__(self):
        models = tuple(self.models)
        if not models:
            raise DomainError("a structured set needs at least one model")
        for m in models[1:]:
            require_same_space(models[0], m)
        for i in range(len(models)):
            for j in range(i):
                if models[i].matches(models[j]):
                    raise DomainError(f"duplicate structured models at positions {j} and {i}")
        object.__setattr__(self, 'models', models)
        object.__setattr__(self, 'hull_mode', HullMode(self.hull_mode))

    def __len__(self) -> int:
        return len(self.models)

    def __iter__(self):
        return iter(self.models)

    def __getitem__(self, i: int) -> Model:
        return self.models[i]

    @property
    def space(self) -> StateSpace:
        return self.models[0].space

    @property
    def n(self) -> int:
        return self.models[0].n

    @property
    def matrix(self) -> np.ndarray:
        """k x n array of weights, one row per structured model."""
        return np.vstack([m.weights for m in self.models])

    def index_of(self, p: Model, tol: float = config.MODEL_EQUALITY_TOL) -> Optional[int]:
        for i, q in enumerate(self.models):
            if q.matches(p, tol):
                return i
        return None

    def is_subset_of(self, other: "ModelSet", tol: float = config.MODEL_EQUALITY_TOL) -> bool:
        return all(other.index_of(q, tol) is not None for q in self.models)

    def mixture(self, w: np.ndarray) -> np.ndarray:
        return np.asarray(w, dtype=float) @ self.matrix

    def with_hull_mode(self, hull_mode: HullMode) -> "ModelSet":
        return ModelSet(self.models, hull_mode)


@dataclass(frozen=True, eq=False)
class Act:
    """An act, represented directly by its utility profile u(f) over states."""
    utils: np.ndarray
    name: str = "f"
    space: Optional[StateSpace] = None

    def __post_init__(self):
        u = np.array(self.utils, dtype=float).reshape(-1)
        if u.size == 0:
            raise DomainError("an act needs at least one state")
        if not np.all(np.isfinite(u)):
            raise DomainError(f"act {self.name!r} has non-finite utilities")
        object.__setattr__(self, 'utils', _frozen_array(u))
        object.__setattr__(self, 'space', _check_space(self.space, u.size))

    @property
    def n(self) -> int:
        return int(self.utils.shape[0])

    def shifted(self, k: float, name: Optional[str] = None) -> "Act":
        return Act(self.utils + k, name or f"{self.name}+{k:g}", self.space)

    def mix(self, other: "Act", alpha: float, name: Optional[str] = None) -> "Act":
        """The pointwise mixture alpha*f + (1-alpha)*g in utils."""
        require_same_space(self, other)
        if not 0.0 <= alpha <= 1.0:
            raise DomainError(f"mixture weight must lie in [0, 1], got {alpha}")
        return Act(alpha * self.utils + (1.0 - alpha) * other.utils,
                   name or f"mix({self.name},{other.name})", self.space)

    def is_constant(self) -> bool:
        return bool(np.ptp(self.utils) == 0.0)

    def __repr__(self) -> str:
        return f"Act({self.name}={np.round(self.utils, 6).tolist()})"


def require_same_space(a, b) -> None:
    if a.space.labels != b.space.labels:
        raise DimensionError(
            f"state spaces differ: {a.space.labels} vs {b.space.labels}"
        )


def certainty_equivalent_utility(act: Act, model: Model) -> float:
    """u(x_f^p): the utility level whose sure consequence is indifferent to f under p."""
    require_same_space(act, model)
    return float(np.dot(act.utils, model.weights))


def mix_models(q1: Model, q2: Model, alpha: float) -> Model:
    """The hybrid model alpha*q1 + (1-alpha)*q2."""
    require_same_space(q1, q2)
    if not (0.0 <= alpha <= 1.0) or math.isnan(alpha):
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    w = alpha * q1.weights + (1.0 - alpha) * q2.weights
    return Model(w / w.sum(), q1.space)


def bet_act(
    space: StateSpace,
    event: Iterable[Union[str, int]],
    high_util: float,
    low_util: float,
    name: Optional[str] = None,
) -> Act:
    """The bet xAy: high_util on the event A, low_util elsewhere."""
    if not high_util > low_util:
        raise DomainError(f"a bet needs high_util > low_util, got {high_util} <= {low_util}")
    mask = space.event_mask(event)
    utils = np.where(mask, float(high_util), float(low_util))
    return Act(utils, name or "bet", space)


def uniform_model(space: StateSpace) -> Model:
    return Model(np.full(space.n, 1.0 / space.n), space)


def as_models(vectors: Sequence[Sequence[float]], space: Optional[StateSpace] = None) -> Tuple[Model, ...]:
    return tuple(Model(v, space) for v in vectors)
