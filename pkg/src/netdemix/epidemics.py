"""Stochastic SIRS simulation and temporal aggregation.

The simulator produces ground-truth infection histories; the learning side
of the library never sees the epidemic parameters, only (aggregate, history)
pairs.  Updates are synchronous: every transition at step t is computed from
the full state at step t-1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DimensionError, InvalidArgumentError, InvalidSpecError
from .graphs import Graph
from .seeding import seed_sequence

SUSCEPTIBLE = 0
INFECTED = 1
RECOVERED = 2


@dataclass(frozen=True)
class SIRSParams:
    """Per-step transition probabilities: infection (per infected neighbor),
    healing, and loss of immunity."""

    beta: float
    delta: float
    gamma: float

    def __post_init__(self):
        for name in ("beta", "delta", "gamma"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InvalidSpecError(f"{name} must be in [0, 1], got {v}")


@dataclass(frozen=True)
class EpidemicTrajectory:
    """Full epidemic history: S/I/R states and the binary infection matrix.

    ``y[i, t] == 1`` iff node i is infected at step t (columns are time).
    """

    y: np.ndarray
    states: np.ndarray
    graph_id: str = ""

    def __post_init__(self):
        y = np.ascontiguousarray(self.y, dtype=np.int8)
        states = np.ascontiguousarray(self.states, dtype=np.int8)
        if y.shape != states.shape or y.ndim != 2:
            raise DimensionError(
                f"y {y.shape} and states {states.shape} must be equal 2-D shapes"
            )
        if not np.array_equal(y, (states == INFECTED).astype(np.int8)):
            raise InvalidArgumentError("y must be the indicator of the infected state")
        y.flags.writeable = False
        states.flags.writeable = False
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "states", states)

    @property
    def num_nodes(self) -> int:
        return self.y.shape[0]

    @property
    def horizon(self) -> int:
        return self.y.shape[1]


@dataclass(frozen=True)
class AggregatedObservation:
    """Per-node fraction of steps spent infected; entries on the grid k/T."""

    x: np.ndarray
    horizon: int

    def __post_init__(self):
        x = np.ascontiguousarray(self.x, dtype=np.float64)
        if x.ndim != 1:
            raise DimensionError(f"x must be a vector, got shape {x.shape}")
        x.flags.writeable = False
        object.__setattr__(self, "x", x)


def sirs_step(
    states: np.ndarray, g: Graph, p: SIRSParams, rng: np.random.Generator
) -> np.ndarray:
    """One synchronous SIRS update.

    A susceptible node with k infected neighbors becomes infected with
    probability 1 - (1 - beta)^k (an independent beta-chance per infected
    neighbor); infected nodes heal with probability delta; recovered nodes
    lose immunity with probability gamma.  Each node consumes exactly one
    uniform draw, in node order.
    """
    states = np.asarray(states)
    if states.shape != (g.num_nodes,):
        raise DimensionError(
            f"states has shape {states.shape}, expected ({g.num_nodes},)"
        )
    infected = (states == INFECTED).astype(np.float64)
    k = g.adjacency.astype(np.float64) @ infected
    p_infect = 1.0 - np.power(1.0 - p.beta, k)
    u = rng.random(g.num_nodes)
    nxt = states.copy()
    nxt[(states == SUSCEPTIBLE) & (u < p_infect)] = INFECTED
    nxt[(states == INFECTED) & (u < p.delta)] = RECOVERED
    nxt[(states == RECOVERED) & (u < p.gamma)] = SUSCEPTIBLE
    return nxt


def simulate(
    g: Graph,
    p: SIRSParams,
    horizon: int,
    initial_infected: Iterable[int],
    rng: np.random.Generator,
) -> EpidemicTrajectory:
    """Simulate ``horizon`` steps; step 1 is infected exactly on ``initial_infected``."""
    if horizon < 1:
        raise InvalidArgumentError(f"horizon must be >= 1, got {horizon}")
    init = sorted(set(int(i) for i in initial_infected))
    if init and (init[0] < 0 or init[-1] >= g.num_nodes):
        raise InvalidArgumentError("initial_infected outside node range")
    states = np.empty((g.num_nodes, horizon), dtype=np.int8)
    first = np.full(g.num_nodes, SUSCEPTIBLE, dtype=np.int8)
    first[init] = INFECTED
    states[:, 0] = first
    for t in range(1, horizon):
        states[:, t] = sirs_step(states[:, t - 1], g, p, rng)
    y = (states == INFECTED).astype(np.int8)
    return EpidemicTrajectory(y=y, states=states, graph_id=g.graph_id)


def aggregate(traj: EpidemicTrajectory) -> AggregatedObservation:
    """Collapse a trajectory to the per-node fraction of infected steps."""
    t = traj.horizon
    x = traj.y.sum(axis=1, dtype=np.int64) / float(t)
    return AggregatedObservation(x=x, horizon=t)


def check_locality(traj: EpidemicTrajectory, g: Graph) -> bool:
    """True iff every infection at t >= 2 had an infected closed neighbor at t-1."""
    a_loop = g.adjacency.astype(np.int64) + np.eye(g.num_nodes, dtype=np.int64)
    prev = a_loop @ traj.y[:, :-1].astype(np.int64)
    return bool(np.all(prev[traj.y[:, 1:] == 1] >= 1))


def uniform_single_source(rng: np.random.Generator, g: Graph) -> list[int]:
    """Default source rule: one node chosen uniformly at random."""
    return [int(rng.integers(g.num_nodes))]


def uniform_sources(count: int) -> Callable[[np.random.Generator, Graph], list[int]]:
    """Source rule choosing ``count`` distinct nodes uniformly at random."""
    if count < 1:
        raise InvalidArgumentError("source count must be >= 1")

    def rule(rng: np.random.Generator, g: Graph) -> list[int]:
        return sorted(int(i) for i in rng.choice(g.num_nodes, size=count, replace=False))

    return rule


@dataclass(frozen=True)
class EpidemicSample:
    """One (aggregate, trajectory) pair plus its provenance."""

    x: AggregatedObservation
    trajectory: EpidemicTrajectory
    source: tuple[int, ...]
    seed: int


@dataclass(frozen=True)
class EpidemicDataset:
    """A graph together with simulated samples on it."""

    graph: Graph
    samples: tuple[EpidemicSample, ...]
    master_seed: int

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def horizon(self) -> int:
        return self.samples[0].trajectory.horizon

    def aggregates(self) -> np.ndarray:
        """(M, N) matrix of aggregated observations."""
        return np.stack([s.x.x for s in self.samples])

    def trajectories(self) -> np.ndarray:
        """(M, N, T) array of binary infection histories."""
        return np.stack([s.trajectory.y for s in self.samples]).astype(np.float64)

    def subset(self, indices: Sequence[int]) -> "EpidemicDataset":
        picked = tuple(self.samples[i] for i in indices)
        return EpidemicDataset(graph=self.graph, samples=picked, master_seed=self.master_seed)


def generate_dataset(
    g: Graph,
    p: SIRSParams,
    horizon: int,
    num_samples: int,
    master_seed: int,
    source_rule: Callable[[np.random.Generator, Graph], list[int]] = uniform_single_source,
) -> EpidemicDataset:
    """Simulate ``num_samples`` independent epidemics and aggregate each.

    Sample i draws from the substream (master_seed, i), so generation order
    (or parallel generation) cannot change results.
    """
    if num_samples < 1:
        raise InvalidArgumentError("num_samples must be >= 1")
    samples = []
    for i in range(num_samples):
        ss = seed_sequence(master_seed, i)
        rng = np.random.default_rng(ss)
        source = source_rule(rng, g)
        traj = simulate(g, p, horizon, source, rng)
        samples.append(
            EpidemicSample(
                x=aggregate(traj),
                trajectory=traj,
                source=tuple(source),
                seed=int(ss.generate_state(1, np.uint64)[0]),
            )
        )
    return EpidemicDataset(graph=g, samples=tuple(samples), master_seed=master_seed)
