"""Monte Carlo play of biased tug-of-war.

Each trial uses its own Mersenne Twister stream (``random.Random``) seeded
with ``seed * 2**32 + trial``, so a run is reproducible across platforms
and trials can be split between workers freely.  Coin flips are exact:
a 64-bit draw is compared with the binary expansion of the rational win
probability, reading further digits only on an exact tie.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .core import BoundaryProblem

DEFAULT_STEP_CAP = 10**6
_TWO64 = 1 << 64


@dataclass(frozen=True)
class GameEstimate:
    mean: float
    stderr: float
    trials: int
    censored: int
    seed: int

    def covers(self, value, k: float = 4.0) -> bool:
        return abs(self.mean - float(value)) <= k * self.stderr


class _Coin:
    """Bernoulli(p) for rational p using 64-bit words."""

    def __init__(self, p: Fraction):
        self.p = Fraction(p)
        scaled = self.p * _TWO64
        self.threshold = math.floor(scaled)
        self.rest = scaled - self.threshold

    def flip(self, rng: random.Random) -> bool:
        word = rng.getrandbits(64)
        if word != self.threshold:
            return word < self.threshold
        rest = self.rest
        while True:
            scaled = rest * _TWO64
            digit = math.floor(scaled)
            word = rng.getrandbits(64)
            if word != digit:
                return word < digit
            rest = scaled - digit


def trial_rng(seed: int, trial: int) -> random.Random:
    return random.Random(seed * 2**32 + trial)


def play(problem: BoundaryProblem, strategy: Mapping[int, tuple[int, int]], start: int,
         rng: random.Random, step_cap: int = DEFAULT_STEP_CAP, coins=None) -> Fraction | None:
    """One game; the payoff, or None if it ran past ``step_cap`` moves."""
    if coins is None:
        coins = {x: _Coin(problem.p(x)) for x in problem.interior}
    boundary = problem.boundary_values
    x = start
    for _ in range(step_cap):
        if x in boundary:
            return boundary[x]
        hi, lo = strategy[x]
        x = hi if coins[x].flip(rng) else lo
    return boundary.get(x)


def simulate(problem: BoundaryProblem, strategy: Mapping[int, tuple[int, int]], start: int,
             trials: int, seed: int, step_cap: int = DEFAULT_STEP_CAP) -> GameEstimate:
    """Estimate the expected payoff from ``start`` when both players follow ``strategy``.

    Player I wins each turn with probability p_x at the current vertex and
    moves to ``strategy[x][0]``; otherwise Player II moves to
    ``strategy[x][1]``.  Games longer than ``step_cap`` are censored and left
    out of the mean.
    """
    if start in problem.boundary or not 0 <= start < problem.graph.n:
        raise ValueError("start must be an interior vertex")
    if trials < 1:
        raise ValueError("need at least one trial")
    if not 0 <= trials < 2**32:
        raise ValueError("too many trials")
    adjacency = problem.graph.adjacency
    for x in problem.interior:
        if x not in strategy or len(strategy[x]) != 2:
            raise ValueError(f"no strategy entry for vertex {x}")
        if not set(strategy[x]) <= set(adjacency[x]):
            raise ValueError(f"strategy at {x} moves to a non-neighbor")
    coins = {x: _Coin(problem.p(x)) for x in problem.interior}

    total = Fraction(0)
    squares = Fraction(0)
    done = 0
    censored = 0
    for t in range(trials):
        payoff = play(problem, strategy, start, trial_rng(seed, t), step_cap, coins)
        if payoff is None:
            censored += 1
            continue
        done += 1
        total += payoff
        squares += payoff * payoff
    if done == 0:
        return GameEstimate(math.nan, math.nan, trials, censored, seed)
    mean = total / done
    if done > 1:
        variance = (squares - total * mean) / (done - 1)
        stderr = math.sqrt(float(variance) / done)
    else:
        stderr = 0.0
    return GameEstimate(float(mean), stderr, trials, censored, seed)
