"""
Monte-Carlo sampler - seeded runs for statistical cross-checks

Every sample i of an estimate draws from its own random.Random stream seeded
with the string "<seed>/<i>" (SHA-512 based seeding, identical on every
platform). A choice with probability p = num/den takes the left branch when
a uniform 64-bit integer u satisfies u·den < num·2^64, so each branch is
drawn with bias below 2^-64 and without floating point.
"""

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional

from pgcl.core import ZERO, Program, Valuation
from pgcl.semantics import State, branches, initial_state

from .config import DEFAULT_CONFIG, AnalysisConfig

_PRECISION_BITS = 64
_SEED_LIMIT = 1 << 64


class SeededStream:
    """Reproducible bit source with counter-based stream splitting"""

    def __init__(self, seed: int, index: Optional[int] = None):
        self.seed = seed
        self.index = index
        self._rng = random.Random(seed if index is None else f"{seed}/{index}")

    def fork(self, index: int) -> "SeededStream":
        return SeededStream(self.seed, index)

    def bernoulli(self, probability: Fraction) -> bool:
        """True with probability p, up to a 2^-64 dyadic rounding."""
        draw = self._rng.getrandbits(_PRECISION_BITS)
        return draw * probability.denominator < probability.numerator << _PRECISION_BITS


@dataclass(frozen=True)
class SampleRun:
    terminated: bool
    valuation: Valuation
    steps: int
    history: str
    probability: Fraction


@dataclass(frozen=True)
class SampleReport:
    samples: int
    terminated: int
    step_capped: int
    mean_outcome: Optional[Fraction]
    mean_steps: Optional[Fraction]
    outcome_variance: Optional[Fraction]
    steps_variance: Optional[Fraction]
    seed: int

    @property
    def terminated_fraction(self) -> Fraction:
        return Fraction(self.terminated, self.samples)

    @property
    def outcome_std_error(self) -> Optional[float]:
        if self.outcome_variance is None or self.terminated == 0:
            return None
        return math.sqrt(self.outcome_variance / self.terminated)

    @property
    def steps_std_error(self) -> Optional[float]:
        if self.steps_variance is None or self.terminated == 0:
            return None
        return math.sqrt(self.steps_variance / self.terminated)

    @property
    def terminated_std_error(self) -> float:
        p = float(self.terminated_fraction)
        return math.sqrt(p * (1 - p) / self.samples)


def _check_seed(seed: int):
    if not 0 <= seed < _SEED_LIMIT:
        raise ValueError(f"seed must be a 64-bit unsigned value, got {seed}")


def sample_run(program: Program, valuation: Optional[Valuation], seed, step_cap: int) -> SampleRun:
    """
    One run of the program. `seed` is an int or a SeededStream; the run is a
    pure function of it.
    """
    if step_cap < 1:
        raise ValueError(f"step_cap must be at least 1, got {step_cap}")
    if isinstance(seed, SeededStream):
        stream = seed
    else:
        _check_seed(seed)
        stream = SeededStream(seed)

    state: State = initial_state(program, valuation)
    steps = 0
    while not state.terminated:
        if steps >= step_cap:
            return SampleRun(False, state.valuation, steps, state.history, state.probability)
        moves = branches(state.continuation, state.valuation)
        move = moves[0]
        if len(moves) == 2 and not stream.bernoulli(moves[0].factor):
            move = moves[1]
        state = State(move.continuation, move.valuation,
                      state.probability * move.factor, state.history + move.letter)
        steps += 1
    return SampleRun(True, state.valuation, steps, state.history, state.probability)


def estimate(program: Program, valuation: Optional[Valuation], var: Optional[str], n: int, seed: int,
             step_cap: Optional[int] = None, config: Optional[AnalysisConfig] = None,
             on_sample_finished: Optional[Callable[[int, SampleRun], None]] = None) -> SampleReport:
    """
    Aggregate n independent runs. Means and variance are exact rationals over
    the terminated runs; the report is identical for any worker count.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    _check_seed(seed)
    config = config or DEFAULT_CONFIG
    cap = step_cap if step_cap is not None else config.step_cap
    root = SeededStream(seed)

    def run_one(index: int) -> SampleRun:
        return sample_run(program, valuation, root.fork(index), cap)

    if config.jobs > 1 and n >= config.parallel_threshold:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            runs: List[SampleRun] = list(pool.map(run_one, range(n)))
    else:
        runs = [run_one(i) for i in range(n)]

    if on_sample_finished:
        for index, run in enumerate(runs):
            on_sample_finished(index, run)

    finished = [run for run in runs if run.terminated]
    count = len(finished)
    mean_outcome = mean_steps = variance = steps_variance = None
    if count:
        outcomes = [run.valuation[var] if var is not None else ZERO for run in finished]
        mean_outcome = sum(outcomes, ZERO) / count
        mean_steps = Fraction(sum(run.steps for run in finished), count)
        if count > 1:
            variance = sum(((x - mean_outcome) ** 2 for x in outcomes), ZERO) / (count - 1)
            steps_variance = sum(((run.steps - mean_steps) ** 2 for run in finished), ZERO) / (count - 1)
        else:
            variance = steps_variance = ZERO
    return SampleReport(
        samples=n,
        terminated=count,
        step_capped=n - count,
        mean_outcome=mean_outcome if var is not None else None,
        mean_steps=mean_steps,
        outcome_variance=variance if var is not None else None,
        steps_variance=steps_variance,
        seed=seed,
    )


def format_report(report: SampleReport) -> str:
    """key=value lines, rationals as INT/INT"""
    def rational(value: Optional[Fraction]) -> str:
        return "none" if value is None else str(value)

    lines = [
        f"samples={report.samples}",
        f"terminated={report.terminated}",
        f"step_capped={report.step_capped}",
        f"terminated_fraction={report.terminated_fraction}",
        f"mean_outcome={rational(report.mean_outcome)}",
        f"outcome_variance={rational(report.outcome_variance)}",
        f"mean_steps={rational(report.mean_steps)}",
        f"steps_variance={rational(report.steps_variance)}",
        f"seed={report.seed}",
    ]
    return "\n".join(lines) + "\n"
