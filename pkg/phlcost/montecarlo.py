# vim: set ai ts=4 sw=4 expandtab:
# pylint: disable=C0116
'''
Monte Carlo estimation of expected cost.

Each trial draws from its own Philox stream keyed by (seed, trial), so a
trial's outcome does not depend on how many trials ran before it.
Sampling walks the lazily explored configuration graph; randomness is
only consumed where a step has more than one outcome.
'''

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from phlcost import config
from phlcost import syntax as s
from phlcost.execution import LEFTMOST, Config, Explorer
from phlcost.semantics import redex_of
from phlcost.support import rational_str

_MASK64 = (1 << 64) - 1
_UNIT_BITS = 53
Z95 = 1.959963984540054


def trial_generator(seed: int, trial: int) -> np.random.Generator:
    '''Counter-based stream for one trial.'''
    key = ((seed & _MASK64) << 64) | (trial & _MASK64)
    return np.random.Generator(np.random.Philox(key=key))


def draw_unit(generator: np.random.Generator) -> Fraction:
    '''Exact rational uniform on [0, 1) with 53 random bits.'''
    return Fraction(int(generator.integers(0, 1 << _UNIT_BITS)), 1 << _UNIT_BITS)


@dataclass
class SampleRun:
    '''One sampled execution.'''
    config: Config
    terminated: bool
    stuck: bool
    steps: int
    trace: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {'config': self.config.to_json(),
                'terminated': self.terminated,
                'stuck': self.stuck,
                'steps': self.steps,
                'trace': self.trace}


def _walk(explorer, start, generator, max_steps, trace=None):
    ident = start
    cost = Fraction(0)
    steps = 0
    while steps < max_steps:
        actions = explorer.actions(ident)
        if not actions:
            break
        action = actions[0]
        if action.edges.is_dirac():
            (succ, step_cost), _ = next(iter(action.edges))
        else:
            succ, step_cost = action.edges.pick(draw_unit(generator))
        if trace is not None:
            thread = explorer.nodes[ident].config.threads[action.thread]
            trace.append({'step': steps, 'thread': action.thread,
                          'redex': s.pretty(redex_of(thread)),
                          'cost': rational_str(step_cost)})
        cost += step_cost
        ident = succ
        steps += 1
    node = explorer.nodes[ident]
    return node, cost, steps


def sample_run(expr: s.Expr, seed: int, max_steps=None, scheduler=None,
        trial=0, trace=False, explorer=None) -> SampleRun:
    '''Follow one random execution under the scheduler.

    :return SampleRun: terminated is True when every thread finished
        within max_steps.'''
    max_steps = config.MAX_STEPS if max_steps is None else max_steps
    if explorer is None:
        explorer = Explorer(scheduler or LEFTMOST, max_nodes=math.inf)
    start = explorer.start(expr)
    records = [] if trace else None
    node, cost, steps = _walk(explorer, start, trial_generator(seed, trial),
        max_steps, records)
    final = Config(node.config.threads, node.config.heap, cost)
    return SampleRun(final, node.terminal, bool(node.stuck), steps,
        records or [])


@dataclass
class McReport:
    '''Summary of a Monte Carlo estimate; costs of truncated runs count
    what accumulated before the step limit.'''
    trials: int
    seed: int
    max_steps: int
    mean_cost: float
    sample_stddev: float
    ci95: tuple
    truncated_fraction: float
    stuck_fraction: float
    exact_mean: Fraction

    def contains(self, value) -> bool:
        low, high = self.ci95
        return low <= float(value) <= high

    def to_json(self) -> dict:
        return {'trials': self.trials,
                'seed': self.seed,
                'max_steps': self.max_steps,
                'mean_cost': self.mean_cost,
                'sample_stddev': self.sample_stddev,
                'ci95': list(self.ci95),
                'truncated_fraction': self.truncated_fraction,
                'stuck_fraction': self.stuck_fraction,
                'sample_mean_exact': rational_str(self.exact_mean)}


def estimate(expr: s.Expr, trials: int, seed: int, max_steps=None,
        scheduler=None) -> McReport:
    '''Mean cost over independent trials with a 95% confidence interval.'''
    assert trials >= 2
    max_steps = config.MAX_STEPS if max_steps is None else max_steps
    explorer = Explorer(scheduler or LEFTMOST, max_nodes=math.inf)
    start = explorer.start(expr)
    total = Fraction(0)
    squares = Fraction(0)
    truncated = stuck = 0
    for trial in range(trials):
        node, cost, _ = _walk(explorer, start, trial_generator(seed, trial),
            max_steps)
        total += cost
        squares += cost * cost
        if node.stuck:
            stuck += 1
        elif not node.terminal:
            truncated += 1
    mean = total / trials
    variance = (squares - total * total / trials) / (trials - 1)
    stddev = math.sqrt(float(variance))
    half = Z95 * stddev / math.sqrt(trials)
    logging.info('estimate: trials=%d mean=%f nodes=%d', trials, float(mean),
        len(explorer.nodes))
    return McReport(trials, seed, max_steps, float(mean), stddev,
        (float(mean) - half, float(mean) + half), truncated / trials,
        stuck / trials, mean)
