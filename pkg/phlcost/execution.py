# vim: set ai ts=4 sw=4 expandtab:
# pylint: disable=C0116
'''
Thread-pool execution: configurations, schedulers, n-step distributions
and exploration of the reachable configuration graph.
'''

import enum
import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from phlcost import config
from phlcost import syntax as s
from phlcost.dist import Dist, dirac
from phlcost.errors import NodeLimitExceeded, ParseError, SupportLimitExceeded
from phlcost.semantics import EMPTY_HEAP, Heap, prim_step
from phlcost.support import rational_str


@dataclass(frozen=True)
class Config:
    '''Thread pool, heap and accumulated cost. Thread 0 is main.'''
    threads: tuple
    heap: Heap
    cost: Fraction = Fraction(0)

    @classmethod
    def initial(cls, expr: s.Expr) -> 'Config':
        return cls((expr,), EMPTY_HEAP, Fraction(0))

    def main_value(self) -> Optional[s.Value]:
        return s.to_val(self.threads[0])

    def is_final(self) -> bool:
        '''Every thread is a value.'''
        return all(isinstance(t, s.Value) for t in self.threads)

    def to_json(self) -> dict:
        return {'threads': [s.pretty(t) for t in self.threads],
                'heap': self.heap.to_json(),
                'cost': rational_str(self.cost)}


class Policy(enum.Enum):
    '''How a scheduler picks the next thread.'''
    LEFTMOST = 'leftmost'
    ROUND_ROBIN = 'round-robin'
    FIXED = 'fixed'


class Scheduler:
    '''Deterministic thread choice with a small explicit state.

    The state is an int: unused for leftmost, the rotating cursor for
    round-robin, the position in the list for fixed.'''

    def __init__(self, policy=Policy.LEFTMOST, order=None):
        assert isinstance(policy, Policy)
        self.policy = policy
        self.order = tuple(order or ())
        if policy == Policy.FIXED:
            assert self.order, 'fixed scheduler needs a thread list'

    def __repr__(self):
        if self.policy == Policy.FIXED:
            return f'Scheduler(fixed:{",".join(map(str, self.order))})'
        return f'Scheduler({self.policy.value})'

    @classmethod
    def parse(cls, text: str) -> 'Scheduler':
        '''"leftmost", "round-robin" or "fixed:0,1,0".'''
        text = text.strip()
        if text.startswith('fixed:'):
            fields = [i.strip() for i in text[len('fixed:'):].split(',')]
            if not all(i.isdigit() for i in fields):
                raise ParseError(f'bad scheduler {text!r}, expected fixed:i,j,...')
            return cls(Policy.FIXED, [int(i) for i in fields])
        try:
            policy = Policy(text)
        except ValueError as exc:
            raise ParseError(f'unknown scheduler {text!r}') from exc
        if policy == Policy.FIXED:
            raise ParseError('fixed scheduler needs a thread list')
        return cls(policy)

    def initial_state(self) -> int:
        return 0

    def select(self, reducible, nthreads, state):
        '''Pick a reducible thread.

        :param reducible: Sorted indices of reducible threads.
        :param nthreads: Size of the pool.
        :param state: Scheduler state before the step.
        :return tuple: (thread index or None, next state)'''
        if not reducible:
            return None, state
        if self.policy == Policy.LEFTMOST:
            return reducible[0], 0
        if self.policy == Policy.ROUND_ROBIN:
            cursor = state % nthreads
            for offset in range(nthreads):
                index = (cursor + offset) % nthreads
                if index in reducible:
                    return index, index + 1
            return reducible[0], reducible[0] + 1
        wanted = self.order[state % len(self.order)]
        chosen = wanted if wanted in reducible else reducible[0]
        return chosen, (state + 1) % len(self.order)


LEFTMOST = Scheduler()


def _reducible_threads(cfg: Config):
    return [i for i, t in enumerate(cfg.threads)
            if prim_step(t, cfg.heap) is not None]


def stuck_threads(cfg: Config):
    '''Indices of threads that are neither values nor reducible.'''
    return [i for i, t in enumerate(cfg.threads)
            if not isinstance(t, s.Value) and prim_step(t, cfg.heap) is None]


def tp_step(cfg: Config, index: int) -> Optional[Dist]:
    '''Step thread index; forked threads are appended to the pool.

    :return: Dist over Config, or None when the thread cannot step.'''
    assert 0 <= index < len(cfg.threads)
    mu = prim_step(cfg.threads[index], cfg.heap)
    if mu is None:
        return None
    threads = cfg.threads

    def successor(outcome):
        pool = threads[:index] + (outcome.reduct,) + threads[index + 1:] \
            + tuple(outcome.forks)
        return Config(pool, outcome.heap, cfg.cost + outcome.cost)
    return mu.map(successor)


def iter_step_n(cfg: Config, scheduler=None, max_support=None):
    '''Yield the distributions after 0, 1, 2, ... scheduled steps.

    Configurations with no reducible thread are absorbing.
    :raises SupportLimitExceeded: when a distribution outgrows max_support.'''
    scheduler = scheduler or LEFTMOST
    max_support = config.MAX_SUPPORT if max_support is None else max_support
    mu = dirac((cfg, scheduler.initial_state()))

    def step(pair):
        current, state = pair
        reducible = _reducible_threads(current)
        index, state2 = scheduler.select(reducible, len(current.threads), state)
        if index is None:
            return dirac(pair)
        return tp_step(current, index).map(lambda c: (c, state2))

    while True:
        yield mu.map(lambda pair: pair[0])
        mu = mu.bind(step)
        if len(mu) > max_support:
            logging.warning('iter_step_n: support %d over limit %d',
                len(mu), max_support)
            raise SupportLimitExceeded(f'support exceeded {max_support}')


def tp_step_n(cfg: Config, steps: int, scheduler=None, max_support=None) -> Dist:
    '''Distribution over configurations after steps scheduled steps.'''
    assert steps >= 0
    for count, mu in enumerate(iter_step_n(cfg, scheduler, max_support)):
        if count == steps:
            return mu
    raise AssertionError('unreachable')


def canonicalize(threads, heap: Heap):
    '''Rename allocation bases in order of first use.

    Bases are numbered by a walk over the threads, then over heap cells
    reachable from already-numbered bases, then over any remaining cells.
    The renamed heap's next fresh base is the number of bases seen.'''
    numbering = {}

    def visit(expr):
        for loc in s.locations(expr):
            if loc.base not in numbering:
                numbering[loc.base] = len(numbering)

    for thread in threads:
        visit(thread)
    by_base = {}
    for loc, value in heap.items():
        by_base.setdefault(loc.base, []).append((loc, value))
    done = 0
    order = list(numbering)
    while True:
        while done < len(order):
            for _, value in by_base.get(order[done], ()):
                visit(value)
                for base in numbering:
                    if base not in order:
                        order.append(base)
            done += 1
        rest = [b for b in sorted(by_base) if b not in numbering]
        if not rest:
            break
        numbering[rest[0]] = len(numbering)
        order.append(rest[0])
    if all(old == new for old, new in numbering.items()) \
            and heap.next_base == len(numbering):
        return tuple(threads), heap

    def rename(loc):
        return s.Loc(numbering[loc.base], loc.offset)
    threads2 = tuple(s.map_locations(t, rename) for t in threads)
    cells = {rename(loc): s.map_locations(v, rename) for loc, v in heap.items()}
    return threads2, Heap(cells, len(numbering))


@dataclass
class Node:
    '''Graph node: a canonical configuration with zero accumulated cost.'''
    ident: int
    config: Config
    sched_state: Optional[int]
    terminal: bool
    stuck: tuple

    def main_value(self):
        return self.config.main_value()

    def to_json(self) -> dict:
        main = self.main_value()
        record = self.config.to_json()
        del record['cost']
        record.update({'id': self.ident,
                       'terminal': self.terminal,
                       'stuck': bool(self.stuck),
                       'stuck_threads': list(self.stuck),
                       'main_value': None if main is None else s.pretty(main)})
        return record


@dataclass
class Action:
    '''Stepping one thread of a node: edges to (successor, step cost).'''
    node: int
    thread: int
    edges: Dist

    def expected_cost(self) -> Fraction:
        return self.edges.expect(lambda edge: edge[1])

    def to_json(self) -> dict:
        return {'node': self.node,
                'thread': self.thread,
                'edges': [{'to': to, 'prob': rational_str(p),
                           'cost': rational_str(c)}
                          for (to, c), p in self.edges]}


class Explorer:
    '''Lazily explored configuration graph.

    Nodes are interned on first sight and numbered in discovery order;
    actions are computed once per node. With a scheduler each node has at
    most one action and the scheduler state is part of node identity.'''

    def __init__(self, scheduler=None, max_nodes=None):
        self.scheduler = scheduler
        self.max_nodes = config.MAX_NODES if max_nodes is None else max_nodes
        self.nodes = []
        self._index = {}
        self._actions = {}

    def intern(self, threads, heap, sched_state=None) -> int:
        threads, heap = canonicalize(threads, heap)
        key = (threads, heap, sched_state)
        ident = self._index.get(key)
        if ident is not None:
            return ident
        if len(self.nodes) >= self.max_nodes:
            logging.warning('Explorer:intern: node limit %d', self.max_nodes)
            raise NodeLimitExceeded(f'more than {self.max_nodes} nodes')
        ident = len(self.nodes)
        cfg = Config(threads, heap, Fraction(0))
        node = Node(ident, cfg, sched_state,
            terminal=cfg.is_final(), stuck=tuple(stuck_threads(cfg)))
        self.nodes.append(node)
        self._index[key] = ident
        return ident

    def start(self, expr: s.Expr) -> int:
        state = None if self.scheduler is None else self.scheduler.initial_state()
        return self.intern((expr,), EMPTY_HEAP, state)

    def actions(self, ident: int):
        cached = self._actions.get(ident)
        if cached is not None:
            return cached
        node = self.nodes[ident]
        cfg = node.config
        reducible = _reducible_threads(cfg)
        state2 = None
        if self.scheduler is None:
            chosen = reducible
        else:
            index, state2 = self.scheduler.select(reducible,
                len(cfg.threads), node.sched_state)
            chosen = [] if index is None else [index]
        result = []
        for index in chosen:
            edges = tp_step(cfg, index).map(
                lambda c, st=state2: (self.intern(c.threads, c.heap, st), c.cost))
            result.append(Action(ident, index, edges))
        self._actions[ident] = result
        return result


@dataclass
class ConfigGraph:
    '''Finite reachable graph; node 0 is the initial configuration.'''
    nodes: list
    actions: dict
    scheduler: Optional[Scheduler] = None
    initial: int = 0
    extra: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.nodes)

    def node(self, ident) -> Node:
        return self.nodes[ident]

    def successors(self, ident):
        return [to for action in self.actions[ident] for (to, _), _ in action.edges]

    def to_json(self) -> dict:
        return {'scheduler': None if self.scheduler is None else repr(self.scheduler),
                'initial': self.initial,
                'nodes': [n.to_json() for n in self.nodes],
                'actions': [a.to_json() for n in self.nodes
                            for a in self.actions[n.ident]]}


def explore_graph(expr: s.Expr, scheduler=None, max_nodes=None) -> ConfigGraph:
    '''Breadth-first exploration of every configuration reachable from expr.

    :param scheduler: None explores every reducible thread (demonic graph).
    :raises NodeLimitExceeded: when more than max_nodes nodes appear.'''
    explorer = Explorer(scheduler, max_nodes)
    start = explorer.start(expr)
    queue = deque([start])
    seen = {start}
    while queue:
        ident = queue.popleft()
        for action in explorer.actions(ident):
            for (to, _), _ in action.edges:
                if to not in seen:
                    seen.add(to)
                    queue.append(to)
    logging.info('explore_graph: %d nodes', len(explorer.nodes))
    actions = {n.ident: explorer.actions(n.ident) for n in explorer.nodes}
    return ConfigGraph(explorer.nodes, actions, scheduler)
