# vim: set ai ts=4 sw=4 expandtab:
# pylint: disable=C0116
'''
Expected-cost analysis.

  - pcost: expected accumulated cost plus post-potential of the main value
  - adequacy_check: the three clauses on n-step truncations
  - solve_expected_cost: exact expected total cost on a scheduled graph
  - check_certificate: local verification of a potential assignment
  - composition_check: the bind composition inequality
'''

import enum
import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import sympy
from sympy.utilities.iterables import strongly_connected_components

from phlcost import syntax as s
from phlcost.errors import CertificateError, GraphError, MissingNodePotential, \
    ParseError
from phlcost.execution import Config, iter_step_n, stuck_threads
from phlcost.grammar import parse_program
from phlcost.semantics import eval_pure, redex_of, values_equal
from phlcost.support import rational, rational_str


class PostPotential:
    '''Cost budget for the main thread's final value: first matching
    pattern wins, otherwise the default.

    :param cases: List of (Value, Fraction), non-negative.
    :param default: Fraction for values matching no case.
    '''

    def __init__(self, cases=(), default=Fraction(0)):
        self.cases = [(pattern, Fraction(value)) for pattern, value in cases]
        self.default = Fraction(default)
        assert self.default >= 0
        assert all(value >= 0 for _, value in self.cases)

    def __call__(self, value: s.Value) -> Fraction:
        for pattern, amount in self.cases:
            if values_equal(value, pattern):
                return amount
        return self.default

    def __repr__(self):
        return f'PostPotential({self.cases!r}, default={self.default})'

    def to_json(self) -> list:
        '''The case list; certificates write the default beside it.'''
        return [{'pattern': s.pretty(p), 'value': rational_str(v)}
                for p, v in self.cases]

    @classmethod
    def from_json(cls, cases, default='0') -> 'PostPotential':
        '''
        :param cases: List of {"pattern", "value"}, or None.
        :param default: Rational for values matching no pattern.
        :raises CertificateError: on a pattern that is not a value or a
            negative amount.'''
        if cases is not None and not isinstance(cases, list):
            raise CertificateError('malformed certificate: post must be a list')
        parsed = []
        for case in cases or ():
            try:
                pattern = eval_pure(parse_program(case['pattern']))
            except ParseError as exc:
                raise CertificateError(f'pattern {case["pattern"]}: {exc}') from exc
            if pattern is None:
                raise CertificateError(f'pattern {case["pattern"]} is not a value')
            parsed.append((pattern, rational(case['value'])))
        default = rational(default)
        if default < 0 or any(value < 0 for _, value in parsed):
            raise CertificateError('post-potential must be non-negative')
        return cls(parsed, default)


ZERO_POST = PostPotential()


@dataclass
class PotentialCertificate:
    '''Potential per graph node, a post-potential and the claimed bound.'''
    node_potentials: dict
    claimed_bound: Fraction
    post: PostPotential = field(default_factory=PostPotential)

    def potential(self, node: int) -> Fraction:
        value = self.node_potentials.get(node)
        if value is None:
            raise MissingNodePotential(node)
        return value

    def to_json(self) -> dict:
        return {'bound': rational_str(self.claimed_bound),
                'post': self.post.to_json(),
                'default': rational_str(self.post.default),
                'nodes': {str(k): rational_str(v)
                          for k, v in sorted(self.node_potentials.items())}}

    @classmethod
    def from_json(cls, obj) -> 'PotentialCertificate':
        try:
            nodes = {int(k): rational(v) for k, v in obj['nodes'].items()}
            bound = rational(obj['bound'])
            post = PostPotential.from_json(obj.get('post'),
                obj.get('default', '0'))
        except (KeyError, ValueError, TypeError, AttributeError,
                AssertionError, ZeroDivisionError) as exc:
            raise CertificateError(f'malformed certificate: {exc!r}') from exc
        return cls(nodes, bound, post)

    @classmethod
    def load(cls, path) -> 'PotentialCertificate':
        with open(path, 'r', encoding='utf-8') as cert_file:
            try:
                obj = json.load(cert_file)
            except json.JSONDecodeError as exc:
                raise CertificateError(f'{path}: {exc}') from exc
        return cls.from_json(obj)


def config_pcost(cfg: Config, post=ZERO_POST) -> Fraction:
    main = cfg.main_value()
    return cfg.cost + (post(main) if main is not None else Fraction(0))


def pcost(mu, post=ZERO_POST) -> Fraction:
    '''Expected cost plus post-potential of whichever main values exist.'''
    return mu.expect(lambda cfg: config_pcost(cfg, post))


@dataclass
class AdequacyReport:
    '''Outcome of the three adequacy clauses after a fixed number of steps.'''
    steps: int
    expected_cost: Fraction
    bound: Fraction
    postcondition_ok: bool = True
    counterexample: Optional[str] = None
    progress_ok: bool = True
    stuck_config: Optional[dict] = None

    @property
    def bound_ok(self) -> bool:
        return self.expected_cost <= self.bound

    @property
    def ok(self) -> bool:
        return self.postcondition_ok and self.progress_ok and self.bound_ok

    def to_json(self) -> dict:
        return {'steps': self.steps,
                'pcost': rational_str(self.expected_cost),
                'bound': rational_str(self.bound),
                'bound_ok': self.bound_ok,
                'postcondition_ok': self.postcondition_ok,
                'counterexample': self.counterexample,
                'progress_ok': self.progress_ok,
                'stuck_config': self.stuck_config}


def _holds(phi, value) -> bool:
    if phi is None:
        return True
    result = eval_pure(s.App(phi, value))
    return isinstance(result, s.BoolV) and result.b


def _report(mu, steps, bound, post, phi) -> AdequacyReport:
    report = AdequacyReport(steps, pcost(mu, post), Fraction(bound))
    for cfg in mu.support():
        main = cfg.main_value()
        if report.postcondition_ok and main is not None and not _holds(phi, main):
            report.postcondition_ok = False
            report.counterexample = s.pretty(main)
        stuck = stuck_threads(cfg)
        if report.progress_ok and stuck:
            report.progress_ok = False
            thread = cfg.threads[stuck[0]]
            report.stuck_config = dict(cfg.to_json(), thread=stuck[0],
                redex=s.pretty(redex_of(thread)),
                redex_kind=type(redex_of(thread)).__name__)
    return report


def adequacy_sweep(expr: s.Expr, bound, post=ZERO_POST, phi=None, steps=0,
        scheduler=None, max_support=None):
    '''Reports for every truncation 0..steps, computed incrementally.'''
    reports = []
    for count, mu in enumerate(iter_step_n(Config.initial(expr), scheduler,
            max_support)):
        reports.append(_report(mu, count, bound, post, phi))
        if count == steps:
            break
    return reports


def adequacy_check(expr: s.Expr, bound, post=ZERO_POST, phi=None, steps=0,
        scheduler=None, max_support=None) -> AdequacyReport:
    '''Check postcondition, progress and pcost <= bound after steps steps.

    :param phi: Closed predicate expression applied to the main value, or
        None for the trivial predicate.'''
    report = adequacy_sweep(expr, bound, post, phi, steps, scheduler,
        max_support)[-1]
    logging.debug('adequacy_check: steps=%d pcost=%s ok=%s', steps,
        report.expected_cost, report.ok)
    return report


class Verdict(enum.Enum):
    '''Nodes with no finite expected cost.'''
    NONTERMINATING = 'nonterminating'
    STUCK_REACHABLE = 'stuck-reachable'


@dataclass
class ExpectedCost:
    '''Exact expected total cost per node, or why there is none.'''
    values: dict
    nonterminating: set
    stuck_reachable: set
    initial: int = 0

    def at(self, node: int):
        if node in self.stuck_reachable:
            return Verdict.STUCK_REACHABLE
        if node in self.nonterminating:
            return Verdict.NONTERMINATING
        return self.values[node]

    @property
    def initial_value(self):
        return self.at(self.initial)


def _reverse_reach(targets, predecessors):
    reached = set(targets)
    stack = list(targets)
    while stack:
        node = stack.pop()
        for pred in predecessors.get(node, ()):
            if pred not in reached:
                reached.add(pred)
                stack.append(pred)
    return reached


def _fraction(value) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


def _solve(graph, absorbing: dict) -> ExpectedCost:
    '''Expected cost until absorption, absorbing nodes paying their value.

    Bottom SCCs that do not absorb make every node reaching them
    nonterminating; the remaining SCCs are solved exactly, sinks first.'''
    # pylint: disable=R0912,R0914
    live = [n.ident for n in graph.nodes if n.ident not in absorbing]
    for ident in live:
        if len(graph.actions[ident]) > 1:
            raise GraphError(f'node {ident} has {len(graph.actions[ident])} '
                'actions; fix a scheduler')
    edges = []
    predecessors = {}
    for ident in live:
        for to in graph.successors(ident):
            edges.append((ident, to))
            predecessors.setdefault(to, set()).add(ident)

    stuck = [n.ident for n in graph.nodes if n.stuck]
    stuck_reachable = _reverse_reach(stuck, predecessors)

    vertices = [n.ident for n in graph.nodes]
    components = strongly_connected_components((vertices, edges))
    component_of = {}
    for index, comp in enumerate(components):
        for ident in comp:
            component_of[ident] = index
    traps = []
    for comp in components:
        if any(ident in absorbing for ident in comp):
            continue
        exits = any(component_of[to] != component_of[comp[0]]
                    for ident in comp for to in graph.successors(ident))
        if not exits:
            traps.extend(comp)
    nonterminating = _reverse_reach(traps, predecessors) - stuck_reachable
    bad = stuck_reachable | nonterminating
    logging.debug('_solve: %d components, %d nonterminating, %d stuck-reachable',
        len(components), len(nonterminating), len(stuck_reachable))

    values = {ident: Fraction(value) for ident, value in absorbing.items()
              if ident not in bad}
    # Components arrive sinks first.
    for members in components:
        comp = [i for i in members if i not in absorbing and i not in bad]
        if comp:
            _solve_component(graph, comp, values)
    return ExpectedCost(values, nonterminating, stuck_reachable, graph.initial)


def _solve_component(graph, comp, values):
    members = set(comp)
    action_of = {i: graph.actions[i][0] for i in comp}
    cyclic = len(comp) > 1 or any(
        to == comp[0] for to in graph.successors(comp[0]))
    if not cyclic:
        action = action_of[comp[0]]
        values[comp[0]] = action.edges.expect(
            lambda edge: edge[1] + values[edge[0]])
        return
    position = {ident: k for k, ident in enumerate(comp)}
    size = len(comp)
    matrix = sympy.zeros(size, size)
    rhs = sympy.zeros(size, 1)
    for ident in comp:
        row = position[ident]
        matrix[row, row] += 1
        for (to, cost), prob in action_of[ident].edges:
            prob_s = sympy.Rational(prob.numerator, prob.denominator)
            total = sympy.Rational(cost.numerator, cost.denominator) * prob_s
            rhs[row, 0] += total
            if to in members:
                matrix[row, position[to]] -= prob_s
            else:
                after = values[to]
                rhs[row, 0] += prob_s * sympy.Rational(after.numerator,
                    after.denominator)
    solution = matrix.LUsolve(rhs)
    for ident in comp:
        values[ident] = _fraction(solution[position[ident], 0])


def terminal_rewards(graph, post=ZERO_POST) -> dict:
    return {n.ident: post(n.main_value()) for n in graph.nodes if n.terminal}


def solve_expected_cost(graph, post=ZERO_POST) -> ExpectedCost:
    '''Exact expected total cost from every node of a scheduled graph.

    :raises GraphError: when a node has more than one action.'''
    return _solve(graph, terminal_rewards(graph, post))


@dataclass
class Violation:
    '''One failed certificate inequality.'''
    kind: str
    node: int
    lhs: Fraction
    rhs: Fraction
    thread: Optional[int] = None

    def to_json(self) -> dict:
        return {'kind': self.kind, 'node': self.node, 'thread': self.thread,
                'lhs': rational_str(self.lhs), 'rhs': rational_str(self.rhs)}


@dataclass
class CheckReport:
    '''Result of check_certificate.'''
    violations: list
    nodes_checked: int = 0
    actions_checked: int = 0

    @property
    def accepted(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {'accepted': self.accepted,
                'nodes_checked': self.nodes_checked,
                'actions_checked': self.actions_checked,
                'violations': [v.to_json() for v in self.violations]}


def check_certificate(graph, cert: PotentialCertificate) -> CheckReport:
    '''Verify a certificate against every action of every node.

    For each node: potential >= 0, no stuck thread, post(main value) <=
    potential when the main thread is a value, and for every action the
    expected step cost plus successor potential is <= potential. The
    initial potential must not exceed the claimed bound.

    :raises MissingNodePotential: when a node has no potential.'''
    report = CheckReport([])
    for node in graph.nodes:
        phi = cert.potential(node.ident)
        report.nodes_checked += 1
        if phi < 0:
            report.violations.append(Violation('negative', node.ident, phi,
                Fraction(0)))
        if node.stuck:
            report.violations.append(Violation('stuck', node.ident, phi, phi,
                node.stuck[0]))
        main = node.main_value()
        if main is not None and cert.post(main) > phi:
            report.violations.append(Violation('value', node.ident,
                cert.post(main), phi))
        for action in graph.actions[node.ident]:
            report.actions_checked += 1
            lhs = action.edges.expect(
                lambda edge: edge[1] + cert.potential(edge[0]))
            if lhs > phi:
                report.violations.append(Violation('step', node.ident, lhs,
                    phi, action.thread))
    start = cert.potential(graph.initial)
    if start > cert.claimed_bound:
        report.violations.append(Violation('bound', graph.initial, start,
            cert.claimed_bound))
    logging.info('check_certificate: %d nodes, %d violations',
        report.nodes_checked, len(report.violations))
    return report


def certificate_from_solution(solution: ExpectedCost, post=ZERO_POST,
        bound=None) -> PotentialCertificate:
    '''Exact expected costs as a certificate (tight at every node).'''
    missing = solution.nonterminating | solution.stuck_reachable
    if missing:
        raise CertificateError(f'{len(missing)} nodes have no finite cost')
    start = solution.values[solution.initial]
    return PotentialCertificate(dict(solution.values),
        start if bound is None else Fraction(bound), post)


def extend_certificate(graph, anchors: dict, post=ZERO_POST,
        bound=None) -> PotentialCertificate:
    '''Complete potentials given at anchor nodes.

    Every other node gets the expected cost to reach the next anchor or
    terminal node plus that node's potential. The anchors' own
    inequalities are left to check_certificate.

    :param anchors: node -> Fraction.
    :raises CertificateError: when some node never reaches an anchor.'''
    absorbing = terminal_rewards(graph, post)
    absorbing.update({k: Fraction(v) for k, v in anchors.items()})
    solution = _solve(graph, absorbing)
    return certificate_from_solution(solution, post, bound)


@dataclass
class CompositionReport:
    '''Both sides of the bind composition inequality.'''
    premise: bool
    lhs: Fraction
    rhs: Fraction

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs


def composition_check(mu, kappa, potential, post=ZERO_POST) -> CompositionReport:
    '''Check the bind composition inequality.

    :param mu: Dist over Config.
    :param kappa: Config -> Dist over Config (continuing from that config).
    :param potential: Config -> Fraction, the per-start budget.
    :return CompositionReport: holds is the conclusion; it is True whenever
        premise is.'''
    premise = all(pcost(kappa(cfg), post) <= cfg.cost + Fraction(potential(cfg))
                  for cfg in mu.support())
    lhs = pcost(mu.bind(kappa), post)
    rhs = mu.expect(lambda cfg: cfg.cost) + mu.expect(potential)
    return CompositionReport(premise, lhs, rhs)
