# vim: set ai ts=4 sw=4 expandtab:
# pylint: disable=C0116
'''
Command line: phlcost {parse,run,graph,expect,check,sample,adequacy} FILE

Exit status: 0 success, 1 failed check, 2 parse error, 3 resource limit.
'''

import argparse
import logging
import sys

from phlcost import config
from phlcost import syntax as s
from phlcost.analysis import PostPotential, PotentialCertificate, \
    Verdict, adequacy_sweep, certificate_from_solution, check_certificate, \
    solve_expected_cost
from phlcost.bound import bound_holds, eval_bound
from phlcost.errors import CertificateError, DomainError, \
    MissingNodePotential, ParseError, ResourceLimit
from phlcost.execution import LEFTMOST, Scheduler, explore_graph
from phlcost.grammar import apply_defines, parse_program
from phlcost.montecarlo import estimate, sample_run
from phlcost.support import dump_json, parse_assignment, rational, rational_str

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_PARSE = 2
EXIT_LIMIT = 3


def load_program(path, defines=()):
    '''Read, parse and apply --define rebindings.'''
    with open(path, 'r', encoding='utf-8') as source:
        expr = parse_program(source.read())
    replacements = {}
    for text in defines or ():
        pair = parse_assignment(text)
        if pair is None:
            raise ParseError(f'bad --define {text!r}, expected NAME=LITERAL')
        replacements[pair[0]] = parse_program(pair[1])
    return apply_defines(expr, replacements)


def _scheduler(args):
    if getattr(args, 'scheduler', None):
        return Scheduler.parse(args.scheduler)
    return None


def _bound_env(args):
    env = {}
    for text in args.var or ():
        pair = parse_assignment(text)
        if pair is None:
            raise ParseError(f'bad --var {text!r}, expected NAME=NUMBER')
        env[pair[0]] = rational(pair[1])
    return env


def _emit(args, obj, text):
    print(dump_json(obj) if args.json else text)


def cmd_parse(args) -> int:
    expr = load_program(args.file, args.define)
    _emit(args, {'program': s.pretty(expr)}, s.pretty(expr))
    return EXIT_OK


def cmd_run(args) -> int:
    expr = load_program(args.file, args.define)
    run = sample_run(expr, args.seed, args.max_steps,
        _scheduler(args) or LEFTMOST, trace=True)
    lines = [f'{r["step"]:>6} t{r["thread"]} {r["redex"]}'
             + (f'  +{r["cost"]}' if r['cost'] != '0' else '') for r in run.trace]
    main = run.config.main_value()
    lines.append(f'result: {"<running>" if main is None else s.pretty(main)}'
                 f' cost={rational_str(run.config.cost)}'
                 f' terminated={run.terminated} stuck={run.stuck}')
    _emit(args, run.to_json(), '\n'.join(lines))
    return EXIT_FAILED if run.stuck else EXIT_OK


def cmd_graph(args) -> int:
    expr = load_program(args.file, args.define)
    graph = explore_graph(expr, _scheduler(args), args.max_nodes)
    print(dump_json(graph.to_json()))
    return EXIT_OK


def cmd_expect(args) -> int:
    expr = load_program(args.file, args.define)
    graph = explore_graph(expr, _scheduler(args) or LEFTMOST, args.max_nodes)
    solution = solve_expected_cost(graph)
    value = solution.initial_value
    result = {'nodes': len(graph)}
    status = EXIT_OK
    if isinstance(value, Verdict):
        result.update(verdict=value.value, expected_cost=None, decimal=None)
        text = f'expected cost: {value.value}'
        status = EXIT_FAILED
    else:
        result.update(verdict='finite', expected_cost=rational_str(value),
            decimal=float(value))
        text = f'expected cost: {rational_str(value)} (= {float(value)})'
        if args.bound:
            limit = eval_bound(args.bound, _bound_env(args))
            holds = bound_holds(value, limit)
            result.update(bound=limit, bound_ok=holds)
            text += f'\nbound {args.bound} = {limit:.6g}: ' \
                f'{"holds" if holds else "VIOLATED"}'
            status = EXIT_OK if holds else EXIT_FAILED
        if args.emit_cert:
            cert = certificate_from_solution(solution)
            with open(args.emit_cert, 'w', encoding='utf-8') as cert_file:
                cert_file.write(dump_json(cert.to_json()) + '\n')
    _emit(args, result, text)
    return status


def cmd_check(args) -> int:
    expr = load_program(args.file, args.define)
    cert = PotentialCertificate.load(args.cert)
    graph = explore_graph(expr, _scheduler(args), args.max_nodes)
    try:
        report = check_certificate(graph, cert)
    except MissingNodePotential as exc:
        print(f'rejected: {exc}', file=sys.stderr)
        return EXIT_FAILED
    result = report.to_json()
    accepted = report.accepted
    if args.bound:
        limit = eval_bound(args.bound, _bound_env(args))
        result['bound_ok'] = bound_holds(cert.claimed_bound, limit)
        accepted = accepted and result['bound_ok']
    result['accepted'] = accepted
    lines = [f'{v.kind} at node {v.node}'
             + ('' if v.thread is None else f' thread {v.thread}')
             + f': {rational_str(v.lhs)} > {rational_str(v.rhs)}'
             for v in report.violations]
    lines.append('accepted' if accepted else 'rejected')
    _emit(args, result, '\n'.join(lines))
    return EXIT_OK if accepted else EXIT_FAILED


def cmd_sample(args) -> int:
    if args.trials < 2:
        raise ParseError(f'--trials must be at least 2, got {args.trials}')
    expr = load_program(args.file, args.define)
    report = estimate(expr, args.trials, args.seed, args.max_steps,
        _scheduler(args) or LEFTMOST)
    low, high = report.ci95
    _emit(args, report.to_json(),
        f'mean cost {report.mean_cost:.6f} (sd {report.sample_stddev:.6f}, '
        f'95% CI [{low:.6f}, {high:.6f}], truncated {report.truncated_fraction:.4f})')
    return EXIT_OK


def cmd_adequacy(args) -> int:
    expr = load_program(args.file, args.define)
    post = PostPotential((), rational(args.post_default))
    phi = parse_program(args.phi) if args.phi else None
    reports = adequacy_sweep(expr, rational(args.p), post, phi, args.steps,
        _scheduler(args) or LEFTMOST, args.max_support)
    shown = reports if args.sweep else reports[-1:]
    ok = all(r.ok for r in reports)
    lines = [f'n={r.steps:>4} pcost={rational_str(r.expected_cost)} '
             f'bound={"ok" if r.bound_ok else "FAIL"} '
             f'post={"ok" if r.postcondition_ok else "FAIL"} '
             f'progress={"ok" if r.progress_ok else "FAIL"}' for r in shown]
    _emit(args, {'ok': ok, 'reports': [r.to_json() for r in shown]},
        '\n'.join(lines))
    return EXIT_OK if ok else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='phlcost',
        description='Probabilistic HeapLang interpreter and expected-cost analyzer')
    parser.add_argument('-v', '--verbose', action='count', default=0,
        help='More logging (repeat for debug)')
    subparsers = parser.add_subparsers(dest='command', required=True)
    commands = []

    sub = subparsers.add_parser('parse', help='Parse and pretty-print')
    sub.set_defaults(main=cmd_parse)
    commands.append(sub)

    sub = subparsers.add_parser('run', help='Sample one execution with a trace')
    sub.set_defaults(main=cmd_run)
    sub.add_argument('--seed', type=int, default=0)
    sub.add_argument('--max-steps', type=int, default=config.MAX_STEPS)
    commands.append(sub)

    sub = subparsers.add_parser('graph', help='Dump the configuration graph as JSON')
    sub.set_defaults(main=cmd_graph)
    commands.append(sub)

    sub = subparsers.add_parser('expect', help='Exact expected total cost')
    sub.set_defaults(main=cmd_expect)
    sub.add_argument('--emit-cert', metavar='FILE',
        help='Write the exact solution as a certificate')
    commands.append(sub)

    sub = subparsers.add_parser('check', help='Check a potential certificate')
    sub.set_defaults(main=cmd_check)
    sub.add_argument('--cert', required=True, metavar='FILE')
    commands.append(sub)

    sub = subparsers.add_parser('sample', help='Monte Carlo estimate')
    sub.set_defaults(main=cmd_sample)
    sub.add_argument('--trials', type=int, default=10000)
    sub.add_argument('--seed', type=int, default=0)
    sub.add_argument('--max-steps', type=int, default=config.MAX_STEPS)
    commands.append(sub)

    sub = subparsers.add_parser('adequacy', help='Check truncated executions')
    sub.set_defaults(main=cmd_adequacy)
    sub.add_argument('--p', required=True, help='Claimed bound, rational')
    sub.add_argument('--steps', type=int, required=True)
    sub.add_argument('--sweep', action='store_true',
        help='Report every truncation up to --steps')
    sub.add_argument('--post-default', default='0')
    sub.add_argument('--phi', help='Predicate on the main value, e.g. "rec _ v := v = ()"')
    sub.add_argument('--max-support', type=int, default=config.MAX_SUPPORT)
    commands.append(sub)

    for sub in commands:
        sub.add_argument('file', help='Program source')
        sub.add_argument('--define', action='append', metavar='NAME=LITERAL',
            help='Rebind a top-level let')
        sub.add_argument('--scheduler', help='leftmost, round-robin or fixed:i,j,...')
        sub.add_argument('--json', action='store_true')
        if sub.get_default('main') in (cmd_graph, cmd_expect, cmd_check):
            sub.add_argument('--max-nodes', type=int, default=config.MAX_NODES)
        if sub.get_default('main') in (cmd_expect, cmd_check):
            sub.add_argument('--bound', help='Bound expression, e.g. "2*n"')
            sub.add_argument('--var', action='append', metavar='NAME=NUMBER')
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = {0: config.LOG_LEVEL, 1: 'INFO'}.get(args.verbose, 'DEBUG')
    logging.basicConfig(level=level)
    try:
        return args.main(args)
    except ParseError as exc:
        print(f'{args.file}: parse error: {exc}', file=sys.stderr)
        return EXIT_PARSE
    except ResourceLimit as exc:
        print(f'{args.file}: resource limit: {exc}', file=sys.stderr)
        return EXIT_LIMIT
    except (CertificateError, DomainError) as exc:
        print(f'{args.file}: {exc}', file=sys.stderr)
        return EXIT_FAILED
    except OSError as exc:
        print(f'phlcost: {exc}', file=sys.stderr)
        return EXIT_FAILED


if __name__ == '__main__':
    sys.exit(main())
