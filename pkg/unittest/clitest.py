# vim: set ai ts=4 sw=4 expandtab:

import contextlib
import io
import json
import os
import tempfile
import unittest

from assertpy import assert_that

from phlgen import program_path, read_expected
from phlcost.cli import EXIT_FAILED, EXIT_LIMIT, EXIT_OK, EXIT_PARSE, main


def run_cli(*argv):
    '''Run main in-process; returns (status, stdout, stderr).'''
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        status = main(list(argv))
    return status, out.getvalue(), err.getvalue()


class TestCli(unittest.TestCase):
    """ Command line behaviour and exit codes. """

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def write(self, name, text):
        path = os.path.join(self.tmp.name, name)
        with open(path, 'w', encoding='utf-8') as out:
            out.write(text)
        return path

    def test_parse(self):
        status, out, _ = run_cli('parse', program_path('coin_toss.phl'))
        self.assertEqual(status, EXIT_OK)
        assert_that(out).starts_with('let toss := rec toss _ :=')

    def test_parse_error(self):
        path = self.write('bad.phl', 'let x := in x')
        status, _, err = run_cli('parse', path)
        self.assertEqual(status, EXIT_PARSE)
        assert_that(err).contains('parse error').contains('1:')

    def test_unbound_is_parse_error(self):
        path = self.write('free.phl', 'x + 1')
        status, _, err = run_cli('expect', path)
        self.assertEqual(status, EXIT_PARSE)
        assert_that(err).contains('unbound variable x')

    def test_bad_scheduler(self):
        for text in ('bogus', 'fixed:', 'fixed:a'):
            status, _, err = run_cli('expect', '--scheduler', text,
                program_path('coin_toss.phl'))
            self.assertEqual(status, EXIT_PARSE, text)
            assert_that(err).contains('scheduler')

    def test_missing_file(self):
        status, _, _ = run_cli('parse', os.path.join(self.tmp.name, 'none.phl'))
        self.assertEqual(status, EXIT_FAILED)

    def test_expect_json(self):
        status, out, _ = run_cli('expect', '--json',
            program_path('coin_toss.phl'))
        self.assertEqual(status, EXIT_OK)
        result = json.loads(out)
        assert_that(result).contains_entry({'verdict': 'finite'}) \
            .contains_entry({'expected_cost': '2'}) \
            .contains_entry({'decimal': 2.0})
        assert_that(result['nodes']).is_less_than_or_equal_to(12)

    def test_expect_text(self):
        status, out, _ = run_cli('expect', program_path('coin_toss.phl'))
        self.assertEqual(status, EXIT_OK)
        self.assertEqual(out, 'expected cost: 2 (= 2.0)\n')

    def test_check_certificate_file_format(self):
        program = program_path('coin_toss.phl')
        emitted = os.path.join(self.tmp.name, 'emitted.json')
        self.assertEqual(run_cli('expect', '--emit-cert', emitted, program)[0],
            EXIT_OK)
        with open(emitted, 'r', encoding='utf-8') as cert_file:
            nodes = json.load(cert_file)['nodes']
        cert = self.write('coin.json', json.dumps({
            'bound': '2',
            'post': [{'pattern': '()', 'value': '0'}],
            'default': '0',
            'nodes': nodes}))
        status, out, err = run_cli('check', '--scheduler', 'leftmost',
            '--cert', cert, program)
        self.assertEqual(status, EXIT_OK, err)
        assert_that(out).ends_with('accepted\n')

        shaped = self.write('shaped.json', json.dumps({
            'bound': '2', 'post': {'cases': []}, 'nodes': nodes}))
        status, _, err = run_cli('check', '--cert', shaped, program)
        self.assertEqual(status, EXIT_FAILED)
        assert_that(err).contains('malformed certificate')

    def test_expect_bound(self):
        status, out, _ = run_cli('expect', '--json', '--bound', '2*m/p',
            '--var', 'm=4', '--var', 'p=1/2', program_path('counter.phl'))
        self.assertEqual(status, EXIT_OK)
        result = json.loads(out)
        self.assertEqual(result['expected_cost'], '14')
        self.assertEqual(result['bound'], 16.0)
        self.assertTrue(result['bound_ok'])

    def test_expect_bound_violated(self):
        status, out, _ = run_cli('expect', '--bound', '10',
            program_path('counter.phl'))
        self.assertEqual(status, EXIT_FAILED)
        assert_that(out).contains('VIOLATED')

    def test_expect_define(self):
        status, out, _ = run_cli('expect', '--json', '--define', 'm=2',
            program_path('counter.phl'))
        self.assertEqual(status, EXIT_OK)
        self.assertEqual(json.loads(out)['expected_cost'], '6')

    def test_expect_stuck(self):
        status, out, _ = run_cli('expect', '--json',
            program_path(os.path.join('stuck', 'use_after_free.phl')))
        self.assertEqual(status, EXIT_FAILED)
        self.assertEqual(json.loads(out)['verdict'], 'stuck-reachable')

    def test_expect_node_limit(self):
        status, _, err = run_cli('expect', '--max-nodes', '500',
            program_path('qsort_recurse_pivot.phl'))
        self.assertEqual(status, EXIT_LIMIT)
        assert_that(err).contains('resource limit')

    def test_emit_and_check_certificate(self):
        cert = os.path.join(self.tmp.name, 'coin.cert.json')
        program = program_path('coin_toss.phl')
        status, _, _ = run_cli('expect', '--emit-cert', cert, program)
        self.assertEqual(status, EXIT_OK)
        status, out, _ = run_cli('check', '--json', '--cert', cert, program)
        self.assertEqual(status, EXIT_OK)
        self.assertTrue(json.loads(out)['accepted'])

        with open(cert, 'r', encoding='utf-8') as cert_file:
            obj = json.load(cert_file)
        obj['bound'] = '3/2'
        tampered = self.write('tampered.json', json.dumps(obj))
        status, out, _ = run_cli('check', '--cert', tampered, program)
        self.assertEqual(status, EXIT_FAILED)
        assert_that(out).contains('bound at node 0').ends_with('rejected\n')

        del obj['nodes']['0']
        missing = self.write('missing.json', json.dumps(obj))
        status, _, err = run_cli('check', '--cert', missing, program)
        self.assertEqual(status, EXIT_FAILED)
        assert_that(err).contains('no potential for node 0')

    def test_check_malformed_certificate(self):
        cert = self.write('cert.json', '{"nodes": ')
        status, _, _ = run_cli('check', '--cert', cert,
            program_path('coin_toss.phl'))
        self.assertEqual(status, EXIT_FAILED)

    def test_sample(self):
        status, out, _ = run_cli('sample', '--json', '--trials', '200',
            '--seed', '4', program_path('coin_toss.phl'))
        self.assertEqual(status, EXIT_OK)
        result = json.loads(out)
        assert_that(result).contains_key('mean_cost', 'ci95',
            'truncated_fraction', 'sample_stddev')
        self.assertEqual(result['trials'], 200)

    def test_sample_needs_two_trials(self):
        status, _, err = run_cli('sample', '--trials', '1',
            program_path('coin_toss.phl'))
        self.assertEqual(status, EXIT_PARSE)
        assert_that(err).contains('--trials')


    def test_run(self):
        status, out, _ = run_cli('run', '--seed', '1',
            program_path('coin_toss.phl'))
        self.assertEqual(status, EXIT_OK)
        assert_that(out).contains('result: ()').contains('terminated=True')
        status, _, _ = run_cli('run', program_path(os.path.join('stuck',
            'add_bool.phl')))
        self.assertEqual(status, EXIT_FAILED)

    def test_graph(self):
        status, out, _ = run_cli('graph', '--scheduler', 'leftmost',
            program_path('coin_toss.phl'))
        self.assertEqual(status, EXIT_OK)
        graph = json.loads(out)
        self.assertEqual(graph['initial'], 0)
        assert_that(graph['nodes']).is_length(
            read_expected('coin_toss.phl')['graph_nodes'])
        assert_that(len(graph['nodes'])).is_less_than_or_equal_to(12)
        assert_that(graph['nodes'][0]).contains_key('id', 'threads', 'heap',
            'terminal', 'stuck', 'main_value')
        self.assertEqual(graph['nodes'][0]['id'], 0)
        self.assertIs(graph['nodes'][0]['stuck'], False)
        # One action per node, except the terminal one.
        assert_that(graph['actions']).is_length(len(graph['nodes']) - 1)
        action = graph['actions'][0]
        assert_that(action).contains_key('node', 'thread', 'edges')
        assert_that(action['edges'][0]).contains_key('to', 'prob', 'cost')
        choices = [a for a in graph['actions'] if len(a['edges']) == 2]
        assert_that(choices).is_length(1)
        self.assertEqual([e['prob'] for e in choices[0]['edges']], ['1/2', '1/2'])

    def test_adequacy(self):
        program = program_path('toss_then_tick.phl')
        status, out, _ = run_cli('adequacy', '--json', '--p', '2',
            '--steps', '60', '--sweep', program)
        self.assertEqual(status, EXIT_OK)
        result = json.loads(out)
        self.assertTrue(result['ok'])
        assert_that(result['reports']).is_length(61)
        status, _, _ = run_cli('adequacy', '--p', '1', '--steps', '60', program)
        self.assertEqual(status, EXIT_FAILED)

    def test_adequacy_support_limit(self):
        status, _, _ = run_cli('adequacy', '--p', '100', '--steps', '200',
            '--max-support', '3', program_path('toss_then_tick.phl'))
        self.assertEqual(status, EXIT_LIMIT)


if __name__ == '__main__':
    unittest.main()
