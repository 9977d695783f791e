# vim: set ai ts=4 sw=4 expandtab:

'''Test environment setup for Behave test steps.'''

import logging
import os
import sys
import tempfile

from behave import fixture, use_fixture

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..'))
sys.path.insert(0, os.path.dirname(__file__))

# pylint: disable=C0413
import testprograms as tp


@fixture
def work_dir(context):
    '''Scratch directory for certificates written during a scenario.'''
    with tempfile.TemporaryDirectory() as path:
        logging.debug('work_dir: %s', path)
        context.work_dir = path
        yield path


@fixture
def programs(context):
    '''Provide the program corpus for tests.'''
    context.programs = tp.PROGRAMS
    yield context.programs


def before_scenario(context, scenario):
    '''Set up test context and skip marked scenarios.'''
    # Skip all scenarios tagged with @skip
    if 'skip' in scenario.effective_tags:
        scenario.skip('Marked with @skip')
        return

    use_fixture(work_dir, context)
    use_fixture(programs, context)
    context.status = None
    context.stdout = ''
    context.stderr = ''
