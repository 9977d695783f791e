'''Steps driving the phlcost command line in-process.'''
# vim: ts=4 sw=4 et ai

import contextlib
import io
import json
import os
import shlex
from fractions import Fraction

# pylint: disable=E0401,E0102,C0413
from phlcost.cli import main
import testprograms as tp

from assertpy import assert_that
from behave import given, when, then, step    # pylint: disable=E0611

# pylint: disable=W0613,C0116


def run_cli(context, argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        context.status = main(argv)
    context.stdout = out.getvalue()
    context.stderr = err.getvalue()


def expand(context, text):
    '''Replace {work} with the scenario scratch directory.'''
    return [arg.replace('{work}', context.work_dir) for arg in shlex.split(text)]


@given('the "{name}" program')
def step_impl(context, name):
    assert_that(context.programs).contains_key(name)
    context.program = name
    context.program_path = tp.program_path(name)
    assert os.path.isfile(context.program_path)


@given('a program file containing "{text}"')
def step_impl(context, text):
    path = os.path.join(context.work_dir, 'inline.phl')
    with open(path, 'w', encoding='utf-8') as source:
        source.write(text)
    context.program = None
    context.program_path = path


@when('I run "{command}"')
def step_impl(context, command):
    args = expand(context, command)
    run_cli(context, args[:1] + [context.program_path] + args[1:])


@then('the exit status is {status:d}')
def step_impl(context, status):
    assert_that(context.status).described_as(context.stderr).is_equal_to(status)


@then('the output contains "{text}"')
def step_impl(context, text):
    assert_that(context.stdout).contains(text)


@then('the error output contains "{text}"')
def step_impl(context, text):
    assert_that(context.stderr).contains(text)


@then('the JSON field "{key}" is "{value}"')
def step_impl(context, key, value):
    result = json.loads(context.stdout)
    assert_that(str(result[key])).is_equal_to(value)


@then('the JSON field "{key}" matches the golden expected cost')
def step_impl(context, key):
    golden = tp.expected(context.program)
    assert_that(golden).contains_key('expected_cost')
    result = json.loads(context.stdout)
    assert_that(result[key]).is_equal_to(golden['expected_cost'])


@then('the mean cost is within {tolerance} of {value}')
def step_impl(context, tolerance, value):
    result = json.loads(context.stdout)
    assert_that(abs(result['mean_cost'] - float(Fraction(value)))) \
        .is_less_than(float(tolerance))


@step('the certificate "{name}" exists')
def step_impl(context, name):
    assert os.path.isfile(os.path.join(context.work_dir, name))
