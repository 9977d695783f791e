# vim: set ai ts=4 sw=4 expandtab:

'''Program corpus and expected results for Behave test steps.'''

import json
import os

PROGRAM_DIR = os.path.abspath(
    os.path.join(os.path.dirname(__file__), '..', '..', 'programs'))

PROGRAMS = {
    'coin toss': 'coin_toss.phl',
    'toss then tick': 'toss_then_tick.phl',
    'binary counter': 'counter.phl',
    'quicksort': 'qsort.phl',
    'quicksort keeping the pivot': 'qsort_recurse_pivot.phl',
    'use after free': os.path.join('stuck', 'use_after_free.phl'),
    'division by zero': os.path.join('stuck', 'div_zero.phl'),
}


def program_path(name):
    return os.path.join(PROGRAM_DIR, PROGRAMS[name])


def expected(name):
    '''Golden results stored beside the program, or {}.'''
    path = program_path(name).replace('.phl', '.expect.json')
    if not os.path.isfile(path):
        return {}
    with open(path, 'r', encoding='utf-8') as golden:
        return json.load(golden)
