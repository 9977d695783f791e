# vim: set ai ts=4 sw=4 expandtab:
'''Defaults for exploration limits, overridable from the environment.'''

import os

MAX_NODES = int(os.environ.get('PHL_MAX_NODES', '200000'))
MAX_SUPPORT = int(os.environ.get('PHL_MAX_SUPPORT', '100000'))
MAX_STEPS = int(os.environ.get('PHL_MAX_STEPS', '10000'))
LOG_LEVEL = os.environ.get('PHL_LOG_LEVEL', 'WARNING')

# Float comparisons of exact costs against bound expressions.
BOUND_SLACK = 1e-9

# Fuel for pure evaluation of predicates and post patterns.
PURE_FUEL = 100000
