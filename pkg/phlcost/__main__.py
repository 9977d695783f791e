# vim: set ai ts=4 sw=4 expandtab:
'''python -m phlcost'''

import sys

from phlcost.cli import main

sys.exit(main())
