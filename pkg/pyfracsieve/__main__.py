# -----------------------------------------------------------------------------
# Copyright 2025 by PyFracSieve Authors, see AUTHORS for more details.
#
# Distributed under the terms of the MIT/X11 license.
#
# The full license is in the file LICENCE, distributed with this software.
# -----------------------------------------------------------------------------
"""Allow ``python -m pyfracsieve``."""

import sys

from .cli import main

sys.exit(main())
