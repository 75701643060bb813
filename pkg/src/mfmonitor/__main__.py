"""Allow ``python -m mfmonitor``."""

import sys

from .cli import main

sys.exit(main())
