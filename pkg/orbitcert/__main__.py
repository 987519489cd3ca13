"""python -m orbitcert."""

import sys

from .cli import main

sys.exit(main())
