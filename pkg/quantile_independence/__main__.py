from __future__ import annotations

import sys

from quantile_independence.cli import main

sys.exit(main())
