import sys

from metrikos.cli import main

sys.exit(main())
