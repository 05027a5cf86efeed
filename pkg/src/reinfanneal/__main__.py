import sys

from reinfanneal.harness.cli import main

sys.exit(main())
