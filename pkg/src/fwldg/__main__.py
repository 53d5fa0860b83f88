import sys

from fwldg.cli import main

sys.exit(main())
