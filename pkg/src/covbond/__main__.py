import sys

from covbond.cli import main

sys.exit(main())
