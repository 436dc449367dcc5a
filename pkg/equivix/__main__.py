import sys

from equivix.cli import main

sys.exit(main())
