import sys

from torpid.cli import main

sys.exit(main())
