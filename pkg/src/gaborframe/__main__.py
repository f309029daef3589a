import sys

from gaborframe.cli import main

sys.exit(main())
