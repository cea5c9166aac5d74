import sys

from glava.cli import main

sys.exit(main())
