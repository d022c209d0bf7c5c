import sys

from morphkit.cli import main

sys.exit(main())
