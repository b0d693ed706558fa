"""``python -m gmewitness`` runs the command-line interface."""

import sys

from gmewitness.cli.main import main

sys.exit(main())
