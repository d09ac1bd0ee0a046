"""Run the crossings command line with python -m crossings."""

from .cli import main

raise SystemExit(main())
