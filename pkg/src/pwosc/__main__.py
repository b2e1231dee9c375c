"""Allow ``python -m pwosc`` to behave exactly like the ``pwosc`` script."""

from .cli import main

raise SystemExit(main())
