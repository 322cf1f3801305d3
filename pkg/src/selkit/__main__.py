"""Allow ``python -m selkit`` as an alias for the console script."""

from .cli import main

main()
