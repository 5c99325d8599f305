"""Allow ``python -m hetclaw`` to reach the experiment runner."""

from .cli import main

if __name__ == "__main__":
    raise SystemExit(main())
