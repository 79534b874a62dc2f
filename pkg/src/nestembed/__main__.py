"""Allow running the CLI as ``python -m nestembed``."""

from nestembed.cli import entry

if __name__ == "__main__":
    entry()
