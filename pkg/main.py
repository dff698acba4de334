import sys

from qutrit_link.cli import run

if __name__ == "__main__":
    sys.exit(run())
