# main.py
"""Entry point: `python main.py <command> [--config PATH] [--out DIR] [--seed N] [--force]`."""

from cli.commands import run

if __name__ == "__main__":
    run()
