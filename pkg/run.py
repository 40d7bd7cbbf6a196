"""Entrada local: `python run.py <comando>` equivale ao script `ntx`."""

from app.cli.cli import main

if __name__ == "__main__":
    main()
