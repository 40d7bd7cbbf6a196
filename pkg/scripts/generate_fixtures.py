"""Generate the synthetic cube fixtures (sums of Gaussians).

Output: fixtures/synthetic/ by default, or the directory given as argv[1].

Pairs written:
- single_*        one atom, Φ = exp(-r²) on a 33³ grid
- two_gaussian_*  two carbons 4 bohr apart, hole on the left, particle on the right
- large_*         97 atoms on an 80³ grid (skip with --no-large)

Each pair is <name>_hole.cube, <name>_particle.cube and <name>_groups.json.
"""

from __future__ import annotations

import os
import sys

THIS_DIR = os.path.dirname(__file__)
ROOT = os.path.abspath(os.path.join(THIS_DIR, os.pardir))
OUT_DIR = os.path.join(ROOT, "fixtures", "synthetic")

if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from app import configure_logging  # noqa: E402
from app.synthetic import write_fixture_set  # noqa: E402


def main(argv: list[str]) -> int:
    include_large = "--no-large" not in argv
    args = [a for a in argv if not a.startswith("--")]
    dest = args[0] if args else OUT_DIR
    configure_logging("INFO")
    files = write_fixture_set(dest, include_large=include_large)
    for path in files:
        print(path)
    print(f"Written {len(files)} files to {dest}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main(sys.argv[1:]))
