"""Regenerate the fixed-seed synthetic fixtures shipped under data/fixtures.

Three n=[10,8,12] scenarios: the clean target matrix, one with an isolated
plus a connected outlier, and one with full cross-block similarity. All are
byte-reproducible from the generator at seed 0.
"""

from __future__ import annotations

from pathlib import Path

from bdrkit import BlockSpec, CorruptionSpec
from bdrkit.pipeline import gen_synthetic

SPEC = BlockSpec(n=(10, 8, 12), w=(0.6, 0.3, 0.9))

SCENARIOS = {
    "target": CorruptionSpec(),
    "outliers": CorruptionSpec(type1_count=1, type2=((31, (0.2, 0.1, 0.3)),)),
    "group": CorruptionSpec(
        group_sim=((0.0, 0.2, 0.4), (0.2, 0.0, 0.1), (0.4, 0.1, 0.0))
    ),
}


def main() -> None:
    out_dir = Path(__file__).resolve().parent.parent / "data" / "fixtures"
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, corruption in SCENARIOS.items():
        paths = gen_synthetic(SPEC, corruption, seed=0, out_prefix=str(out_dir / name))
        print(f"{name}: {paths['affinity']}")


if __name__ == "__main__":
    main()
