#!/usr/bin/env python3
"""Write the named fixture specs (and their dilation triples where defined)
into a directory, ready for the `icpmaps` CLI.

Usage:
    python scripts/export_fixture_specs.py [outdir]
"""

import pathlib
import sys

from icpmaps import serialize
from icpmaps.blockmap import as_block_map
from icpmaps.stinespring import dilate, verify_dilation


def main() -> int:
    outdir = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "fixtures")
    outdir.mkdir(parents=True, exist_ok=True)
    specs = {
        "trace_m2": {"kind": "trace", "n": 2},
        "trace_m3": {"kind": "trace", "n": 3},
        "eval_c2": {"kind": "eval", "dim": 2, "point": 0},
        "eval_c3": {"kind": "eval", "dim": 3, "point": 0},
        "psi_grid": {"kind": "psi"},
        "schur_psd": {"kind": "schur", "lam": [[[1.0, 0.0], [0.5, 0.0]], [[0.5, 0.0], [1.0, 0.0]]]},
        "schur_not_psd": {"kind": "schur", "lam": [[[1.0, 0.0], [2.0, 0.0]], [[2.0, 0.0], [1.0, 0.0]]]},
        "dilation_k3n2": {"kind": "dilation", "algebra": {"blocks": [1, 1]}, "k": 3, "n": 2, "h": 1, "seed": 0},
    }
    for name, spec in specs.items():
        path = outdir / f"{name}.json"
        path.write_text(serialize.dumps(spec))
        print(f"wrote {path}")
        if name in ("trace_m2", "eval_c2", "schur_psd", "dilation_k3n2"):
            block = as_block_map(serialize.load_map_spec(spec))
            triple = dilate(block)
            residuals = verify_dilation(block, triple)
            tpath = outdir / f"{name}.triple.json"
            tpath.write_text(serialize.dumps(serialize.triple_to_json(triple, residuals.to_dict())))
            print(f"wrote {tpath}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
