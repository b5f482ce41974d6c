#!/usr/bin/env python3
"""Build a seeded corpus of dilation-generated block maps and run the full
verification battery: Gram positivity, dilation round-trips, minimality and
unitary equivalence, and the amplified-norm attainment inequalities.

Prints one line per map and a summary table of worst residuals; exits
nonzero if any check fails its tolerance.

Usage:
    python scripts/run_corpus_verification.py [--seed 0] [--tmax 2]
        [--restarts 2] [--iters 8] [--skip-norms]
"""

import argparse
import sys
import time

import numpy as np

from icpmaps.factory import build_corpus
from icpmaps.gram import build_gram, gram_is_psd, positivity_falsify
from icpmaps.norms import norm_estimate, unit_norm
from icpmaps.stinespring import dilate, minimal_compress, unitary_equivalence, verify_dilation


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--tmax", type=int, default=2, help="highest amplification level for norms")
    parser.add_argument("--restarts", type=int, default=2)
    parser.add_argument("--iters", type=int, default=8)
    parser.add_argument("--falsifier-trials", type=int, default=0,
                        help="extra admissible-tuple trials per level (0 = skip)")
    parser.add_argument("--skip-norms", action="store_true")
    args = parser.parse_args()

    t_start = time.perf_counter()
    corpus = build_corpus(seed=args.seed)
    print(f"corpus: {len(corpus)} maps (seed {args.seed})")
    worst = {
        "gram_min_eig": 0.0,
        "reconstruction": 0.0,
        "structural": 0.0,
        "unitarity": 0.0,
        "intertwining": 0.0,
        "v_match": 0.0,
        "norm_gap": -np.inf,
    }
    failures = []
    for entry in corpus:
        block = entry.block_map
        gram = build_gram(block)
        psd, min_eig = gram_is_psd(gram)
        rel_eig = min_eig / max(1.0, gram.norm())
        worst["gram_min_eig"] = min(worst["gram_min_eig"], rel_eig)
        if not psd:
            failures.append((entry.name, "gram not PSD"))
            continue
        triple = dilate(block)
        report = verify_dilation(block, triple)
        scale = 1.0 + block.coefficient_scale()
        worst["reconstruction"] = max(worst["reconstruction"], report.reconstruction / scale)
        worst["structural"] = max(worst["structural"], report.max_structural())
        if report.reconstruction > 1e-8 * scale or report.max_structural() > 1e-9:
            failures.append((entry.name, "round-trip residual"))
        t1, _ = minimal_compress(triple, block)
        t2, _ = minimal_compress(entry.triple, block)
        eq = unitary_equivalence(t1, t2, block)
        worst["unitarity"] = max(worst["unitarity"], eq.unitarity)
        worst["intertwining"] = max(worst["intertwining"], eq.intertwining)
        worst["v_match"] = max(worst["v_match"], eq.v_match)
        if not eq.within():
            failures.append((entry.name, "uniqueness residual"))
        line = (
            f"  {entry.name:<22} kappa={triple.kappa:<3} grambound={rel_eig:+.1e} "
            f"recon={report.reconstruction:.1e} equiv={max(eq.unitarity, eq.intertwining, eq.v_match):.1e}"
        )
        if args.falsifier_trials:
            ce = positivity_falsify(
                block, levels=tuple(range(1, args.tmax + 1)),
                trials=args.falsifier_trials, seed=entry.seed,
            )
            if ce is not None:
                failures.append((entry.name, f"falsifier fired at level {ce.level}"))
            line += f" falsifier={'FIRED' if ce else 'silent'}"
        if not args.skip_norms:
            u_norm = unit_norm(block)
            gap = -np.inf
            for t in range(1, args.tmax + 1):
                est = norm_estimate(block, t=t, restarts=args.restarts, iters=args.iters, seed=0)
                gap = max(gap, est.value - u_norm)
                if est.value > u_norm * (1 + 1e-6):
                    failures.append((entry.name, f"norm estimate exceeds unit value at level {t}"))
            worst["norm_gap"] = max(worst["norm_gap"], gap)
            line += f" unit={u_norm:.3f} gap={gap:+.1e}"
        print(line)

    print(f"\nworst residuals over the corpus ({time.perf_counter() - t_start:.1f}s):")
    for key, value in worst.items():
        print(f"  {key:<16} {value:+.3e}")
    if failures:
        print(f"\n{len(failures)} FAILURES:")
        for name, what in failures:
            print(f"  {name}: {what}")
        return 1
    print("\nall checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
