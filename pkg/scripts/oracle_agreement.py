"""Compare the one- and two-root closed forms of sqrt(tangle) with the brute-force oracle.

    python3 scripts/oracle_agreement.py --count 20 --restarts 64
"""
import argparse
import time
from dataclasses import dataclass

import numpy as np

from polyroof.geometry import Structure, root_profile
from polyroof.measures import SQRT_TANGLE
from polyroof.oracle import brute_force_roof
from polyroof.quantum import spectral_decompose_rank2
from polyroof.roof import roof_one_root, roof_two_root
from polyroof.samples import sample_instances


@dataclass
class AgreementConfig:
    count: int = 20
    restarts: int = 64
    ensemble_size: int = 4
    seed: int = 0


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=AgreementConfig.count)
    ap.add_argument("--restarts", type=int, default=AgreementConfig.restarts)
    ap.add_argument("--ensemble-size", dest="ensemble_size", type=int, default=AgreementConfig.ensemble_size)
    ap.add_argument("--seed", type=int, default=AgreementConfig.seed)
    cfg = AgreementConfig(**vars(ap.parse_args()))

    rng = np.random.default_rng(cfg.seed)
    print("index,structure,family,closed,oracle,oracle_minus_closed")
    start = time.perf_counter()
    for structure, roof in ((Structure.ONE_ROOT, roof_one_root), (Structure.TWO_ROOT_EQUAL, roof_two_root)):
        for i, (rho, label) in enumerate(sample_instances(structure, cfg.count, rng)):
            closed = roof(root_profile(SQRT_TANGLE, spectral_decompose_rank2(rho)), SQRT_TANGLE, rho).value
            oracle, _, _ = brute_force_roof(
                SQRT_TANGLE, rho, ensemble_size=cfg.ensemble_size, restarts=cfg.restarts, seed=i
            )
            print(f"{i},{structure.value},{label},{closed:.12g},{oracle:.12g},{oracle - closed:.3e}")
    print(f"# {time.perf_counter() - start:.1f} s")


if __name__ == "__main__":
    main()
