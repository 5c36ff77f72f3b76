import logging
import sys
from pathlib import Path

# Ensure project root is on sys.path so that 'fimhom' package can be imported
CURRENT_DIR = Path(__file__).resolve().parent
PROJECT_ROOT = CURRENT_DIR.parent
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from fimhom.category import format_obj
from fimhom.cli import parse_bounds
from fimhom.config import get_settings
from fimhom.functors import kernel_module
from fimhom.homology import degree_report, torsion_vector
from fimhom.module import RandomParams, evaluate_presentation, random_presentation
from fimhom.presentation_io import dump_presentation


def main() -> None:
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        force=True,
    )
    logger = logging.getLogger(__name__)

    print("=== search_torsion_counterexample.py: START ===")
    if len(sys.argv) < 2:
        print("Usage: python scripts/search_torsion_counterexample.py <bounds, e.g. 3,3> [field] [max_seeds]")
        sys.exit(1)

    bounds = parse_bounds(sys.argv[1])
    m = len(bounds)
    p = int(sys.argv[2]) if len(sys.argv) > 2 else 2
    max_seeds = int(sys.argv[3]) if len(sys.argv) > 3 else 500
    if m < 2:
        print("Strict inequality needs m >= 2; pass at least two bounds.")
        sys.exit(1)

    settings = get_settings()
    params = RandomParams(m, bounds, p, settings.max_gens, settings.max_rels, settings.max_terms)
    print(f"m={m}, bounds={format_obj(bounds)}, field=F_{p}, seeds 0..{max_seeds - 1}")

    for seed in range(max_seeds):
        P = random_presentation(seed, params)
        V = evaluate_presentation(P)
        if V.is_zero():
            continue
        t = torsion_vector(V).t
        for i in range(m):
            K = kernel_module(i, V)
            gd_k = degree_report(K, 0).gd
            logger.debug("seed %d coordinate %d: t_i=%d gd(K_i)=%d", seed, i + 1, t[i], gd_k)
            if t[i] < gd_k:
                print("\n=== Strict inequality found ===")
                print(f"seed={seed}, coordinate={i + 1}, t_i(V)={t[i]}, gd(K_iV)={gd_k}")
                print(f"torsion vector: {list(t)}")
                print("Presentation:")
                print(dump_presentation(P))
                return

    print(f"\nNo seed in 0..{max_seeds - 1} gives t_i(V) < gd(K_iV).")


if __name__ == "__main__":
    main()
