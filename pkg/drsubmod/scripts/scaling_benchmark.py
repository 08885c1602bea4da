import argparse
import logging
import sys
from pathlib import Path

# Add the src directory to the Python path to allow for absolute imports
sys.path.append(str(Path(__file__).parent.parent / 'src'))

from drsubmod.cuts.timing import loglog_slope, time_separation

logger = logging.getLogger(__name__)


def parse_args() -> argparse.Namespace:
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(description='Time the greedy DR-cut separation on random forests.')
    parser.add_argument(
        '--sizes', type=int, nargs='+', default=[50, 100, 200, 400],
        help='Instance sizes |V| to time.'
    )
    parser.add_argument('--repeats', type=int, default=5, help='Runs per size; the median is reported.')
    parser.add_argument('--seed', type=int, default=0, help='Seed of the instance generator.')
    parser.add_argument(
        '--log-level', type=str, choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'],
        default='INFO', help='Set the logging level.'
    )
    return parser.parse_args()


def main():
    args = parse_args()
    logging.basicConfig(
        level=args.log_level.upper(),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True
    )

    medians = time_separation(args.sizes, repeats=args.repeats, seed=args.seed)
    for n, seconds in sorted(medians.items()):
        print(f"{n:>6}  {seconds:.6f}s")
    if len(medians) > 1:
        print(f"log-log slope: {loglog_slope(medians):.3f}")


if __name__ == '__main__':
    main()
