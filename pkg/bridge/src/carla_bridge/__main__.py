"""Entry point: ``python -m carla_bridge [--config file] [--stub]``."""

from __future__ import annotations

import argparse
import sys

from .config import BridgeConfig, load_config
from .server import serve


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="carla-bridge",
        description="Serve the arise-exec/1 executor protocol against Scenic + CARLA.",
    )
    parser.add_argument("--config", help="bridge config file (endpoint, town mapping)")
    parser.add_argument(
        "--stub",
        action="store_true",
        help="serve the stubbed Scenic frontend (conformance testing, no CARLA)",
    )
    args = parser.parse_args(argv)
    config = load_config(args.config) if args.config else BridgeConfig()
    if args.stub:
        from .frontend import StubScenicFrontend

        serve(StubScenicFrontend())
    else:
        from .frontend import RealScenicFrontend

        serve(RealScenicFrontend(config))
    return 0


if __name__ == "__main__":
    sys.exit(main())
