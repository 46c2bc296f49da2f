"""Command line entry point: serve one backend on stdio or a socket."""

import argparse
import logging
import sys

from .backends import BACKENDS, make_backend
from .server import serve_stdio, serve_unix
from .wire import WireError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vlfbridge",
        description="Serve a feature-codec backend over the bridge protocol.",
    )
    transport = parser.add_mutually_exclusive_group()
    transport.add_argument(
        "--stdio",
        action="store_true",
        help="serve on stdin/stdout (the default)",
    )
    transport.add_argument("--socket", metavar="PATH", help="serve on a unix socket at PATH")
    parser.add_argument(
        "--backend",
        default="identity",
        choices=sorted(BACKENDS),
        help="backend to serve (default: identity)",
    )
    parser.add_argument("--queries", type=int, default=32, help="frame rows (default 32)")
    parser.add_argument("--dim", type=int, default=768, help="frame columns (default 768)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING, format="vlfbridge: %(message)s")
    try:
        backend = make_backend(args.backend, n_queries=args.queries, dim=args.dim)
    except WireError as exc:
        print(f"vlfbridge: {exc}", file=sys.stderr)
        return 2
    if args.socket:
        serve_unix(args.socket, backend)
    else:
        serve_stdio(backend)
    return 0


if __name__ == "__main__":
    sys.exit(main())
