#!/usr/bin/env python3
# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""Command line front end of the wigner lab."""

import argparse
import logging
import os
import pathlib
import sys
import typing

import numpy as np
import yaml
from pydantic import BaseModel, ValidationError

from constants import (
    CONFIG_FILE_PATH,
    EXIT_FAILURE,
    EXIT_OK,
    EXIT_USAGE,
    THREADS_ENV_VAR,
    TRUTH_SUFFIX,
)
from exceptions import InputFormatError, InvalidParameterError, WignerLabError
from lab_types import (
    CheckSummary,
    Frame,
    GroundTruth,
    OperatorMap,
    RunConfig,
    SemilinearMap,
    Sigma,
    Tag,
    XSetReport,
)
from recovery import classify_operator
from subspaces import check_same_rank
from suites import run_suite
from wigner_maps import (
    check_L1,
    check_L2,
    check_L3,
    compose,
    make_direct_sum,
    make_L_perp,
    make_L_U,
    make_L_UW,
    make_trace_collapse,
    random_isometry,
    random_rank_k_projection,
)
from xset import estimate_local_dimension, geher_classify, xset_sample

logger = logging.getLogger(__name__)

Model = typing.TypeVar("Model", bound=BaseModel)

SUITE_NAMES = ("graph", "xset", "roundtrip", "all")
LOCAL_DIMENSION_POINTS = 3


def load_defaults(path: pathlib.Path = CONFIG_FILE_PATH) -> typing.Dict[str, typing.Any]:
    """Read the option defaults from the options file.

    Args:
        path: the options file.

    Returns:
        Default value by option name.

    Raises:
        InputFormatError: if the file cannot be read.
    """
    try:
        options = yaml.safe_load(path.read_text(encoding="utf-8"))["options"]
    except (OSError, yaml.YAMLError, KeyError, TypeError) as exc:
        logger.exception("Cannot read options from %s", path)
        raise InputFormatError(f"Cannot read options from {path}") from exc
    return {name: option.get("default") for name, option in options.items()}


def _threads_override() -> typing.Optional[int]:
    """Return the thread cap from the environment, if set."""
    value = os.environ.get(THREADS_ENV_VAR)
    if value is None:
        return None
    try:
        return int(value)
    except ValueError as exc:
        raise InvalidParameterError(f"{THREADS_ENV_VAR} must be an integer, got {value}") from exc


def build_config(args: argparse.Namespace, defaults: typing.Dict[str, typing.Any]) -> RunConfig:
    """Merge the option defaults, the environment and the command line.

    Args:
        args: parsed arguments.
        defaults: option defaults.

    Returns:
        The run configuration.
    """

    def pick(name: str) -> typing.Any:
        """Return the command line value of an option, else its default.

        Args:
            name: the option.

        Returns:
            The value.
        """
        value = getattr(args, name, None)
        return defaults.get(name) if value is None else value

    threads = _threads_override()
    return RunConfig(
        seed=pick("seed"),
        tol=pick("tol"),
        samples=pick("samples"),
        threads=defaults.get("threads", 0) if threads is None else threads,
        log_level=pick("log_level"),
        input_path=getattr(args, "input_path", None),
        output_path=getattr(args, "output_path", None),
    )


def read_model(model: typing.Type[Model], path: typing.Optional[pathlib.Path]) -> Model:
    """Read a JSON payload into a model.

    Args:
        model: the model class.
        path: the file.

    Returns:
        The parsed model.

    Raises:
        InputFormatError: if the file is missing, unreadable or malformed.
    """
    if path is None:
        raise InputFormatError(f"No {model.__name__} file given")
    try:
        return model.model_validate_json(path.read_text(encoding="utf-8"))
    except (OSError, ValidationError, ValueError) as exc:
        logger.exception("Cannot read %s from %s", model.__name__, path)
        raise InputFormatError(f"Cannot read {model.__name__} from {path}") from exc


def write_model(payload: BaseModel, path: pathlib.Path) -> None:
    """Write a model as JSON.

    Args:
        payload: the model.
        path: the destination.
    """
    path.write_text(payload.model_dump_json(by_alias=True) + "\n", encoding="utf-8")


def _print(payload: BaseModel) -> None:
    """Print a model as one JSON line on stdout."""
    sys.stdout.write(payload.model_dump_json(by_alias=True) + "\n")


def _source_rank(args: argparse.Namespace, operator: OperatorMap) -> int:
    """Return --k, falling back on the rank recorded in the operator file."""
    k = args.k if args.k is not None else operator.k
    if k is None:
        raise InvalidParameterError("The operator file records no k; pass --k")
    return k


class GenRequest(typing.NamedTuple):
    """Parameters of the gen command.

    Attributes:
        kind: lu, lperp, luw, collapse, lperp-lu or doubled.
        n: source dimension.
        k: source projection rank.
        m: target projection rank, for luw and collapse.
        sigma: field automorphism of the isometries.
        n_prime: target dimension, the kind's default when omitted.
        seed: seed of the random isometries and projections.
    """

    kind: str
    n: int
    k: int
    m: typing.Optional[int] = None
    sigma: Sigma = Sigma.IDENTITY
    n_prime: typing.Optional[int] = None
    seed: int = 1


Generated = typing.Tuple[OperatorMap, GroundTruth]


def _gen_conjugation(request: GenRequest) -> Generated:
    """Build L_U, or L_k^⊥ ∘ L_U for lperp-lu."""
    target = request.n_prime or request.n
    isometry = random_isometry(request.n, target, request.seed, request.sigma)
    operator = make_L_U(isometry, request.k)
    if request.kind == "lperp-lu":
        operator = compose(make_L_perp(request.k, isometry.target_dim), operator)
    m = typing.cast(int, operator.m)
    return operator, GroundTruth(kind=request.kind, k=request.k, m=m, isometry=isometry)


def _gen_perp(request: GenRequest) -> Generated:
    """Build L_k^⊥."""
    operator = make_L_perp(request.k, request.n)
    return operator, GroundTruth(kind=request.kind, k=request.k, m=request.n - request.k)


def _gen_padded(request: GenRequest) -> Generated:
    """Build L_{U,W} with W of rank m − k, by default inside C^(n + m − k + 1)."""
    n, k = request.n, request.k
    m = k + 1 if request.m is None else request.m
    if m < k:
        raise InvalidParameterError(f"luw needs m ≥ k, got m={m}, k={k}")
    extra = m - k
    target = request.n_prime or n + extra + 1
    if target < n + extra:
        raise InvalidParameterError(f"C^{target} cannot hold U(C^{n}) ⊕ W of rank {extra}")
    unitary = random_isometry(n + extra, target, request.seed, request.sigma).matrix
    isometry = SemilinearMap(matrix=unitary[:, :n], sigma=request.sigma)
    padding = Frame(columns=unitary[:, n:])
    truth = GroundTruth(kind=request.kind, k=k, m=m, isometry=isometry, padding=padding)
    return make_L_UW(isometry, padding, k), truth


def _gen_collapse(request: GenRequest) -> Generated:
    """Build the trace collapse onto a random rank m projection."""
    m = request.k if request.m is None else request.m
    if not 0 < m <= request.n:
        raise InvalidParameterError(f"collapse needs 0 < m ≤ n, got m={m}")
    projection = random_rank_k_projection(request.n, m, request.seed)
    truth = GroundTruth(kind=request.kind, k=request.k, m=m, projection=projection)
    return make_trace_collapse(projection, request.k), truth


def _gen_doubled(request: GenRequest) -> Generated:
    """Build the direct sum of two isometric conjugations into halves of C^n'."""
    half, odd = divmod(request.n_prime or 2 * request.n, 2)
    if odd or half < request.n:
        raise InvalidParameterError(f"doubled needs an even n' ≥ 2n, got {request.n_prime}")
    rng = np.random.default_rng(request.seed)
    operator = make_direct_sum(
        make_L_U(random_isometry(request.n, half, rng, request.sigma), request.k),
        make_L_U(random_isometry(request.n, half, rng, request.sigma), request.k),
    )
    return operator, GroundTruth(kind=request.kind, k=request.k, m=2 * request.k)


GENERATORS: typing.Dict[str, typing.Callable[[GenRequest], Generated]] = {
    "lu": _gen_conjugation,
    "lperp": _gen_perp,
    "luw": _gen_padded,
    "collapse": _gen_collapse,
    "lperp-lu": _gen_conjugation,
    "doubled": _gen_doubled,
}


def generate(request: GenRequest) -> Generated:
    """Build one of the example operators together with its ground truth.

    Args:
        request: the kind and its parameters.

    Returns:
        The operator and its ground truth.

    Raises:
        InvalidParameterError: if the parameters do not fit the kind.
    """
    if not 0 < request.k < request.n:
        raise InvalidParameterError(f"Need 0 < k < n, got k={request.k}, n={request.n}")
    if request.kind not in GENERATORS:
        raise InvalidParameterError(f"Unknown operator kind {request.kind}")
    return GENERATORS[request.kind](request)


class WignerLabCli:
    """Argument parsing and dispatch of the lab commands."""

    def __init__(self, defaults: typing.Optional[typing.Dict[str, typing.Any]] = None):
        """Construct.

        Args:
            defaults: option defaults, read from the options file when omitted.
        """
        self._defaults = defaults
        self._handlers: typing.Dict[
            str, typing.Callable[[argparse.Namespace, RunConfig], int]
        ] = {
            "gen": self._on_gen,
            "check": self._on_check,
            "xset": self._on_xset,
            "decompose": self._on_decompose,
            "verify": self._on_verify,
        }
        self.parser = self._build_parser()

    @staticmethod
    def _build_parser() -> argparse.ArgumentParser:
        """Build the argument parser.

        Returns:
            The parser with one subcommand per handler.
        """
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument("--seed", type=int, help="seed of every random draw")
        common.add_argument("--tol", type=float, help="numerical tolerance")
        common.add_argument("--samples", type=int, help="projections per condition check")
        common.add_argument("--log-level", dest="log_level", help="stderr log level")
        parser = argparse.ArgumentParser(
            prog="wigner-lab", description="Wigner-type theorems on Grassmannians, by sampling."
        )
        commands = parser.add_subparsers(dest="command", required=True)

        gen = commands.add_parser("gen", parents=[common], help="generate an example operator")
        gen.add_argument("kind", choices=tuple(GENERATORS))
        gen.add_argument("--n", type=int, required=True)
        gen.add_argument("--k", type=int, required=True)
        gen.add_argument("--m", type=int)
        gen.add_argument("--n-prime", dest="n_prime", type=int)
        gen.add_argument("--sigma", choices=[sigma.value for sigma in Sigma], default="id")
        gen.add_argument("--out", dest="output_path", type=pathlib.Path, required=True)

        for name, help_text in (
            ("check", "check conditions L1, L2 and L3"),
            ("decompose", "classify an operator"),
        ):
            command = commands.add_parser(name, parents=[common], help=help_text)
            command.add_argument("--in", dest="input_path", type=pathlib.Path, required=True)
            command.add_argument("--k", type=int)

        xset = commands.add_parser("xset", parents=[common], help="analyze X_k(X, Y)")
        xset.add_argument("first", type=pathlib.Path, metavar="X")
        xset.add_argument("second", type=pathlib.Path, metavar="Y")
        xset.add_argument("--count", type=int, default=10)

        verify = commands.add_parser("verify", parents=[common], help="run a property suite")
        verify.add_argument("suite", choices=SUITE_NAMES)
        return parser

    def run(self, argv: typing.Optional[typing.Sequence[str]] = None) -> int:
        """Parse the arguments and run the command.

        Args:
            argv: the arguments, sys.argv[1:] when omitted.

        Returns:
            The exit code.
        """
        args = self.parser.parse_args(argv)
        try:
            defaults = self._defaults if self._defaults is not None else load_defaults()
            config = build_config(args, defaults)
        except (WignerLabError, ValidationError) as exc:
            sys.stderr.write(f"Invalid options: {exc}\n")
            return EXIT_USAGE
        logging.basicConfig(
            level=config.log_level,
            stream=sys.stderr,
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        )
        try:
            return self._handlers[args.command](args, config)
        except (InputFormatError, InvalidParameterError, ValidationError) as exc:
            logger.error("Invalid input: %s", exc)
            return EXIT_USAGE
        except WignerLabError as exc:
            logger.error("%s failed: %s", args.command, exc.msg)
            return EXIT_FAILURE

    def _on_gen(self, args: argparse.Namespace, config: RunConfig) -> int:
        """Handle gen."""
        try:
            request = GenRequest(
                kind=args.kind,
                n=args.n,
                k=args.k,
                m=args.m,
                sigma=Sigma(args.sigma),
                n_prime=args.n_prime,
                seed=config.seed,
            )
            operator, truth = generate(request)
        except InvalidParameterError:
            raise
        except WignerLabError as exc:
            logger.exception("Cannot build a %s operator", args.kind)
            raise InvalidParameterError(exc.msg) from exc
        path = typing.cast(pathlib.Path, config.output_path)
        write_model(operator, path)
        write_model(truth, path.with_name(path.name + TRUTH_SUFFIX))
        logger.info(
            "Wrote %s operator C^%d -> C^%d to %s", args.kind, operator.n, operator.n_prime, path
        )
        return EXIT_OK

    def _on_check(self, args: argparse.Namespace, config: RunConfig) -> int:
        """Handle check."""
        operator = read_model(OperatorMap, config.input_path)
        k = _source_rank(args, operator)
        first = check_L1(operator, k, config.samples, config.seed, config.tol)
        reports = [first, check_L2(operator, k, config.samples, config.seed, config.tol)]
        if first.passed:
            m = typing.cast(int, first.inferred_m)
            reports.append(check_L3(operator, k, m, config.samples, config.seed, config.tol))
        else:
            logger.info("L3 skipped, its precondition L1 failed")
        summary = CheckSummary(
            k=k,
            inferred_m=first.inferred_m,
            reports=reports,
            passed=all(report.passed for report in reports),
        )
        _print(summary)
        return EXIT_OK if summary.passed else EXIT_FAILURE

    def _on_xset(self, args: argparse.Namespace, config: RunConfig) -> int:
        """Handle xset."""
        first, second = read_model(Frame, args.first), read_model(Frame, args.second)
        try:
            check_same_rank(first, second)
        except WignerLabError as exc:
            raise InputFormatError(exc.msg) from exc
        if args.count < 1:
            raise InvalidParameterError(f"--count must be positive, got {args.count}")
        verdict = geher_classify(first, second, config.tol, config.seed)
        sample = xset_sample(first, second, args.count, config.seed, config.tol)
        dimensions = [
            estimate_local_dimension(first, second, point, config.tol, config.seed)
            for point in sample.points[:LOCAL_DIMENSION_POINTS]
        ]
        _print(
            XSetReport(
                classification=verdict,
                count=len(sample.points),
                sample=sample,
                local_dimensions=dimensions,
            )
        )
        return EXIT_OK

    def _on_decompose(self, args: argparse.Namespace, config: RunConfig) -> int:
        """Handle decompose."""
        operator = read_model(OperatorMap, config.input_path)
        result = classify_operator(
            operator, _source_rank(args, operator), config.samples, config.seed, config.tol
        )
        _print(result)
        return EXIT_FAILURE if result.tag is Tag.REJECTED else EXIT_OK

    def _on_verify(self, args: argparse.Namespace, config: RunConfig) -> int:
        """Handle verify."""
        summary = run_suite(args.suite, config)
        _print(summary)
        return EXIT_OK if summary.ok else EXIT_FAILURE


def main() -> None:
    """Run the command line."""
    sys.exit(WignerLabCli().run())


if __name__ == "__main__":  # pragma: nocover
    main()
