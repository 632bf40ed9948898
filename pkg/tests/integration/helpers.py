#!/usr/bin/env python3
# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""Helper functions for the integration tests."""

import json
import os
import pathlib
import subprocess  # nosec B404
import sys
import typing

import numpy as np

from constants import ROOT_PATH
from lab_types import Frame

CLI_PATH = ROOT_PATH / "src" / "cli.py"


class ExecutionError(Exception):
    """Exception raised when the command line does not finish.

    Attrs:
        msg (str): Explanation of the error.
    """

    def __init__(self, msg: str):
        """Initialize a new instance of the ExecutionError exception.

        Args:
            msg (str): Explanation of the error.
        """
        self.msg = msg


def run_lab(
    *args: str, env: typing.Optional[typing.Dict[str, str]] = None, timeout: int = 600
) -> subprocess.CompletedProcess:
    """Run the command line in a child process.

    Args:
        args: the command line arguments.
        env: extra environment variables.
        timeout: seconds before giving up.

    Returns:
        The finished process with captured stdout and stderr.

    Raises:
        ExecutionError: if the process times out.
    """
    try:
        return subprocess.run(  # nosec B603
            [sys.executable, str(CLI_PATH), *args],
            capture_output=True,
            text=True,
            timeout=timeout,
            check=False,
            env={**os.environ, **(env or {})},
        )
    except subprocess.TimeoutExpired as exc:
        raise ExecutionError(f"wigner-lab {' '.join(args)} timed out") from exc


def payload(process: subprocess.CompletedProcess) -> typing.Any:
    """Decode the JSON line printed by a command.

    Args:
        process: the finished process.

    Returns:
        The decoded payload.
    """
    return json.loads(process.stdout)


def write_frame(path: pathlib.Path, columns: typing.Any) -> pathlib.Path:
    """Write a frame file.

    Args:
        path: the destination.
        columns: orthonormal columns.

    Returns:
        The path.
    """
    frame = Frame(columns=np.asarray(columns, dtype=complex))
    path.write_text(frame.model_dump_json(), encoding="utf-8")
    return path
