# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""Integration tests fixtures."""

import os

from pytest import MonkeyPatch, fixture

from constants import THREADS_ENV_VAR


@fixture(name="work_dir")
def work_dir_fixture(tmp_path):
    """Provide a scratch directory for operator and frame files."""
    yield tmp_path


@fixture(autouse=True)
def threads_fixture(monkeypatch: MonkeyPatch):
    """Keep the thread cap of the caller out of the child processes."""
    if THREADS_ENV_VAR in os.environ:
        monkeypatch.delenv(THREADS_ENV_VAR)
