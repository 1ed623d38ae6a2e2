import os
import pathlib

import pytest


@pytest.fixture(autouse=True, scope="session")
def _run_from_repo_root():
    # fixture files are referenced by paths relative to the repo root
    os.chdir(pathlib.Path(__file__).resolve().parent.parent)
