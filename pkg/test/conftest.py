#!/usr/bin/env python3
"""Shared fixtures for the deskml test suite"""

import shutil
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from deskml_common import get_settings
from deskml_tensor import TrackedBackend


@pytest.fixture
def backend():
    """A fresh tracked backend; tests bind it with use_backend() inside their own body"""
    return TrackedBackend("test")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def temp_dir():
    """Temporary directory fixture"""
    path = Path(tempfile.mkdtemp())
    yield path
    if path.exists():
        shutil.rmtree(path)


@pytest.fixture(autouse=True)
def fresh_settings():
    """Settings are cached per process; drop the cache around every test"""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
