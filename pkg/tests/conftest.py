from __future__ import annotations

import glob
import os

import pytest

from uspkit import parse_file, validate

HERE = os.path.dirname(__file__)
ROOT = os.path.dirname(HERE)
CORPUS = os.path.join(ROOT, "examples", "service_queue.usp")
NEGATIVE_DIR = os.path.join(HERE, "negative")


def negative_files() -> list[str]:
    return sorted(glob.glob(os.path.join(NEGATIVE_DIR, "SP*.usp")))


@pytest.fixture(scope="session")
def corpus_path() -> str:
    return CORPUS


@pytest.fixture(scope="session")
def corpus_source() -> str:
    with open(CORPUS, encoding="utf-8") as fh:
        return fh.read()


@pytest.fixture(scope="session")
def corpus_model():
    result = parse_file(CORPUS)
    assert result.ok, [d.render() for d in result.diagnostics]
    return result.model


@pytest.fixture(scope="session")
def corpus_vm(corpus_model):
    vr = validate(corpus_model)
    assert vr.ok, [d.render() for d in vr.diagnostics]
    return vr.validated
