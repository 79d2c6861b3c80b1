from __future__ import annotations

from pathlib import Path

import pytest

from ontosearch.kb import load_kb

DATA_DIR = Path(__file__).parent / "data"

# Worked example shared by the annotation/expansion/CLI tests: a two-sentence
# document and a question that mention the sample KB's entities.
FIGURE_DOC = (
    "The California Compact has been in existence for several years. "
    "The California group is co-chaired by Stanford University President Don Kennedy."
)
FIGURE_QUERY = "Who is the president of Stanford University?"


@pytest.fixture(scope="session")
def figure_kb():
    return load_kb(DATA_DIR / "figure_kb.tsv")


@pytest.fixture(scope="session")
def figure_kb_path():
    return DATA_DIR / "figure_kb.tsv"
