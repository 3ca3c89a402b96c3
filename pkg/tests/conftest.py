import json

import pytest

from tplab import lang, pipeline


@pytest.fixture(scope="session")
def manifest():
    return pipeline.load_corpus()


@pytest.fixture(scope="session")
def corpus_sources(manifest):
    """project_id -> [(source name, text), ...] as read from disk."""
    out = {}
    for pid, directory in manifest.projects:
        with open(directory / "project.json", encoding="utf-8") as fh:
            mj = json.load(fh)
        out[pid] = [(rel, (directory / rel).read_text(encoding="utf-8"))
                    for rel in mj["sources"]]
    return out


@pytest.fixture(scope="session")
def corpus_programs(corpus_sources):
    return {pid: lang.parse_project(sources, pid)
            for pid, sources in corpus_sources.items()}


@pytest.fixture(scope="session")
def corpus_artifacts(manifest):
    return {art.project_id: art for art in pipeline.run_corpus(manifest)}
