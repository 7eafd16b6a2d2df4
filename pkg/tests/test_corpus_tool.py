import os
import json
import pytest

from corpus_tool import load_catalog, main
from conftest import CORPUS_DIR, CORPUS_FILES

CATALOG = os.path.join(CORPUS_DIR, 'corpus.catalog')


def test_load_catalog():
    paths = load_catalog(CATALOG)
    assert sorted(path.name for path in paths) == CORPUS_FILES


def test_load_catalog_missing_entry(tmp_path):
    catalog = tmp_path / 'broken.catalog'
    catalog.write_text(json.dumps([{'sigma': 'missing.sigma'}]))
    with pytest.raises(SystemExit) as error:
        load_catalog(str(catalog))
    assert error.value.code == 2
    catalog.write_text(json.dumps([{'group': 'free2.sigma'}]))
    with pytest.raises(SystemExit):
        load_catalog(str(catalog))


def test_corpus_checks_pass(capsys):
    code = main(['--catalog', CATALOG, '--samples', '100', '--subspaces', '5', '--no-progress', '--workers', '2'])
    out = capsys.readouterr().out
    assert code == 0, out
    lines = out.splitlines()
    assert 'free2.sigma: theorem-a: pass (0 mismatches)' in lines
    assert 'synthetic_quadrant.sigma: corollary-g: pass' in lines
    assert not [line for line in lines if 'FAIL' in line]
