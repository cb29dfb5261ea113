import pytest

from run import main, USAGE


def test_unknown_command(capsys):
    assert main([]) == 2
    assert main(['predict']) == 2
    assert USAGE in capsys.readouterr().err


def test_rouge_command(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    (tmp_path / 'cand.txt').write_text('abcd\n', encoding='utf-8')
    (tmp_path / 'ref.txt').write_text('abce\n', encoding='utf-8')

    assert main(['rouge', '--candidates', 'cand.txt', '--references', 'ref.txt']) == 0
    out = capsys.readouterr().out
    assert 'rouge1_p=0.75 rouge1_r=0.75 rouge1_f=0.75' in out
    assert 'pair_count=1' in out
    assert (tmp_path / 'logs').is_dir()


def test_missing_required_option(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    with pytest.raises(KeyError):
        main(['rouge', '--candidates', 'cand.txt'])
