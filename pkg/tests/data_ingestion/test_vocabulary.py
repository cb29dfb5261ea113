import pytest

from src.constants import PAD_ID, BOS_ID, EOS_ID, UNK_ID, UNK_CHAR
from src.data_ingestion.vocabulary import (
    Vocabulary, build_vocabulary, encode, decode, save_vocabulary, load_vocabulary)
from src.exceptions import ArgumentError, ConsistencyError


def test_build_vocabulary_keeps_all_when_room():
    v = build_vocabulary(['aab'], max_size=6)
    assert len(v) == 6
    assert 'a' in v and 'b' in v
    assert v.id_to_char[:4] == ['<pad>', '<s>', '</s>', '<unk>']


def test_build_vocabulary_keeps_most_frequent():
    v = build_vocabulary(['aab'], max_size=5)
    assert len(v) == 5
    assert encode(v, 'a') == [4]
    assert encode(v, 'b') == [UNK_ID]


def test_build_vocabulary_ties_follow_first_occurrence():
    v = build_vocabulary(['cab', 'bac'], max_size=6)
    # c, a, b all appear twice; c and a came first
    assert v.id_to_char[4:] == ['c', 'a']
    assert build_vocabulary(['cab', 'bac'], max_size=6) == v


@pytest.mark.parametrize("texts, max_size", [([], 10), (['', ''], 10), (['ab'], 4)])
def test_build_vocabulary_errors(texts, max_size):
    with pytest.raises(ArgumentError):
        build_vocabulary(texts, max_size)


@pytest.mark.parametrize("text, expected",
                         [('', []),
                          ('ab', [4, 5]),
                          ('aX', [4, UNK_ID])])
def test_encode(text, expected):
    v = build_vocabulary(['aab'], max_size=6)
    assert encode(v, text) == expected


def test_encode_decode_round_trip_cjk():
    v = build_vocabulary(['航班多人吸烟', '机组人员与乘客冲突'])
    text = '人员吸烟冲突'
    assert decode(v, encode(v, text)) == text
    ids = encode(v, text)
    assert encode(v, decode(v, ids)) == ids


def test_decode_special_ids():
    v = build_vocabulary(['ab'])
    assert decode(v, [BOS_ID, 4, UNK_ID, 5, EOS_ID, PAD_ID]) == f'a{UNK_CHAR}b'
    with pytest.raises(ArgumentError):
        decode(v, [len(v)])
    with pytest.raises(ArgumentError):
        decode(v, [-1])


def test_vocabulary_file_round_trip(tmp_path):
    v = build_vocabulary(['上海的互联网 公司', 'BAT巨头'])
    path = tmp_path / 'vocab.tsv'
    save_vocabulary(v, str(path))

    lines = path.read_text(encoding='utf-8').split('\n')
    assert lines[:4] == ['0\t<pad>', '1\t<s>', '2\t</s>', '3\t<unk>']
    assert load_vocabulary(str(path)) == v


def test_load_vocabulary_rejects_bad_header(tmp_path):
    path = tmp_path / 'vocab.tsv'
    path.write_text('0\t<pad>\n1\t<s>\n2\t<unk>\n3\t</s>\n4\ta\n', encoding='utf-8')
    with pytest.raises(ConsistencyError):
        load_vocabulary(str(path))


def test_vocabulary_rejects_duplicates_and_overflow():
    with pytest.raises(ArgumentError):
        Vocabulary(['a', 'a'])
    with pytest.raises(ArgumentError):
        Vocabulary(['a', 'b'], max_size=5)
