import pytest

from scatterlen_cli.core.geometry import Disk, ObstacleSystem
from scatterlen_cli.core.store import build_spectrum, load_spectrum, save_spectrum
from scatterlen_cli.utils.errors import SpectrumError, SpectrumFormatError, StaleCacheError


@pytest.fixture(scope="module")
def small_db(asymmetric):
    return build_spectrum(asymmetric, 4)


def test_build_counts(small_db):
    assert len(small_db) == 8
    assert [len(small_db.rows_at(m)) for m in (2, 3, 4)] == [3, 2, 3]
    assert small_db.rows[0].word == (1, 2)
    assert small_db.row_for((2, 1)).word == (1, 2)
    assert small_db.row_for((1, 2, 1, 3, 1, 2)) is None


def test_save_and_load(small_db, asymmetric, tmp_path):
    path = save_spectrum(small_db, str(tmp_path / "spectrum.csv"))
    loaded = load_spectrum(path, asymmetric)
    assert loaded.rows == small_db.rows
    assert loaded.n_max == 4
    assert loaded.checksum() == small_db.checksum()


def test_saves_are_byte_identical(small_db, asymmetric, tmp_path):
    first = save_spectrum(small_db, str(tmp_path / "a.csv"))
    second = save_spectrum(build_spectrum(asymmetric, 4), str(tmp_path / "b.csv"))
    with open(first, 'rb') as a, open(second, 'rb') as b:
        assert a.read() == b.read()


def test_threads_do_not_change_rows(small_db, asymmetric):
    assert build_spectrum(asymmetric, 4, threads=2).rows == small_db.rows


def test_stale_geometry(small_db, tmp_path):
    path = save_spectrum(small_db, str(tmp_path / "spectrum.csv"))
    other = ObstacleSystem([Disk((0.0, 0.0), 1.0), Disk((6.0, 0.0), 1.0), Disk((3.0, 5.0), 1.0)])
    with pytest.raises(StaleCacheError):
        load_spectrum(path, other)
    with pytest.raises(StaleCacheError):
        build_spectrum(other, 5, existing=small_db)


def test_truncated_row_reports_line(small_db, tmp_path):
    path = save_spectrum(small_db, str(tmp_path / "spectrum.csv"))
    with open(path) as f:
        lines = f.read().splitlines()
    lines[-1] = ','.join(lines[-1].split(',')[:3])
    with open(path, 'w') as f:
        f.write('\n'.join(lines) + '\n')
    with pytest.raises(SpectrumFormatError, match=f"line {len(lines)}"):
        load_spectrum(path)


def test_edited_row_fails_checksum(small_db, tmp_path):
    path = save_spectrum(small_db, str(tmp_path / "spectrum.csv"))
    with open(path) as f:
        text = f.read()
    first = small_db.rows[0]
    text = text.replace(f"{first.length:.17g}", f"{first.length + 1e-6:.17g}", 1)
    with open(path, 'w') as f:
        f.write(text)
    with pytest.raises(SpectrumFormatError, match="checksum"):
        load_spectrum(path)


def test_missing_file(tmp_path):
    with pytest.raises(SpectrumFormatError, match="not found"):
        load_spectrum(str(tmp_path / "absent.csv"))


def test_extension_reuses_rows(small_db, asymmetric):
    extended = build_spectrum(asymmetric, 5, existing=small_db)
    assert extended.rows[:8] == small_db.rows
    assert len(extended.rows_at(5)) == 6
    assert extended.n_max == 5


def test_require(small_db):
    small_db.require(4)
    with pytest.raises(SpectrumError, match="complete to"):
        small_db.require(5)
