"""Spectrum database: building, saving and loading the primitive-orbit census"""

import csv
import hashlib
import io
import multiprocessing
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional

import numpy as np
from tqdm import tqdm

from scatterlen_cli import __version__
from scatterlen_cli.core.geometry import ObstacleSystem
from scatterlen_cli.core.linearization import poincare_map
from scatterlen_cli.core.orbit_solver import DEFAULT_STARTS, DEFAULT_TOL, solve_cycle
from scatterlen_cli.core.symbolic import (
    Necklace, Word, enumerate_necklaces, format_word, parse_word, prime_cycle_count,
)
from scatterlen_cli.utils.errors import (
    ScatterlenError, SolverError, SpectrumError, SpectrumFormatError, StaleCacheError,
)
from scatterlen_cli.utils.logger import get_logger

logger = get_logger(__name__)

COLUMNS = ['word', 'm', 'T', 'lambda_u', 'det_factor', 'residual']
HEADER_KEYS = ('geometry_hash', 'kappa', 'n_max', 'version', 'seed', 'rows', 'checksum')


@dataclass(frozen=True)
class SpectrumRow:
    word: Word
    m: int
    length: float
    lambda_u: float
    det_factor: float
    residual: float

    @property
    def parity(self):
        return 'even' if self.m % 2 == 0 else 'odd'


@dataclass
class SpectrumDB:
    """Primitive periodic rays with 2 <= |gamma| <= n_max, sorted by (m, word)."""
    geometry_hash: str
    kappa: int
    n_max: int
    rows: List[SpectrumRow]
    version: str = __version__
    seed: int = 0
    _by_period: Dict[int, List[SpectrumRow]] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        self._by_period = {}
        for row in self.rows:
            self._by_period.setdefault(row.m, []).append(row)

    def __len__(self):
        return len(self.rows)

    def rows_at(self, m: int) -> List[SpectrumRow]:
        return list(self._by_period.get(m, []))

    def rows_upto(self, n: int) -> List[SpectrumRow]:
        return [row for row in self.rows if row.m <= n]

    def lengths_at(self, m: int) -> np.ndarray:
        return np.array([row.length for row in self._by_period.get(m, [])], dtype=float)

    def lengths_upto(self, n: int) -> np.ndarray:
        return np.array([row.length for row in self.rows if row.m <= n], dtype=float)

    def require(self, n: int):
        """Raise SpectrumError unless the census is complete up to word length n."""
        if n > self.n_max:
            raise SpectrumError(f"Spectrum is complete to |gamma| <= {self.n_max}, {n} requested")

    def row_for(self, word) -> Optional[SpectrumRow]:
        rep = Necklace.from_word(word).representative
        for row in self._by_period.get(len(rep), []):
            if row.word == rep:
                return row
        return None

    def checksum(self):
        return hashlib.sha256(_rows_text(self.rows).encode('ascii')).hexdigest()


def _fmt(x):
    return f"{x:.17g}"


def _rows_text(rows: Iterable[SpectrumRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([format_word(row.word), row.m, _fmt(row.length), _fmt(row.lambda_u),
                         _fmt(row.det_factor), _fmt(row.residual)])
    return buffer.getvalue()


def _solve_row(task):
    system, word, tol, seed, starts = task
    try:
        orbit = solve_cycle(system, word, tol=tol, seed=seed, starts=starts)
        stability = poincare_map(orbit)
    except ScatterlenError as e:
        raise SolverError(f"necklace {format_word(word)}: {e}")
    return SpectrumRow(word=word, m=len(word), length=orbit.length, lambda_u=stability.lambda_u,
                       det_factor=stability.det_factor, residual=orbit.gradient_residual)


def build_spectrum(system: ObstacleSystem, n_max: int, threads: int = 1, tol=DEFAULT_TOL, seed: int = 0,
                   starts: int = DEFAULT_STARTS, existing: Optional[SpectrumDB] = None,
                   progress: bool = False) -> SpectrumDB:
    """
    Solve every primitive necklace with 2 <= m <= n_max.

    Rows already present in ``existing`` (same geometry) are reused, so
    extending n_max only solves the new periods. Results do not depend on
    ``threads``: workers return rows in necklace order.

    Args:
        system: validated obstacle system
        n_max (int): largest period
        threads (int): worker processes (1 solves in-process)
        tol (float): solver tolerance on |grad L|
        seed (int): multi-start seed
        starts (int): jittered starts per necklace
        existing: previously built spectrum to extend
        progress (bool): show a tqdm progress bar

    Returns:
        SpectrumDB

    Raises:
        SolverError: any necklace failed, named in the message
        StaleCacheError: ``existing`` belongs to another geometry
    """
    if n_max < 2:
        raise ValueError(f"n_max must be >= 2, got {n_max}")
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")

    geometry_hash = system.geometry_hash()
    cached = {}
    if existing is not None:
        if existing.geometry_hash != geometry_hash:
            raise StaleCacheError("Cached spectrum was built for a different geometry")
        cached = {row.word: row for row in existing.rows if row.m <= n_max}
        logger.info("reusing %d cached rows (cached n_max = %d)", len(cached), existing.n_max)

    words = [necklace.representative for m in range(2, n_max + 1)
             for necklace in enumerate_necklaces(system.kappa, m)]
    tasks = [(system, word, tol, seed, starts) for word in words if word not in cached]
    logger.info("solving %d of %d necklaces with %d worker(s)", len(tasks), len(words), threads)

    solved = {}
    with tqdm(total=len(tasks), desc="necklaces", disable=not progress, leave=False) as bar:
        if threads == 1 or len(tasks) < 2:
            results = map(_solve_row, tasks)
            for row in results:
                solved[row.word] = row
                bar.update(1)
        else:
            chunksize = max(1, len(tasks) // (threads * 8))
            with multiprocessing.Pool(threads) as pool:
                for row in pool.imap(_solve_row, tasks, chunksize=chunksize):
                    solved[row.word] = row
                    bar.update(1)

    rows = [cached[word] if word in cached else solved[word] for word in words]
    return SpectrumDB(geometry_hash=geometry_hash, kappa=system.kappa, n_max=n_max, rows=rows, seed=seed)


def save_spectrum(db: SpectrumDB, path) -> str:
    """
    Write the spectrum as CSV with a '#' key=value header block.

    Returns:
        str: the path written
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    body = _rows_text(db.rows)
    header = {
        'geometry_hash': db.geometry_hash,
        'kappa': db.kappa,
        'n_max': db.n_max,
        'version': db.version,
        'seed': db.seed,
        'rows': len(db.rows),
        'checksum': hashlib.sha256(body.encode('ascii')).hexdigest(),
    }
    with open(path, 'w', newline='') as f:
        f.write("# scatterlen spectrum\n")
        for key in HEADER_KEYS:
            f.write(f"# {key}={header[key]}\n")
        f.write(body)
    return path


def load_spectrum(path, system: Optional[ObstacleSystem] = None) -> SpectrumDB:
    """
    Read and validate a spectrum file.

    Args:
        path (str): spectrum CSV
        system: geometry the spectrum must belong to (skipped if None)

    Returns:
        SpectrumDB

    Raises:
        SpectrumFormatError: malformed header or rows (with line number),
            checksum mismatch, missing or unexpected orbits
        StaleCacheError: geometry hash mismatch
    """
    if not os.path.exists(path):
        raise SpectrumFormatError(f"Spectrum file not found: {path}")
    with open(path, newline='') as f:
        lines = f.read().split('\n')
    if lines and lines[-1] == '':
        lines.pop()

    header = {}
    first_row_line = None
    for number, line in enumerate(lines, start=1):
        if not line.startswith('#'):
            first_row_line = number
            break
        text = line[1:].strip()
        if '=' in text:
            key, value = text.split('=', 1)
            header[key.strip()] = value.strip()
    missing = [key for key in HEADER_KEYS if key not in header]
    if missing:
        raise SpectrumFormatError(f"Missing header keys: {', '.join(missing)}")
    if first_row_line is None or lines[first_row_line - 1] != ','.join(COLUMNS):
        raise SpectrumFormatError(f"Expected column line '{','.join(COLUMNS)}'", row=first_row_line)

    if system is not None and header['geometry_hash'] != system.geometry_hash():
        raise StaleCacheError("Spectrum was built for a different geometry (hash mismatch)")

    try:
        kappa = int(header['kappa'])
        n_max = int(header['n_max'])
        seed = int(header['seed'])
        expected_rows = int(header['rows'])
    except ValueError as e:
        raise SpectrumFormatError(f"Invalid header value: {e}")

    rows = []
    for number in range(first_row_line + 1, len(lines) + 1):
        fields = next(csv.reader([lines[number - 1]]))
        if len(fields) != len(COLUMNS):
            raise SpectrumFormatError(f"expected {len(COLUMNS)} fields, found {len(fields)}", row=number)
        try:
            word = parse_word(fields[0])
            Necklace(word)
            row = SpectrumRow(word=word, m=int(fields[1]), length=float(fields[2]),
                              lambda_u=float(fields[3]), det_factor=float(fields[4]), residual=float(fields[5]))
        except ValueError as e:
            raise SpectrumFormatError(str(e), row=number)
        if row.m != len(word):
            raise SpectrumFormatError(f"m = {row.m} does not match word {fields[0]}", row=number)
        if rows and (rows[-1].m, rows[-1].word) >= (row.m, row.word):
            raise SpectrumFormatError("rows not sorted by (m, word) or duplicated", row=number)
        rows.append(row)

    if len(rows) != expected_rows:
        raise SpectrumFormatError(f"header announces {expected_rows} rows, file has {len(rows)}")
    body_text = '\n'.join(lines[first_row_line - 1:]) + '\n'
    if hashlib.sha256(body_text.encode('ascii')).hexdigest() != header['checksum']:
        raise SpectrumFormatError("row checksum mismatch")

    per_period = Counter(row.m for row in rows)
    for m in range(2, n_max + 1):
        if per_period.get(m, 0) != prime_cycle_count(kappa, m):
            raise SpectrumFormatError(
                f"period {m}: {per_period.get(m, 0)} rows, expected {prime_cycle_count(kappa, m)}"
            )
    if any(m > n_max for m in per_period):
        raise SpectrumFormatError("rows beyond the announced n_max")

    return SpectrumDB(geometry_hash=header['geometry_hash'], kappa=kappa, n_max=n_max, rows=rows,
                      version=header['version'], seed=seed)
