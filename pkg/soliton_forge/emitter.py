"""Implements emitters and readers for profile CSV, psi CSV, report JSON and plot data."""
import abc
import csv
import io
import json
import logging
import os
import pathlib
from contextlib import contextmanager
from typing import Dict, Iterator, List, Type

import numpy as np
from pydantic import BaseModel, ValidationError

from soliton_forge.common import ProfileParseError
from soliton_forge.geometry import beta, node_curvature, radial_state
from soliton_forge.model import OriginSeries, PsiProfile, RadialGrid, SolitonProfile, VerificationReport
from soliton_forge.psi import extrapolate_to_one

logger = logging.getLogger(__name__)

PROFILE_MAGIC = '# soliton-forge profile v1'
PSI_MAGIC = '# soliton-forge psi v1'
PROFILE_COLUMNS = ['r', 'phi', 'dphi', 'ddphi', 'df', 'ddf']
PSI_COLUMNS = ['s', 'psi', 'dpsi', 'u']
PROFILE_CURVES = 'profile_curves.csv'
PSI_CURVES = 'psi_curves.csv'


def number(value: float) -> str:
    """17 significant digits, enough to read back the same double."""
    return format(float(value), '.17g')


class Emitter(BaseModel, abc.ABC):
    """Base for the table and report writers."""

    work_dir: str
    """Output directory, created on init."""
    open_files: Dict[str, io.IOBase] = {}
    """Handles keyed by file name, closed together."""

    class Config:
        """File handles are not pydantic types."""

        arbitrary_types_allowed = True

    def __init__(self, **data):
        """Create work_dir if missing."""
        super().__init__(**data)
        pathlib.Path(self.work_dir).mkdir(parents=True, exist_ok=True)

    def open(self, file_name: str) -> io.IOBase:
        """Text handle for file_name, opened once per emitter."""
        if file_name not in self.open_files:
            self.open_files[file_name] = open(os.path.join(self.work_dir, file_name), 'w', newline='',
                                              encoding='utf-8')
        return self.open_files[file_name]

    def close(self) -> None:
        """Flush and forget every handle."""
        for handle in self.open_files.values():
            handle.close()
        self.open_files.clear()

    @abc.abstractmethod
    def emit(self, item, file_name: str = None) -> str:
        """Write item to file_name, return the path."""


class ProfileEmitter(Emitter):
    """Profile CSV v1."""

    def emit(self, profile: SolitonProfile, file_name: str = 'profile.csv') -> str:
        """One row per node."""
        file = self.open(file_name)
        file.write(f"{PROFILE_MAGIC}; exact_soliton={'true' if profile.is_exact_soliton else 'false'}\n")
        writer = csv.writer(file, lineterminator='\n')
        writer.writerow(PROFILE_COLUMNS)
        for row in zip(profile.r, profile.phi, profile.dphi, profile.ddphi, profile.df, profile.ddf):
            writer.writerow([number(value) for value in row])
        logger.info(f"wrote {len(profile.r)} profile nodes to {file.name}")
        return file.name


class PsiEmitter(Emitter):
    """psi CSV v1; readers extrapolate the limits at s = 1 from the rows."""

    def emit(self, psi: PsiProfile, file_name: str = 'psi.csv') -> str:
        """One row per s node."""
        file = self.open(file_name)
        file.write(f"{PSI_MAGIC}\n")
        writer = csv.writer(file, lineterminator='\n')
        writer.writerow(PSI_COLUMNS)
        for row in zip(psi.s_nodes, psi.psi, psi.dpsi, psi.u):
            writer.writerow([number(value) for value in row])
        logger.info(f"wrote {len(psi.s_nodes)} psi nodes to {file.name}")
        return file.name


class ReportEmitter(Emitter):
    """Report JSON v1."""

    def emit(self, report: VerificationReport, file_name: str = 'report.json') -> str:
        """Deterministic JSON."""
        file = self.open(file_name)
        file.write(report.to_json())
        logger.info(f"wrote report with {len(report.checks)} checks to {file.name}")
        return file.name


class CurveEmitter(Emitter):
    """Plot-ready columns; any plotting tool can read them."""

    def emit(self, profile: SolitonProfile, file_name: str = PROFILE_CURVES, psi: PsiProfile = None) -> str:
        """r, R, lambda, mu, df, beta per node; with psi also s, psi, s - psi, u."""
        curvature = node_curvature(profile)
        beta_ = beta(radial_state(profile, profile.r), curvature)
        file = self.open(file_name)
        writer = csv.writer(file, lineterminator='\n')
        writer.writerow(['r', 'R', 'lambda', 'mu', 'df', 'beta'])
        for row in zip(profile.r, curvature.R, curvature.lam, curvature.mu, profile.df, beta_):
            writer.writerow([number(value) for value in row])
        if psi is not None:
            writer = csv.writer(self.open(PSI_CURVES), lineterminator='\n')
            writer.writerow(['s', 'psi', 'margin', 'u'])
            for s, value, u in zip(psi.s_nodes, psi.psi, psi.u):
                writer.writerow([number(s), number(value), number(s - value), number(u)])
        logger.info(f"wrote plot data to {self.work_dir}")
        return file.name


@contextmanager
def emitter(kind: Type[Emitter], path: str) -> Iterator[Emitter]:
    """Create an emitter for the directory of path, close when done."""
    emitter_ = kind(work_dir=os.path.dirname(os.path.abspath(path)))
    try:
        yield emitter_
    finally:
        emitter_.close()


def write_profile(profile: SolitonProfile, path: str) -> str:
    """Profile CSV at path, returns the path written."""
    with emitter(ProfileEmitter, path) as emitter_:
        return emitter_.emit(profile, os.path.basename(path))


def write_psi(psi: PsiProfile, path: str) -> str:
    """psi CSV at path."""
    with emitter(PsiEmitter, path) as emitter_:
        return emitter_.emit(psi, os.path.basename(path))


def write_report(report: VerificationReport, path: str) -> str:
    """Report JSON at path."""
    with emitter(ReportEmitter, path) as emitter_:
        return emitter_.emit(report, os.path.basename(path))


def write_curves(profile: SolitonProfile, psi: PsiProfile, plot_dir: str) -> str:
    """Plot-ready curves into plot_dir."""
    with emitter(CurveEmitter, os.path.join(plot_dir, PROFILE_CURVES)) as emitter_:
        return emitter_.emit(profile, PROFILE_CURVES, psi=psi)


def _comment_fields(line: str, magic: str, line_number: int) -> Dict[str, str]:
    """key=value pairs after the magic prefix."""
    if not line.startswith(magic):
        raise ProfileParseError(f"expected {magic!r}", line_number)
    fields = {}
    for item in line[len(magic):].split(';'):
        if item.strip():
            if '=' not in item:
                raise ProfileParseError(f"expected key=value in comment, got {item.strip()!r}", line_number)
            key, value = item.split('=', 1)
            fields[key.strip()] = value.strip()
    return fields


def _read_table(path: str, magic: str, columns: List[str]) -> tuple:
    """Comment fields and the float columns, with line numbers in every error."""
    with open(path, encoding='utf-8', newline='') as file:
        lines = file.read().splitlines()
    if not lines:
        raise ProfileParseError("empty file", 1)
    fields = _comment_fields(lines[0], magic, 1)
    rows = csv.reader(lines[1:])
    header = next(rows, None)
    if header != columns:
        raise ProfileParseError(f"expected header {','.join(columns)}, got {header}", 2)
    values = []
    previous = None
    for line_number, row in enumerate(rows, start=3):
        if len(row) != len(columns):
            raise ProfileParseError(f"expected {len(columns)} fields, got {len(row)}", line_number)
        try:
            parsed = [float(value) for value in row]
        except ValueError as exc:
            raise ProfileParseError(f"not a number: {exc}", line_number) from exc
        if previous is not None and not parsed[0] > previous:
            raise ProfileParseError("nodes not increasing", line_number)
        previous = parsed[0]
        values.append(parsed)
    if not values:
        raise ProfileParseError("no data rows", 3)
    return fields, np.array(values).T


def read_profile(path: str) -> SolitonProfile:
    """Inverse of ProfileEmitter; exact profiles get the origin series at their first node."""
    fields, (r, phi, dphi, ddphi, df, ddf) = _read_table(path, PROFILE_MAGIC, PROFILE_COLUMNS)
    flag = fields.get('exact_soliton')
    if flag not in ('true', 'false'):
        raise ProfileParseError(f"exact_soliton must be true or false, got {flag}", 1)
    exact = flag == 'true'
    try:
        return SolitonProfile(grid=RadialGrid(nodes=r), phi=phi, dphi=dphi, ddphi=ddphi, df=df, ddf=ddf,
                              origin_data=OriginSeries(seed_radius=r[0]) if exact else None, is_exact_soliton=exact)
    except ValidationError as exc:
        raise ProfileParseError(f"invalid profile in {path}: {exc}") from exc


def read_psi(path: str) -> PsiProfile:
    """Inverse of PsiEmitter; the limits at s = 1 are extrapolated from the rows."""
    _, (s, psi, dpsi, u) = _read_table(path, PSI_MAGIC, PSI_COLUMNS)
    try:
        return PsiProfile(s_nodes=s, psi=psi, dpsi=dpsi, u=u, limit_at_one=extrapolate_to_one(s, psi),
                          u_limit_at_one=extrapolate_to_one(s, u))
    except ValueError as exc:
        raise ProfileParseError(f"invalid psi table in {path}: {exc}") from exc


def read_report(path: str) -> VerificationReport:
    """Inverse of ReportEmitter."""
    with open(path, encoding='utf-8') as file:
        try:
            document = json.load(file)
        except json.JSONDecodeError as exc:
            raise ProfileParseError(exc.msg, exc.lineno) from exc
    if not isinstance(document, dict) or document.get('version') != 1:
        raise ProfileParseError("expected a version 1 report object", 1)
    try:
        return VerificationReport.parse_obj(document)
    except ValidationError as exc:
        raise ProfileParseError(f"invalid report in {path}: {exc}") from exc
