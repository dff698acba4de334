"""Excel workbook for the Zeeman-population comparison table"""
import json
import logging
import os
import tempfile
from typing import Any, Dict, List

from openpyxl import Workbook
from openpyxl.styles import Alignment, Border, Font, PatternFill, Side
from openpyxl.utils import get_column_letter

from qutrit_link.errors import ExportError

logger = logging.getLogger("excel_export")

TABLE_COLUMNS = [
    ("T1_us", "T1 (us)"),
    ("theta_inf", "theta_inf"),
    ("beta2_m1", "beta^2 m_F=-1"),
    ("beta2_0", "beta^2 m_F=0"),
    ("beta2_p1", "beta^2 m_F=+1"),
    ("entropy_bits", "E (bits)"),
    ("ref_beta2_m1", "ref beta^2 m_F=-1"),
    ("ref_beta2_0", "ref beta^2 m_F=0"),
    ("ref_beta2_p1", "ref beta^2 m_F=+1"),
    ("ref_entropy_printed", "ref E (printed)"),
    ("ref_entropy_exact", "ref E (exact)"),
    ("max_abs_diff", "max |diff|"),
]


def _sheet_rows(rows: List[Dict[str, Any]]) -> List[List[Any]]:
    out = [[label for _key, label in TABLE_COLUMNS]]
    for row in rows:
        out.append([row.get(key) for key, _label in TABLE_COLUMNS])
    return out


def _config_rows(config: Dict[str, Any]) -> List[List[Any]]:
    out = [["Block", "Key", "Value"]]
    for block, values in config.items():
        for key, value in values.items():
            if isinstance(value, (list, dict)):
                value = json.dumps(value)
            out.append([block, key, value])
    return out


def create_table1_workbook(rows: List[Dict[str, Any]], config: Dict[str, Any], output_path: str, *,
                           version: str = "") -> str:
    """Two sheets: the population table and the resolved run configuration."""
    wb = Workbook()
    wb.remove(wb.active)

    header_fill = PatternFill(start_color="1F4E78", end_color="1F4E78", fill_type="solid")
    header_font = Font(bold=True, color="FFFFFF", size=11)
    zebra_fill = PatternFill(start_color="F7F9FC", end_color="F7F9FC", fill_type="solid")
    border = Border(
        left=Side(style='thin'),
        right=Side(style='thin'),
        top=Side(style='thin'),
        bottom=Side(style='thin')
    )

    sheets = {"Zeeman populations": _sheet_rows(rows), "Config": _config_rows(config)}
    for sheet_name, data in sheets.items():
        ws = wb.create_sheet(title=sheet_name)
        for row_idx, row_data in enumerate(data, 1):
            for col_idx, cell_value in enumerate(row_data, 1):
                cell = ws.cell(row=row_idx, column=col_idx, value=cell_value)
                cell.border = border
                cell.alignment = Alignment(vertical='top', horizontal='left')
                if row_idx == 1:
                    cell.fill = header_fill
                    cell.font = header_font
                elif row_idx % 2 == 1:
                    cell.fill = zebra_fill
                if isinstance(cell_value, float):
                    cell.number_format = "0.000000"

        # Auto-adjust column widths
        for column in ws.columns:
            max_length = max((len(str(c.value)) for c in column if c.value is not None), default=0)
            ws.column_dimensions[get_column_letter(column[0].column)].width = min(max_length + 2, 50)
        ws.freeze_panes = "A2"

    if version:
        wb.properties.title = f"qutrit_link {version} Zeeman populations"

    directory = os.path.dirname(os.path.abspath(output_path))
    try:
        os.makedirs(directory, exist_ok=True)
        fd, tmp_path = tempfile.mkstemp(prefix=".tmp-", suffix=".xlsx", dir=directory)
    except OSError as exc:
        raise ExportError(f"cannot write {output_path}: {exc}") from exc
    os.close(fd)
    try:
        wb.save(tmp_path)
        os.replace(tmp_path, output_path)
    except OSError as exc:
        logger.exception("Failed to save workbook to %s", output_path)
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise ExportError(f"cannot write {output_path}: {exc}") from exc
    logger.info("create_table1_workbook complete: file=%s bytes=%s", output_path, os.path.getsize(output_path))
    return output_path
