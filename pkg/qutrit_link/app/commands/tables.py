import os
from typing import Callable, Dict, List

from qutrit_link import __version__


def _columns(rows: List[dict]) -> List[str]:
    header: List[str] = []
    for row in rows:
        for key in row:
            if key not in header:
                header.append(key)
    return header


def create_table_commands(*, pipeline_module, exports_module, excel_export_module) -> Dict[str, Callable]:
    def _write_rows(name: str, rows: List[dict], config, out_dir: str, fmt: str) -> None:
        if fmt == "csv":
            header = _columns(rows)
            exports_module.write_csv(
                os.path.join(out_dir, f"{name}.csv"), header,
                [[row.get(key) for key in header] for row in rows],
                config=config.to_dict(),
            )
        else:
            exports_module.write_json(os.path.join(out_dir, f"{name}.json"), {"rows": rows}, config=config.to_dict())

    def table1(config, out_dir: str, fmt: str) -> int:
        rows = pipeline_module.table1_rows(config)
        if fmt == "xlsx":
            excel_export_module.create_table1_workbook(
                rows, config.to_dict(), os.path.join(out_dir, "table1.xlsx"), version=__version__
            )
        else:
            _write_rows("table1", rows, config, out_dir, fmt)
        return 0

    def robustness(config, out_dir: str, fmt: str) -> int:
        _write_rows("robustness", pipeline_module.robustness_rows(config), config, out_dir, fmt)
        return 0

    return {"table1": table1, "robustness": robustness}
