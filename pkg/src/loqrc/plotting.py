"""gnuplot scripts for the CSV tables written by :mod:`loqrc.experiments`."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Dict, List, Sequence


def _read(path: Path) -> tuple[List[str], List[List[str]]]:
    if not path.exists():
        raise FileNotFoundError(f"no such CSV: {path}")
    with open(path, encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise ValueError(f"{path} has no data rows")
    return rows[0], rows[1:]


def _groups(header, rows, key: str) -> List[str]:
    col = header.index(key)
    seen: Dict[str, None] = {}
    for r in rows:
        seen.setdefault(r[col], None)
    return list(seen)


def _preamble(png: str, xlabel: str, ylabel: str, logy: bool = False, logx: bool = False) -> List[str]:
    lines = [
        "set datafile separator ','",
        "set key outside right",
        "set term pngcairo size 900,600",
        f"set output '{png}'",
        f"set xlabel '{xlabel}'",
        f"set ylabel '{ylabel}'",
        "set grid",
    ]
    if logy:
        lines.append("set logscale y; set format y '10^{%L}'")
    if logx:
        lines.append("set logscale x; set format x '10^{%L}'")
    return lines


def _series_plot(csv_path: Path, header, rows, group: str, x: str, y: str) -> str:
    gi, xi, yi = header.index(group) + 1, header.index(x) + 1, header.index(y) + 1
    parts = []
    for g in _groups(header, rows, group):
        parts.append(f"'{csv_path.name}' every ::1 using (strcol({gi}) eq '{g}' ? ${xi} : NaN):{yi} "
                     f"with linespoints title '{group}={g}'")
    return "plot " + ", \\\n     ".join(parts)


def script_for(csv_path: Path) -> str:
    header, rows = _read(csv_path)
    stem = csv_path.stem
    png = stem + ".png"
    if "tau" in header:
        lines = _preamble(png, "delay tau", "MC(tau)")
        lines.append(_series_plot(csv_path, header, rows, "alpha_fb", "tau", "mc_mean"))
    elif "mc_tot_mean" in header and "n_m" in header:
        lines = _preamble(png, "N_m", "MC_tot", logx=True)
        lines.append(_series_plot(csv_path, header, rows, "alpha_fb", "n_m", "mc_tot_mean"))
    elif "mc_tot_mean" in header:
        lines = _preamble(png, "alpha_fb", "MC_tot")
        xi, yi = header.index("alpha_fb") + 1, header.index("mc_tot_mean") + 1
        if "alpha_in" in header:
            lines.append(_series_plot(csv_path, header, rows, "alpha_in", "alpha_fb", "mc_tot_mean"))
        else:
            lines.append(f"plot '{csv_path.name}' every ::1 using {xi}:{yi} with linespoints notitle")
    elif "nmse_mean" in header:
        task = rows[0][header.index("task")]
        if task == "narma":
            lines = _preamble(png, "alpha_fb", "NMSE", logy=True)
            lines.append(_series_plot(csv_path, header, rows, "horizon_or_order",
                                      "alpha_fb", "nmse_mean"))
        else:
            lines = _preamble(png, "prediction horizon tau_f", "NMSE", logy=True)
            lines.append(_series_plot(csv_path, header, rows, "alpha_fb",
                                      "horizon_or_order", "nmse_mean"))
    else:
        raise ValueError(f"{csv_path}: unrecognised table header {header}")
    return "\n".join(lines) + "\n"


def emit_plot_scripts(csv_paths: Sequence[str | Path], out_dir: str | Path | None = None) -> List[Path]:
    """Write one ``.gp`` script per CSV (next to the CSV unless ``out_dir`` is given).

    Every CSV is validated before anything is written.
    """
    scripts = [(Path(p), script_for(Path(p))) for p in csv_paths]
    written = []
    for path, text in scripts:
        target = (Path(out_dir) if out_dir else path.parent) / (path.stem + ".gp")
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
        written.append(target)
    return written
