"""Instance files.

Graph problems::

    p <maxcut|spinglass> <l> <edges> <optimum|?>
    u v w            (one line per edge, 0-based vertices, integer weight)

NK-S1::

    p nk <l> <k> <optimum|?>
    <2**k reals>     (one line per window)

MAX-3SAT uses DIMACS CNF with an optional ``c optimum <int>`` comment.
"""
from __future__ import annotations

import os
from typing import Optional

import numpy as np

from .functions import MaxCut, MaxSat, NKLandscape, SpinGlass


class InstanceFormatError(ValueError):
    pass


def _optimum_token(value: Optional[float]) -> str:
    if value is None:
        return "?"
    return repr(int(value)) if float(value).is_integer() else repr(float(value))


def _parse_optimum(token: str) -> Optional[float]:
    if token == "?":
        return None
    try:
        return float(token)
    except ValueError as exc:
        raise InstanceFormatError(f"bad optimum {token!r}") from exc


def write_instance(instance, path) -> None:
    with open(path, "w") as fh:
        if isinstance(instance, (MaxCut, SpinGlass)):
            name = "spinglass" if isinstance(instance, SpinGlass) else "maxcut"
            fh.write(f"p {name} {instance.length} {len(instance.edges)} "
                     f"{_optimum_token(instance.optimum)}\n")
            if isinstance(instance, MaxCut):
                fh.write(f"c kind {instance.kind}\n")
            for u, v, w in instance.edges.tolist():
                fh.write(f"{u} {v} {w}\n")
        elif isinstance(instance, NKLandscape):
            fh.write(f"p nk {instance.length} {instance.k} {_optimum_token(instance.optimum)}\n")
            for row in instance.table:
                fh.write(" ".join(repr(float(v)) for v in row) + "\n")
        elif isinstance(instance, MaxSat):
            if instance.optimum is not None:
                fh.write(f"c optimum {_optimum_token(instance.optimum)}\n")
            fh.write(f"p cnf {instance.length} {len(instance.clauses)}\n")
            for clause in instance.clauses.tolist():
                fh.write(" ".join(map(str, clause)) + " 0\n")
        else:
            raise TypeError(f"{instance.kind} instances are parameterised, not stored in files")


def read_instance(path):
    with open(path) as fh:
        lines = [ln.strip() for ln in fh]
    lines = [ln for ln in lines if ln]
    header = next((ln for ln in lines if ln.startswith("p ")), None)
    if header is None:
        raise InstanceFormatError(f"{os.fspath(path)}: missing 'p' header")
    fields = header.split()
    if len(fields) >= 2 and fields[1] == "cnf":
        return _read_cnf(lines)
    if len(fields) != 5:
        raise InstanceFormatError(f"malformed header {header!r}")
    comments = [ln for ln in lines if ln.startswith("c ")]
    body = [ln for ln in lines if not ln.startswith(("p ", "c "))]
    name = fields[1]
    try:
        length, count = int(fields[2]), int(fields[3])
    except ValueError as exc:
        raise InstanceFormatError(f"malformed header {header!r}") from exc
    optimum = _parse_optimum(fields[4])
    if name in ("maxcut", "spinglass"):
        if len(body) != count:
            raise InstanceFormatError(f"header declares {count} edges, found {len(body)}")
        try:
            edges = np.array([[int(t) for t in ln.split()] for ln in body], dtype=np.int64)
        except ValueError as exc:
            raise InstanceFormatError("non-integer edge entry") from exc
        edges = edges.reshape(-1, 3) if edges.size else np.zeros((0, 3), dtype=np.int64)
        if edges.shape[1:] != (3,):
            raise InstanceFormatError("edge lines must be 'u v w'")
        try:
            if name == "spinglass":
                return SpinGlass(length, edges, optimum)
            kind = "maxcut-sparse"
            for c in comments:
                parts = c.split()
                if parts[1:2] == ["kind"] and len(parts) == 3:
                    kind = parts[2]
            return MaxCut(length, edges, optimum, kind=kind)
        except ValueError as exc:
            raise InstanceFormatError(str(exc)) from exc
    if name == "nk":
        k = count
        if len(body) != length - k + 1:
            raise InstanceFormatError(f"NK with l={length}, k={k} needs {length - k + 1} rows")
        table = np.array([[float(t) for t in ln.split()] for ln in body])
        if table.shape != (length - k + 1, 2 ** k):
            raise InstanceFormatError("NK rows must have 2**k entries")
        if table.min() < 0 or table.max() > 1:
            raise InstanceFormatError("NK table entries must lie in [0, 1]")
        return NKLandscape(table, optimum)
    raise InstanceFormatError(f"unknown instance type {name!r}")


def _read_cnf(lines):
    optimum = None
    header = None
    literals: list[int] = []
    for ln in lines:
        if ln.startswith("c"):
            parts = ln.split()
            if len(parts) == 3 and parts[1] == "optimum":
                optimum = _parse_optimum(parts[2])
        elif ln.startswith("p"):
            header = ln.split()
        else:
            try:
                literals.extend(int(t) for t in ln.split())
            except ValueError as exc:
                raise InstanceFormatError(f"bad clause line {ln!r}") from exc
    if header is None or len(header) != 4:
        raise InstanceFormatError("malformed 'p cnf' header")
    n_vars, n_clauses = int(header[2]), int(header[3])
    clauses, current = [], []
    for lit in literals:
        if lit == 0:
            if len(current) != 3:
                raise InstanceFormatError(f"clause {current} does not have exactly 3 literals")
            clauses.append(current)
            current = []
        else:
            if abs(lit) > n_vars:
                raise InstanceFormatError(f"literal {lit} exceeds {n_vars} variables")
            current.append(lit)
    if current:
        raise InstanceFormatError("last clause is not terminated by 0")
    if len(clauses) != n_clauses:
        raise InstanceFormatError(f"header declares {n_clauses} clauses, found {len(clauses)}")
    return MaxSat(n_vars, np.array(clauses, dtype=np.int64).reshape(-1, 3), optimum)
