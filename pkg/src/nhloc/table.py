"""Minimal column-named row table shared by the toy model and the experiment engine."""

import math
from dataclasses import dataclass, field


def _same(a, b):
    if isinstance(a, float) and isinstance(b, float) and math.isnan(a) and math.isnan(b):
        return True
    return a == b


@dataclass
class Table:
    columns: tuple
    rows: list = field(default_factory=list)

    def __post_init__(self):
        self.columns = tuple(self.columns)
        if len(set(self.columns)) != len(self.columns):
            raise ValueError(f"duplicate column names in {self.columns}")
        self.rows = [tuple(r) for r in self.rows]
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ValueError(f"row has {len(r)} fields, expected {len(self.columns)}")

    def __len__(self):
        return len(self.rows)

    def __eq__(self, other):
        if not isinstance(other, Table) or self.columns != other.columns:
            return False
        if len(self.rows) != len(other.rows):
            return False
        return all(_same(a, b) for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb))

    def append(self, row):
        row = tuple(row)
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} fields, expected {len(self.columns)}")
        self.rows.append(row)

    def column(self, name):
        j = self.columns.index(name)
        return [r[j] for r in self.rows]

    def records(self):
        return [dict(zip(self.columns, r)) for r in self.rows]

    def where(self, **match):
        idx = {self.columns.index(k): v for k, v in match.items()}
        return Table(self.columns, [r for r in self.rows if all(r[j] == v for j, v in idx.items())])

    def drop(self, names):
        keep = [j for j, c in enumerate(self.columns) if c not in set(names)]
        return Table([self.columns[j] for j in keep], [[r[j] for j in keep] for r in self.rows])
