"""Parameter sweeps over the closed-form bounds with a winner column."""

from __future__ import annotations

import datetime as _dt
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import bounds as B
from .divergences import AlphaLimit, parse_alpha
from .errors import DomainError, ParseError
from .serialization import format_float, to_jsonable, write_csv

__all__ = ["SweepGrid", "SweepResult", "run_sweep", "default_grid", "APPROACH_ORDER", "bound_cell",
           "SWEEP_QUANTITIES"]

APPROACH_ORDER = (B.Approach.AXIOMATIC, B.Approach.OPERATOR_SPACE, B.Approach.MIXED)
BASELINES = ("marwah", "beigi", "rubboli")
# "kappa" sweeps the generic bound with kappa given directly
SWEEP_QUANTITIES = ("cond_entropy", "cmi", "sep_distance", "kappa")


def _alpha_key(a):
    return str(a) if isinstance(a, AlphaLimit) else a


@dataclass
class SweepGrid:
    """Sweep specification; ``dims`` are ``d_A`` (or ``kappa`` for ``quantity="kappa"``)."""

    alphas: list
    eps: list
    dims: list
    quantity: str = "cond_entropy"
    approaches: list = field(default_factory=lambda: [a.value for a in APPROACH_ORDER])
    baselines: list = field(default_factory=list)

    def __post_init__(self):
        if not self.alphas or not self.eps or not self.dims:
            raise DomainError("sweep grids need non-empty alpha, eps and dims lists")
        self.alphas = [parse_alpha(a) for a in self.alphas]
        self.eps = [float(e) for e in self.eps]
        if any(not 0 <= e <= 1 for e in self.eps):
            raise DomainError("eps values must lie in [0, 1]")
        self.dims = [float(d) if self.quantity == "kappa" else int(d) for d in self.dims]
        if any(d < 1 for d in self.dims):
            raise DomainError("dimensions and kappa must be at least 1")
        if self.quantity not in SWEEP_QUANTITIES:
            raise DomainError(f"unknown sweep quantity {self.quantity!r}")
        self.approaches = [B.Approach.parse(a).value for a in self.approaches]
        for b in self.baselines:
            if b not in BASELINES:
                raise DomainError(f"unknown baseline {b!r}")

    @classmethod
    def from_dict(cls, obj):
        try:
            return cls(alphas=obj["alphas"], eps=obj["eps"], dims=obj["dims"],
                       quantity=obj.get("quantity", "cond_entropy"),
                       approaches=obj.get("approaches", [a.value for a in APPROACH_ORDER]),
                       baselines=obj.get("baselines", []))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed sweep grid: {exc}") from None

    @classmethod
    def from_json(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                return cls.from_dict(json.load(fh))
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON grid {path}: {exc}") from None


def default_grid() -> SweepGrid:
    """Artifact defaults: 64 log-spaced orders in [1.01, 10], 32 log-spaced eps in [1e-4, 0.5]."""
    return SweepGrid(alphas=list(np.geomspace(1.01, 10, 64)), eps=list(np.geomspace(1e-4, 0.5, 32)),
                     dims=[2, 4, 16, 256])


def bound_cell(quantity, approach, alpha, eps, dim):
    """One bound value; ``None`` when the approach does not exist at this order."""
    ap = B.Approach.parse(approach)
    a = parse_alpha(alpha)
    if ap is B.Approach.MIXED and not isinstance(a, AlphaLimit) and a < 1:
        return None
    if quantity == "kappa":
        if isinstance(a, AlphaLimit):
            return B.bound_generic_limit(ap, a, eps, dim)
        return B.bound_generic(ap, a, eps, dim)
    if quantity == "cmi":
        if isinstance(a, AlphaLimit):
            return B.bound_cmi_limit(ap, a, eps, dim)
        return B.bound_cmi(ap, a, eps, dim)
    params = B.BoundParams(a, eps, d_a=dim, d_b=dim)
    return B.bound_for_quantity(quantity, ap, params)


def _baseline_cell(name, alpha, eps, dim):
    a = parse_alpha(alpha)
    if isinstance(a, AlphaLimit):
        return None
    try:
        if name == "marwah":
            return B.baseline_marwah(a, eps, dim)
        if name == "beigi":
            return B.baseline_beigi(a, eps, dim)
        return B.baseline_rubboli(a, eps, float(dim) ** 2)
    except DomainError:
        return None


def _winner(values):
    """Index of the smallest finite value; ties keep the earlier approach."""
    best, arg = math.inf, None
    for i, v in enumerate(values):
        if v is not None and math.isfinite(v) and v < best:
            best, arg = v, i
    return arg


@dataclass
class SweepResult:
    header: list
    rows: list
    metadata: dict

    def to_csv(self, path=None) -> str:
        return write_csv(self.rows, self.header, path)

    def to_json(self, path=None) -> str:
        body = {"metadata": self.metadata, "columns": self.header,
                "rows": [[format_float(v) if isinstance(v, float) and not math.isfinite(v) else v
                          for v in r] for r in self.rows]}
        text = json.dumps(to_jsonable(body), indent=1) + "\n"
        if path is not None:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        return text


def run_sweep(grid: SweepGrid, seed: int = 0) -> SweepResult:
    """Evaluate every grid cell; rows are ordered by ``(dim, eps, alpha)``.

    Unavailable cells (the mixed approach below order 1) are left empty;
    the winner is the approach with the smallest finite value.
    """
    from . import __version__
    from .verify import _pmap

    aps = grid.approaches
    header = ["alpha", "eps", "kappa" if grid.quantity == "kappa" else "d_a"] + aps \
        + [f"baseline_{b}" for b in grid.baselines] + ["winner"]
    cells = [(d, e, a) for d in grid.dims for e in grid.eps for a in grid.alphas]

    def row(cell):
        d, e, a = cell
        vals = [bound_cell(grid.quantity, ap, a, e, d) for ap in aps]
        base = [_baseline_cell(b, a, e, d) for b in grid.baselines]
        w = _winner(vals)
        return [_alpha_key(a), float(e), d] + vals + base + [aps[w] if w is not None else ""]

    rows = [[("" if v is None else v) for v in r] for r in _pmap(row, cells)]
    meta = {"seed": seed, "version": __version__, "quantity": grid.quantity,
            "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat()}
    return SweepResult(header, rows, meta)
