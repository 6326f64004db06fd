"""Capacity bounds for secure and user-secure sum computation at level r.

All bounds are integers (symbols per network use) and are clamped at 0.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

from . import cutlab
from .netmodel import Network


@dataclass(frozen=True)
class BoundsReport:
    s: int
    C_min: int
    D_min: int | None  # None: no sigma_i-cut exists for any source
    A_min: int
    G_min: int
    r: int
    guang_upper: int
    lower: int
    improved_upper: int
    user_secure_exists: bool
    user_secure_upper: int
    is_multi_edge_tree: bool
    exact_secure_capacity: int | None
    witnesses: dict

    @property
    def secure_gap(self) -> bool:
        return self.exact_secure_capacity is None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["D_min"] = "inf" if self.D_min is None else self.D_min
        d["secure_gap"] = self.secure_gap
        return d

    def to_text(self, mode: str | None = None) -> str:
        """Human-readable report; ``mode`` ("secure" or "user_secure") keeps one side."""
        dmin = "inf (no sigma_i-cut)" if self.D_min is None else str(self.D_min)
        exact = "unknown" if self.exact_secure_capacity is None else str(self.exact_secure_capacity)
        w = self.witnesses
        head = [
            f"sources s            {self.s}",
            f"C_min                {self.C_min}    cut {w['C_min_cut']}",
            f"D_min                {dmin}",
            f"A_min                {self.A_min}    C {w['A_min']['cut']}  B_hat {w['A_min']['B_hat']}",
            f"G_min                {self.G_min}    global cut {w['G_min_cut']}",
            f"security level r     {self.r}",
        ]
        secure = [
            "secure:",
            f"  lower   C_min - r              {self.lower}",
            f"  upper   min(C_min, D_min - r)  {self.guang_upper}",
            f"  upper   min(C_min, A_min - r)  {self.improved_upper}",
            f"  multi-edge tree                {self.is_multi_edge_tree}",
            f"  capacity                       {exact}",
        ]
        user = [
            "user secure:",
            f"  code exists (r < min(C_min, s))  {self.user_secure_exists}",
            f"  upper   min(C_min, G_min - r)    {self.user_secure_upper}",
        ]
        lines = head + (secure if mode != "user_secure" else []) + (user if mode != "secure" else [])
        return "\n".join(lines) + "\n"


def _clamp(x: int) -> int:
    return max(0, x)


def _cut_quantities(net: Network) -> dict:
    c_min, c_cut = cutlab.c_min_witness(net)
    a_min, a_rep = cutlab.compute_A_min(net)
    g_cut = cutlab.g_min_witness(net)
    return {
        "C_min": c_min,
        "D_min": cutlab.compute_D_min(net),
        "A_min": a_min,
        "G_min": len(g_cut),
        "tree": cutlab.is_multi_edge_tree(net),
        "witnesses": {
            "C_min_cut": list(net.sort_edges(c_cut)),
            "A_min": a_rep.to_dict(),
            "G_min_cut": list(net.sort_edges(g_cut)),
        },
    }


def _secure_fields(cq: dict, r: int) -> dict:
    c_min, d_min, a_min = cq["C_min"], cq["D_min"], cq["A_min"]
    guang = c_min if d_min is None else _clamp(min(c_min, d_min - r))
    improved = _clamp(min(c_min, a_min - r)) if r <= a_min else 0
    lower = _clamp(c_min - r)
    exact = lower if lower == improved else None
    return {"guang_upper": guang, "lower": lower, "improved_upper": improved, "exact_secure_capacity": exact}


def _user_fields(cq: dict, s: int, r: int) -> dict:
    exists = r < min(cq["C_min"], s)
    upper = _clamp(min(cq["C_min"], cq["G_min"] - r)) if exists else 0
    return {"user_secure_exists": exists, "user_secure_upper": upper}


def analyze(net: Network, r: int) -> BoundsReport:
    if r < 0:
        raise ValueError("security level must be nonnegative")
    cq = _cut_quantities(net)
    return BoundsReport(
        s=net.s, C_min=cq["C_min"], D_min=cq["D_min"], A_min=cq["A_min"], G_min=cq["G_min"], r=r,
        is_multi_edge_tree=cq["tree"], witnesses=cq["witnesses"],
        **_secure_fields(cq, r), **_user_fields(cq, net.s, r),
    )


# the two entry points below return the full report; they exist so callers
# can ask for one side by name
def secure_bounds(net: Network, r: int) -> BoundsReport:
    return analyze(net, r)


def user_secure_bounds(net: Network, r: int) -> BoundsReport:
    return analyze(net, r)


def tree_capacity(net: Network, r: int) -> int | None:
    """Secure capacity C_min - r on multi-edge trees; None elsewhere."""
    if not cutlab.is_multi_edge_tree(net):
        return None
    return _clamp(cutlab.compute_C_min(net) - r)
