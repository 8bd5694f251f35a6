"""Vectorised bracketing bisection for monotone scalar maps."""
from __future__ import annotations

from typing import Callable

import numpy as np

OK, NOT_IN_IMAGE, NOT_STRICT = 0, 1, 2

# Fixed so that witnesses are reproducible.
BISECT_TOL = 1e-10
BRACKET_START = 1.0
BRACKET_CAP = 2.0**60


class NotInImageError(ValueError):
    pass


class SectionUnavailableError(ValueError):
    pass


def solve_monotone(
    func: Callable[[np.ndarray], np.ndarray],
    target: np.ndarray,
    tol: float = BISECT_TOL,
    start: float = BRACKET_START,
    cap: float = BRACKET_CAP,
    max_iter: int = 400,
):
    """Solve ``func(t) = target`` elementwise for a monotone ``func``.

    The bracket starts at ``[-start, start]`` and doubles on the side that
    needs it until the target is enclosed or a bound passes ``cap``.  The
    bisection stops once ``|func(t) - target| <= tol`` or the bracket has
    collapsed to adjacent floats.  A final probe either side of the root
    rejects roots sitting on a plateau, where the preimage is not unique.

    Returns ``(t, status, residual)``; status is ``OK``, ``NOT_IN_IMAGE`` or
    ``NOT_STRICT`` per element.
    """
    target = np.asarray(target, dtype=float)
    shape = target.shape
    target = target.reshape(-1)
    n = target.shape
    raw = func

    def func(t):
        return np.asarray(raw(t), dtype=float).reshape(t.shape)

    lo = np.full(n, -start)
    hi = np.full(n, start)
    status = np.full(n, OK, dtype=np.int8)
    with np.errstate(over="ignore", invalid="ignore"):
        f_lo, f_hi = func(lo), func(hi)
        pending = np.ones(n, dtype=bool)
        while True:
            sign = np.sign(f_hi - f_lo)
            inc = sign > 0
            dec = sign < 0
            low_v = np.where(inc, f_lo, f_hi)
            high_v = np.where(inc, f_hi, f_lo)
            enclosed = (sign != 0) & (low_v <= target) & (target <= high_v)
            pending &= ~enclosed
            if not pending.any():
                break
            # grow toward the side where the target lies; grow both when flat
            grow_hi = pending & ((sign == 0) | (inc & (target > f_hi)) | (dec & (target < f_hi)))
            grow_lo = pending & ((sign == 0) | (inc & (target < f_lo)) | (dec & (target > f_lo)))
            over = (grow_hi & (2 * hi > cap)) | (grow_lo & (-2 * lo > cap))
            # a ray that stayed flat at the target level has no unique preimage
            status[over] = np.where((sign[over] == 0) & (f_lo[over] == target[over]), NOT_STRICT, NOT_IN_IMAGE)
            pending &= ~over
            grow_hi &= pending
            grow_lo &= pending
            if not pending.any():
                break
            hi = np.where(grow_hi, 2 * hi, hi)
            lo = np.where(grow_lo, 2 * lo, lo)
            f_hi = np.where(grow_hi, func(hi), f_hi)
            f_lo = np.where(grow_lo, func(lo), f_lo)
            if np.any(np.isnan(f_hi) | np.isnan(f_lo)):
                bad = pending & (np.isnan(f_hi) | np.isnan(f_lo))
                status[bad] = NOT_IN_IMAGE
                pending &= ~bad

        active = status == OK
        inc = f_hi > f_lo
        t = 0.5 * (lo + hi)
        ft = func(t)
        for _ in range(max_iter):
            resid = np.abs(ft - target)
            active &= ~(resid <= tol) & (t != lo) & (t != hi)
            if not active.any():
                break
            below = np.where(inc, ft < target, ft > target)
            lo = np.where(active & below, t, lo)
            hi = np.where(active & ~below, t, hi)
            t_new = 0.5 * (lo + hi)
            t = np.where(active, t_new, t)
            ft = np.where(active, func(t), ft)

        residual = np.abs(ft - target)
        ok = status == OK
        delta = 1e-7 * np.maximum(1.0, np.abs(t))
        f_plus, f_minus = func(t + delta), func(t - delta)
        strict = np.where(inc, (f_plus > ft) & (f_minus < ft), (f_plus < ft) & (f_minus > ft))
        status[ok & ~strict] = NOT_STRICT
    residual = np.where(status == OK, residual, np.inf)
    return t.reshape(shape), status.reshape(shape), residual.reshape(shape)


def raise_for_status(status: np.ndarray, what: str = "component") -> None:
    """Raise for the first failed element; positions are reported 1-based."""
    status = np.asarray(status)
    if np.any(status == NOT_IN_IMAGE):
        idx = np.argwhere(status == NOT_IN_IMAGE)[0] + 1
        raise NotInImageError(
            f"{what} {', '.join(map(str, idx))}: not in the image, "
            f"bracket grew past {BRACKET_CAP:g}"
        )
    if np.any(status == NOT_STRICT):
        idx = np.argwhere(status == NOT_STRICT)[0] + 1
        raise SectionUnavailableError(
            f"{what} {', '.join(map(str, idx))}: section unavailable, the ray is not "
            "strictly monotone at this level"
        )
