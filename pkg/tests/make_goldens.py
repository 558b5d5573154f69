"""Regenerate the golden benchmark files with a brute-force oracle.

Run from the repository root:

    python3 tests/make_goldens.py

The oracle shares no code with the library: scheme rates are rewritten as
vectorized numpy expressions maximized over dense million-point grids
(no refinement step), and closed-form optima are replaced by numeric
root-finding.  A regression in either the sweep machinery or the scheme
formulas therefore shows up as a golden mismatch.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

GOLDEN_DIR = Path(__file__).parent / "golden"
GRID = np.logspace(-4.0, 4.0, 1_000_000)


def crate(x):
    return 0.5 * np.log2(1.0 + x)


# ---------------------------------------------------------------------------
# two-way relay oracle


def twrc_gains(d: float, gamma: float) -> tuple[float, float]:
    return d ** (-gamma / 2.0), (1.0 - d) ** (-gamma / 2.0)


def twrc_nnc(d: float, gamma: float, p: float) -> float:
    g1, g2 = twrc_gains(d, gamma)
    s = GRID
    r1 = np.minimum(
        crate((g1 * g1 * p + (1.0 + s) * p) / (1.0 + s)),
        crate(p + g2 * g2 * p) - crate(1.0 / s),
    )
    r2 = np.minimum(
        crate((g2 * g2 * p + (1.0 + s) * p) / (1.0 + s)),
        crate(p + g1 * g1 * p) - crate(1.0 / s),
    )
    return float(np.max(np.clip(r1, 0.0, None) + np.clip(r2, 0.0, None)))


def twrc_af(d: float, gamma: float, p: float) -> float:
    g1, g2 = twrc_gains(d, gamma)
    amax = math.sqrt(p / (g1 * g1 * p + g2 * g2 * p + 1.0))
    al = np.linspace(amax * 1e-6, amax, 1_000_000)

    def one(gn, gf):
        den = gf * gf * al * al + 1.0
        a = 1.0 + p * (1.0 + al * al * gf * gf * gn * gn) / den
        b = 2.0 * p * al * gf * gn / den
        return np.clip(0.5 * np.log2((a + np.sqrt(a * a - b * b)) / 2.0), 0.0, None)

    return float(np.max(one(g1, g2) + one(g2, g1)))


def twrc_cf(d: float, gamma: float, p: float) -> float:
    g1, g2 = twrc_gains(d, gamma)

    def quant(g, s):
        return 0.5 * math.log2(1.0 + (g * g * p + (1.0 + s) * p) / (1.0 + s))

    def mac(g, s):
        return 0.5 * (math.log2(1.0 + p + g * g * p) - math.log2(1.0 + 1.0 / s))

    def crossing(g_near, g_far):
        return brentq(lambda s: mac(g_far, s) - quant(g_near, s), 1e-9, 1e12)

    s = max(crossing(g1, g2), crossing(g2, g1))
    return quant(g1, s) + quant(g2, s)


# ---------------------------------------------------------------------------
# interference relay oracle


FIG4 = dict(g13=0.1, g23=0.5, g14=1.0, g24=0.5, g15=0.5, g25=1.0)


def pair_sum(c1, c2, csum=None):
    lo = np.clip(c1, 0.0, None) + np.clip(c2, 0.0, None)
    if csum is None:
        return lo
    return np.minimum(lo, np.clip(csum, 0.0, None))


def irc_t2(g: dict, r0: float, p: float) -> float:
    s = GRID
    digital = r0 - crate(1.0 / s)
    cross4 = (g["g13"] * g["g24"] - g["g23"] * g["g14"]) ** 2
    cross5 = (g["g23"] * g["g15"] - g["g13"] * g["g25"]) ** 2
    c1 = np.minimum(
        crate(g["g14"] ** 2 * p) + digital,
        crate((g["g13"] ** 2 + (1.0 + s) * g["g14"] ** 2) * p / (1.0 + s)),
    )
    c2 = np.minimum(
        crate(g["g25"] ** 2 * p) + digital,
        crate((g["g23"] ** 2 + (1.0 + s) * g["g25"] ** 2) * p / (1.0 + s)),
    )
    csum = np.minimum.reduce(
        [
            crate((g["g14"] ** 2 + g["g24"] ** 2) * p) + digital,
            crate(
                ((g["g13"] ** 2 + g["g23"] ** 2) * p
                 + (1.0 + s) * (g["g14"] ** 2 + g["g24"] ** 2) * p
                 + cross4 * p * p) / (1.0 + s)
            ),
            crate((g["g15"] ** 2 + g["g25"] ** 2) * p) + digital,
            crate(
                ((g["g13"] ** 2 + g["g23"] ** 2) * p
                 + (1.0 + s) * (g["g25"] ** 2 + g["g15"] ** 2) * p
                 + cross5 * p * p) / (1.0 + s)
            ),
        ]
    )
    return float(np.max(pair_sum(c1, c2, csum)))


def hf_caps(g: dict, r0: float, p: float, s):
    den1 = g["g24"] ** 2 * p + 1.0
    c1 = (
        crate(g["g14"] ** 2 * p / den1)
        + r0
        - crate(((g["g23"] ** 2 + g["g24"] ** 2) * p + 1.0) / (den1 * s))
    )
    den2 = g["g15"] ** 2 * p + 1.0
    c2 = (
        crate(g["g25"] ** 2 * p / den2)
        + r0
        - crate(((g["g13"] ** 2 + g["g15"] ** 2) * p + 1.0) / (den2 * s))
    )
    return c1, c2


def cf_caps(g: dict, p: float, s):
    cross1 = (g["g23"] * g["g14"] - g["g24"] * g["g13"]) ** 2
    c1 = crate(
        ((g["g13"] ** 2 + (1.0 + s) * g["g14"] ** 2) * p + cross1 * p * p)
        / (1.0 + s + (g["g23"] ** 2 + (1.0 + s) * g["g24"] ** 2) * p)
    )
    cross2 = (g["g13"] * g["g25"] - g["g15"] * g["g23"]) ** 2
    c2 = crate(
        ((g["g23"] ** 2 + (1.0 + s) * g["g25"] ** 2) * p + cross2 * p * p)
        / (1.0 + s + (g["g13"] ** 2 + (1.0 + s) * g["g15"] ** 2) * p)
    )
    return c1, c2


def irc_thresholds(g: dict, r0: float, p: float) -> tuple[float, float]:
    """Quantization variances where the digital link budget exactly binds,
    computed from conditional variances Var(Y3 | Y_dest) via 2x2 Schur
    complements rather than the expanded closed form."""
    def cond_var(ga, gb):
        v3 = (g["g13"] ** 2 + g["g23"] ** 2) * p + 1.0
        vd = (ga ** 2 + gb ** 2) * p + 1.0
        cov = (g["g13"] * ga + g["g23"] * gb) * p
        return v3 - cov * cov / vd

    scale = 2.0 ** (2.0 * r0) - 1.0
    if scale <= 0.0:
        return math.inf, math.inf
    return (
        cond_var(g["g14"], g["g24"]) / scale,
        cond_var(g["g15"], g["g25"]) / scale,
    )


def irc_t3(g: dict, r0: float, p: float) -> float:
    s = GRID
    h1, h2 = hf_caps(g, r0, p, s)
    f1, f2 = cf_caps(g, p, s)
    return float(np.max(pair_sum(np.minimum(h1, f1), np.minimum(h2, f2))))


def irc_cf(g: dict, r0: float, p: float) -> float:
    t1, t2 = irc_thresholds(g, r0, p)
    s_min = max(t1, t2)
    if math.isinf(s_min):
        c1, _ = cf_caps(g, p, np.array([np.inf]))
        # direct transmission: interference as noise, no relay help
        d1 = crate(g["g14"] ** 2 * p / (g["g24"] ** 2 * p + 1.0))
        d2 = crate(g["g25"] ** 2 * p / (g["g15"] ** 2 * p + 1.0))
        return float(d1 + d2)
    s = np.logspace(math.log10(s_min), math.log10(max(1e4, 10.0 * s_min)), 1_000_000)
    c1, c2 = cf_caps(g, p, s)
    return float(np.max(pair_sum(c1, c2)))


def irc_hf(g: dict, r0: float, p: float) -> float:
    t1, t2 = irc_thresholds(g, r0, p)
    s_max = min(t1, t2)
    if math.isinf(s_max):
        s = GRID
    else:
        s = np.logspace(
            math.log10(min(1e-4, s_max / 100.0)), math.log10(s_max), 1_000_000
        )
    c1, c2 = hf_caps(g, r0, p, s)
    return float(np.max(pair_sum(c1, c2)))


# ---------------------------------------------------------------------------


def main() -> None:
    GOLDEN_DIR.mkdir(exist_ok=True)
    gamma, power = 3.0, 10.0
    rows = []
    for i in range(10):
        d = round(0.05 * (i + 1), 2)
        rows.append(
            {
                "d": d,
                "NNC": twrc_nnc(d, gamma, power),
                "AF": twrc_af(d, gamma, power),
                "CF": twrc_cf(d, gamma, power),
            }
        )
    twrc = {"gamma": gamma, "power": power, "rows": rows}
    (GOLDEN_DIR / "twrc_fig2.json").write_text(json.dumps(twrc, indent=1) + "\n")
    print(f"wrote twrc_fig2.json ({len(rows)} rows)")

    r0 = 1.0
    rows = []
    for pdb in range(0, 31, 3):
        p = 10.0 ** (pdb / 10.0)
        rows.append(
            {
                "P_dB": float(pdb),
                "NNC-T2": irc_t2(FIG4, r0, p),
                "NNC-T3": irc_t3(FIG4, r0, p),
                "CF": irc_cf(FIG4, r0, p),
                "HF": irc_hf(FIG4, r0, p),
            }
        )
    irc = {"gains": FIG4, "r0": r0, "rows": rows}
    (GOLDEN_DIR / "irc_fig4.json").write_text(json.dumps(irc, indent=1) + "\n")
    print(f"wrote irc_fig4.json ({len(rows)} rows)")


if __name__ == "__main__":
    main()
