#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
# Independent reference values for the unit tests. Nothing here imports the
# C++ code; each number is recomputed from its closed form or by brute force
# with numpy/scipy and then frozen into tests/unit/*.cpp.
#
#   python3 tests/support/oracles.py

import math

import numpy as np
from scipy import stats

C = 299792458.0
KB = 1.380649e-23


def fspl(d, f):
    return 20 * math.log10(4 * math.pi * d * f / C)


def sat_gain(theta, gm=22.0, bw=15.0, ls=-20.0):
    psi0 = bw / 2
    r = theta / psi0
    a = math.sqrt(-ls / 3)
    if r <= a:
        g = gm - 3 * r * r
    elif r <= 6.32:
        g = gm + ls
    else:
        g = gm + ls + 20 - 25 * math.log10(r)
    return max(g, 0.0)


def geo_view(lat, lon, sat_lon=5.0, re=6371.0, ro=42164.0):
    # vector form, not the triangle formulas
    p = re * np.array([math.cos(math.radians(lat)) * math.cos(math.radians(lon - sat_lon)),
                       math.cos(math.radians(lat)) * math.sin(math.radians(lon - sat_lon)),
                       math.sin(math.radians(lat))])
    s = np.array([ro, 0.0, 0.0])
    v = s - p
    rng = np.linalg.norm(v)
    el = 90 - math.degrees(math.acos(np.dot(v, p) / (rng * re)))
    off = math.degrees(math.acos(np.dot(-s, -v) / (ro * rng)))
    return el, off, rng * 1e3


def element(phi, psi, ge=8.0, p3=65.0, am=30.0, sla=30.0):
    ah = -min(12 * (phi / p3) ** 2, am)
    av = -min(12 * (psi / p3) ** 2, sla)
    return ge - min(-(ah + av), am)


def array_gain_direct(nh, nv, tgt, steer, sp=0.5):
    # explicit element sums
    def af(n, t, s):
        k = 2 * math.pi * sp
        a = np.exp(1j * k * np.arange(n) * math.sin(math.radians(t)))
        b = np.exp(1j * k * np.arange(n) * math.sin(math.radians(s)))
        return abs(np.vdot(b, a)) ** 2
    return af(nh, tgt[0], steer[0]) * af(nv, tgt[1], steer[1])


def knife_edge(nu):
    if nu <= -0.78:
        return 0.0
    return min(max(6.9 + 20 * math.log10(math.sqrt((nu - 0.1) ** 2 + 1) + nu - 0.1), 0.0), 60.0)


def manhattan_clutter_median(psi=20.0, hbs=6.0, f=6e9, n=200000, seed=5):
    # uniform 20 m heights, street 20 m; obstacle at U(0,1)*20 m, floor 1 m
    r = np.random.default_rng(seed)
    lam = C / f
    d2 = np.maximum(r.uniform(size=n) * 20.0, 1.0)
    clr = 20.0 - hbs - d2 * math.tan(math.radians(psi))
    nu = clr * np.sqrt(2 / (lam * d2))
    loss = np.array([knife_edge(v) for v in nu])
    return float(np.median(loss))


def raycast_dp(h_bs, d2, psi, hmax=30.0, n=400000, seed=3):
    r = np.random.default_rng(seed)
    h2 = r.uniform(0, hmax, n)
    # ray height at the front building
    return float(np.mean(h2 < h_bs + d2 * math.tan(math.radians(psi))))


def gil_pelaez_exp_median():
    return stats.expon.cdf(math.log(2))


def main():
    out = {}
    out["fspl_35000km_6ghz"] = fspl(35000e3, 6e9)
    out["fspl_ratio_2d"] = fspl(2.0, 1e9) - fspl(1.0, 1e9)
    out["sat_gain_0"] = sat_gain(0)
    out["sat_gain_7p5"] = sat_gain(7.5)
    out["sat_gain_10"] = sat_gain(10)
    out["sat_gain_30"] = sat_gain(30)
    out["sat_gain_60"] = sat_gain(60)
    el, off, rng = geo_view(45, 5)
    out["view_45N_5E"] = (el, off, rng)
    out["view_0N_5E"] = geo_view(0, 5)
    out["view_milan"] = geo_view(45.46, 9.19)
    g = math.degrees(math.acos(6371 / 42164))
    out["visibility_gamma"] = g
    out["slant_edge_km"] = math.sqrt(42164 ** 2 - 6371 ** 2)
    out["noise_800K_100MHz"] = 10 * math.log10(KB * 800 * 1e8) + 30
    out["noise_290K_1Hz"] = 10 * math.log10(KB * 290) + 30
    for cfg, (pt, nv, nh, eta) in {"c1_macro": (25, 8, 8, 1), "c1_micro": (19, 8, 4, 1),
                                   "c2_macro": (22, 16, 8, 2), "c2_micro": (16, 8, 8, 2)}.items():
        out["eirp_" + cfg] = pt + 10 * math.log10(nv ** 2 * nh ** 2 / eta) - 3
    out["matched_gain_8x8"] = 10 * math.log10(array_gain_direct(8, 8, (0, 0), (0, 0))) + element(0, 0)
    out["af_8x8_off"] = array_gain_direct(8, 8, (23.0, -7.0), (-11.0, 4.0))
    out["element_180"] = element(180, 0)
    out["element_32p5"] = element(32.5, 0)
    out["element_65"] = element(65, 0)
    out["knife_edge_0"] = knife_edge(0.0)
    out["knife_edge_1"] = knife_edge(1.0)
    out["knife_edge_2p4"] = knife_edge(2.4)
    out["manhattan_clutter_median_20_6"] = manhattan_clutter_median()
    out["F_h_17p547"] = (6 + 20 * math.tan(math.radians(30))) / 30
    out["raycast_dp_mc"] = raycast_dp(6, 20, 30)
    out["gamma3_cdf_at_2"] = stats.gamma(3).cdf(2.0)
    out["gamma3_cdf_at_5"] = stats.gamma(3).cdf(5.0)
    out["gamma3_median"] = stats.gamma(3).median()
    out["exp_median"] = gil_pelaez_exp_median()
    # macro sites: one per three hexagons of side 150 m; Q over 181.76 km2
    hexa = 1.5 * math.sqrt(3) * 150.0 ** 2
    out["city_q"] = 0.2 * 0.75 * 181.76e6 / (3 * hexa)
    # two-point CF: 0.3 at x=1, 0.7 at x=4, at omega = 0.9
    w = 0.9
    out["two_point_cf"] = 0.3 * complex(math.cos(w), math.sin(w)) + 0.7 * complex(math.cos(4 * w), math.sin(4 * w))
    # sum of exponentials with means 1 and 3: hypoexponential CDF
    x = 2.5
    out["hypoexp_cdf_2p5"] = 1 - (3 * math.exp(-x / 3) - math.exp(-x)) / 2
    # toy deterministic aggregate: Q BSs each 1e-12 W
    out["inr_1pw_800K_100MHz"] = 10 * math.log10(1e-12 / (KB * 800 * 1e8))
    # exponential INR at the 80th percentile for mean mu = kTB
    out["exp_q80_over_mean_db"] = 10 * math.log10(-math.log(0.2))
    for k, v in out.items():
        print(f"{k} = {v!r}")


if __name__ == "__main__":
    main()
