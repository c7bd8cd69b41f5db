"""Named executable checks and suite runner.

Each catalog id maps to a procedure returning a verdict, metrics and
provenance. Identity residuals are relative, ``|L - R| / (1 + |R|)``.
Random draws are seeded from the run seed and the check id.
"""

from __future__ import annotations

import ast
import copy
import math
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import qmc

from .contours import DeformationSpec, edge_contour, epsilon_arc, inner_contour, default_inner_radius
from .kernels import (
    XKernel,
    biortho_induction_check,
    biortho_partial_closed,
    biortho_partial_quadrature,
    cosine_band,
    edge_induction_check,
    edge_kernel_closed,
    edge_kernel_direct,
    edge_kernel_slice,
    est_bound,
    est_constants,
    inner_eps_kernel_closed,
    inner_eps_kernel_direct,
    inner_kernel_closed,
    inner_kernel_direct,
    inner_kernel_slice,
    inner_residues,
    sinc_kernel,
)
from .limits import (
    PreconditionError,
    VANISHING_THRESHOLDS,
    biortho_smeared_probe,
    boundary_family,
    boundary_weak_limit_probe,
    delta_probe,
    infinity_functional_probe,
    locality_at_infinity_check,
    pair,
    slow_growth_probe,
    vanishing_family,
    vanishing_probe,
    witness_search,
)
from .models import EdgeModel, InnerModel, parse_model, psi0_inner, psi1_inner
from .testspace import (
    TestFunction,
    bump,
    constant,
    cos_over_linear,
    cutoff_split,
    gaussian,
    inverse_square,
    parse_test_function,
    slow_growth_fn,
    weighted_l2_norm,
)

__all__ = [
    "CheckSpec",
    "CheckResult",
    "CATALOG_IDS",
    "SUITE_ORDER",
    "DEFAULTS",
    "COMPOSITES",
    "ANNOTATIONS",
    "run_check",
    "run_suite",
    "parse_param_value",
    "infinity_oracle",
    "LONG_EPS_GRID",
    "PROBE_IDS",
    "probe_report",
]

LONG_EPS_GRID = tuple(0.2 * 2.0**-k for k in range(15))
A_DELTA = (25.0, 50.0, 100.0, 200.0)
A_SLOW = (25.0, 50.0, 100.0, 200.0, 400.0)
BOUNDARY_GRID = (10.0, 100.0, 1000.0)


@dataclass
class CheckSpec:
    id: str
    params: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)


@dataclass
class CheckResult:
    id: str
    verdict: str
    metrics: dict
    provenance: dict
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))


def _jsonable(v):
    if isinstance(v, (complex, np.complexfloating)):
        return {"re": float(v.real), "im": float(v.imag)}
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return None if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, TestFunction):
        return v.label
    if isinstance(v, (EdgeModel, InnerModel)):
        return v.descriptor()
    if hasattr(v, "to_dict"):
        return _jsonable(v.to_dict())
    return v


def _rel(a, b) -> float:
    return float(abs(a - b) / (1 + abs(b)))


def _rng(seed: int, cid: str) -> np.random.Generator:
    return np.random.default_rng([int(seed), zlib.crc32(cid.encode())])


def _sobol(d: int, n: int, seed: int, cid: str, salt: str = "") -> np.ndarray:
    s = qmc.Sobol(d, scramble=True, seed=np.random.default_rng([int(seed), zlib.crc32((cid + salt).encode())]))
    m = int(math.ceil(math.log2(n)))
    return s.random_base2(m)[:n]


def _signed(rng, n, lo, hi):
    return rng.uniform(lo, hi, n) * rng.choice([-1.0, 1.0], n)


def _fn(v):
    return parse_test_function(v) if isinstance(v, str) else v


def _model(v):
    return parse_model(v) if isinstance(v, str) else v


# --- identity checks ----------------------------------------------------------

def _check_L31(p, tol, seed, cid):
    rng = _rng(seed, cid)
    z = complex(p["z"])
    worst = worst_ind = 0.0
    count = 0
    for n in p["n"]:
        model = EdgeModel(n, z)
        for R in p["R"]:
            k = _signed(rng, p["pairs"], *p["k_range"])
            kp = _signed(rng, p["pairs"], *p["k_range"])
            for i, (a, b) in enumerate(zip(k, kp)):
                c = complex(biortho_partial_closed(model, R, a, b).total)
                q = biortho_partial_quadrature(model, R, a, b)
                worst = max(worst, _rel(q, c))
                count += 1
                if i < p["induction_pairs"]:
                    worst_ind = max(worst_ind, biortho_induction_check(model, R, a, b)["residual"])
    ok = worst < tol["identity"] and worst_ind < tol["identity"]
    return ok, {"max_residual": worst, "max_induction_residual": worst_ind, "evaluations": count}, {}


def _check_L34(p, tol, seed, cid):
    rng = _rng(seed, cid)
    z = complex(p["z"])
    xs = rng.uniform(*p["x_range"], p["pairs"])
    xps = rng.uniform(*p["x_range"], p["pairs"])
    worst = worst_dir = worst_ind = worst_sinc = 0.0
    contours = []
    for A in p["A"]:
        for x, xp in zip(xs[:4], xps[:4]):
            v = complex(edge_kernel_closed(EdgeModel(0, z), A, x, xp).total)
            worst_sinc = max(worst_sinc, _rel(v, math.sin(A * (x - xp)) / (math.pi * (x - xp))))
    for n in p["n"]:
        model = EdgeModel(n, z)
        for A in p["A"]:
            for r in p["r"]:
                specs = [DeformationSpec(r, d) for d in ("up", "down")]
                contours += [edge_contour(A, s).descriptor() for s in specs]
                for i, (x, xp) in enumerate(zip(xs, xps)):
                    c = complex(edge_kernel_closed(model, A, x, xp).total)
                    up, down = (edge_kernel_direct(model, A, s, x, xp) for s in specs)
                    worst = max(worst, _rel(up, c), _rel(down, c))
                    worst_dir = max(worst_dir, _rel(up, down))
                    if i < p["induction_pairs"]:
                        worst_ind = max(worst_ind, edge_induction_check(model, A, specs[0], x, xp)["residual"])
    ok = (worst < tol["identity"] and worst_dir < tol["direction"] and worst_ind < tol["identity"]
          and worst_sinc < tol["identity"])
    metrics = {"max_residual": worst, "max_up_down": worst_dir, "max_induction_residual": worst_ind,
               "max_n0_sinc_residual": worst_sinc}
    return ok, metrics, {"contours": contours[:8]}


def _check_L41(p, tol, seed, cid):
    rng = _rng(seed, cid)
    model = InnerModel(p["alpha"], complex(p["z"]))
    xs = rng.uniform(*p["x_range"], p["pairs"])
    xps = rng.uniform(*p["x_range"], p["pairs"])
    worst = worst_dir = worst_res = worst_res_closed = 0.0
    contours = []
    for A in p["A"]:
        r = default_inner_radius(A, model.alpha)
        specs = [DeformationSpec(r, d) for d in ("up", "down")]
        contours += [inner_contour(A, model.alpha, s).descriptor() for s in specs]
        for x, xp in zip(xs, xps):
            c = complex(inner_kernel_closed(model, A, x, xp).total)
            up, down = (inner_kernel_direct(model, A, s, x, xp) for s in specs)
            worst = max(worst, _rel(up, c), _rel(down, c))
            worst_dir = max(worst_dir, _rel(up, down))
    for x, xp in zip(xs[: p["residue_pairs"]], xps[: p["residue_pairs"]]):
        rm, rp = inner_residues(model, x, xp)
        worst_res = max(worst_res, abs(rm + rp))
        S = complex(psi0_inner(model, x) * psi1_inner(model, xp) + psi1_inner(model, x) * psi0_inner(model, xp))
        worst_res_closed = max(worst_res_closed, abs(rp - S / (2 * math.pi)))
    ok = (worst < tol["identity"] and worst_dir < tol["direction"] and worst_res < tol["direction"]
          and worst_res_closed < tol["direction"])
    metrics = {"max_residual": worst, "max_up_down": worst_dir, "max_residue_sum": worst_res,
               "max_residue_vs_closed": worst_res_closed}
    return ok, metrics, {"contours": contours}


def _check_L45(p, tol, seed, cid):
    rng = _rng(seed, cid)
    model = InnerModel(p["alpha"], complex(p["z"]))
    xs = rng.uniform(*p["x_range"], p["pairs"])
    xps = rng.uniform(*p["x_range"], p["pairs"])
    worst = worst_dir = 0.0
    for eps in p["eps"]:
        for x, xp in zip(xs, xps):
            c = complex(inner_eps_kernel_closed(model, eps, x, xp).total)
            up = inner_eps_kernel_direct(model, eps, x, xp, 1)
            down = inner_eps_kernel_direct(model, eps, x, xp, -1)
            worst = max(worst, _rel(up, c), _rel(down, c))
            worst_dir = max(worst_dir, _rel(up, down))
    ok = worst < tol["identity"] and worst_dir < tol["direction"]
    arcs = [epsilon_arc(model.alpha, e, s).descriptor() for e in p["eps"] for s in (1, -1)]
    return ok, {"max_residual": worst, "max_up_down": worst_dir}, {"contours": arcs}


# --- inequality scans ---------------------------------------------------------

def _violations(lhs, rhs, slack):
    excess = lhs - rhs
    bad = excess > slack * np.maximum(1.0, rhs)
    return int(bad.sum()), float(np.max(excess / np.maximum(1.0, rhs)))


def _inner_configs(seed, cid, count):
    u = _sobol(4, count, seed, cid, "configs")
    alpha = 0.2 + 2.8 * u[:, 0]
    zr = -2 + 4 * u[:, 1]
    zi = (0.2 + 2.8 * u[:, 2]) * np.where(u[:, 3] < 0.5, -1.0, 1.0)
    return [InnerModel(a, complex(r, i)) for a, r, i in zip(alpha, zr, zi)]


def _x_samples(model, n, seed, cid, salt):
    # quasi-random over a wide window plus a dense adversarial block near Re z,
    # where |sin 2ax + 2a(x - z)| is smallest
    u = _sobol(1, n, seed, cid, salt)[:, 0]
    n_adv = n // 4
    span = 60.0 / model.alpha + abs(model.z.real)
    wide = -span + 2 * span * u[: n - n_adv]
    near = model.z.real - 2.0 / model.alpha + 4.0 / model.alpha * u[n - n_adv:]
    return np.concatenate([wide, near])


def _scan_ner1(n, seed, cid):
    u = _sobol(4, n, seed, cid, "ner1")
    alpha = 0.1 + 2.9 * u[:, 0]
    gap = 10 ** (-3 + 5 * u[:, 1])  # A - alpha
    w = 10 ** (-3 + 4.7 * u[:, 2]) * np.where(u[:, 3] < 0.5, -1.0, 1.0)
    lo, hi = gap, gap + 2 * alpha
    band = cosine_band(lo, hi, w)
    sincs = np.sin(hi * w) / (hi * w) - np.sin(lo * w) / (lo * w)
    lhs = np.abs(band - sincs)
    rhs = 6.0 / (gap**2 * w**2)
    return lhs, rhs


def _scan_pointwise(which, n, seed, cid):
    models = _inner_configs(seed, cid, 16)
    per = n // len(models)
    L, R = [], []
    for i, m in enumerate(models):
        x = _x_samples(m, per, seed, cid, f"{which}-{i}")
        a = m.alpha
        d = np.abs(np.sin(2 * a * x) + 2 * a * (x - m.z))
        if which == "ner2":
            L.append(np.abs(psi0_inner(m, x)))
            R.append((2 * a) ** 1.5 / d)
        elif which == "ner3":
            L.append(np.abs(psi0_inner(m, x) - math.sqrt(2 * a) * np.cos(a * x) / (x - m.z)))
            R.append(math.sqrt(2 * a) / (np.abs(x - m.z) * d))
        else:
            L.append(np.abs(psi1_inner(m, x) - np.sin(a * x) / math.sqrt(2 * a)))
            R.append(1.0 / (math.sqrt(2 * a) * d))
    return np.concatenate(L), np.concatenate(R)


def _check_L44(p, tol, seed, cid):
    metrics = {}
    ok = True
    for which in ("ner1", "ner2", "ner3", "ner4"):
        if which == "ner1":
            lhs, rhs = _scan_ner1(p["samples"], seed, cid)
        else:
            lhs, rhs = _scan_pointwise(which, p["samples"], seed, cid)
        nbad, worst = _violations(lhs, rhs, tol["slack"])
        metrics[which] = {"samples": int(lhs.size), "violations": nbad, "max_excess": worst}
        ok &= nbad == 0
    return ok, metrics, {"sampler": "scrambled Sobol"}


def _est_scan(n, seed, cid):
    models = _inner_configs(seed, cid, 8)
    per = n // len(models)
    total_bad, worst = 0, -np.inf
    consts = []
    for i, m in enumerate(models):
        u = _sobol(3, per, seed, cid, f"est-{i}")
        A = m.alpha + m.alpha * 10 ** (-3 + 6 * u[:, 0])
        x = -30 + 60 * u[:, 1]
        # half the offsets cluster near u = 0, where the bound is tightest
        off = np.where(np.arange(per) % 2 == 0, -30 + 60 * u[:, 2], (u[:, 2] - 0.5) * 1e-2)
        xp = x - off
        c = est_constants(m)
        S = psi0_inner(m, x) * psi1_inner(m, xp) + psi1_inner(m, x) * psi0_inner(m, xp)
        lhs = np.abs(cosine_band(A - m.alpha, A + m.alpha, x - xp) * S)
        rhs = est_bound(m, A, x - xp, c["D"])
        nbad, w = _violations(lhs, rhs, 1e-12)
        total_bad += nbad
        worst = max(worst, w)
        consts.append({"model": m.descriptor(), "D": c["D"]})
    return total_bad, worst, consts


def _check_L43(p, tol, seed, cid):
    nbad, worst, consts = _est_scan(p["samples"], seed, cid)
    model = InnerModel(p["alpha"], complex(p["z"]))
    phi = _fn(p["phi"])
    xp = p["xprime"]
    c = est_constants(model)
    a = model.alpha
    rows = []
    ok_bound = True
    p0p, p1p = complex(psi0_inner(model, xp)), complex(psi1_inner(model, xp))
    for A in p["A"]:
        def band_term(x, A=A):
            S = psi0_inner(model, x) * p1p + psi1_inner(model, x) * p0p
            return cosine_band(A - a, A + a, np.asarray(x) - xp) * S

        v = abs(pair(XKernel(band_term, "band", freq=A + a, breakpoints=(xp,)), phi, "truncated").value)
        bound = abs(pair(XKernel(lambda x, A=A: est_bound(model, A, np.asarray(x) - xp, c["D"]), "bound",
                                 breakpoints=(xp,)), TestFunction(lambda x: np.abs(phi(x)), phi.growth, "|phi|",
                                                                  support=phi.support), "truncated").value)
        ok_bound &= v <= bound
        rows.append({"A": A, "pairing": v, "bound": bound})
    values = [r["pairing"] for r in rows]
    decreasing = bool(all(b <= a_ for a_, b in zip(values, values[1:])))
    ok = nbad == 0 and ok_bound and decreasing
    metrics = {"est_violations": nbad, "est_max_excess": worst, "constants": c, "pairings": rows,
               "pairing_decreasing": decreasing}
    return ok, metrics, {"scan_models": consts}


# --- delta-type probes --------------------------------------------------------

def _probe_summary(rep):
    return {"verdict": rep.verdict, "values": rep.values, "residuals": rep.residuals,
            "extrapolated": rep.extrapolated, "fitted_rate": rep.fitted_rate, "target": rep.target,
            "monotone": rep.metrics.get("monotone")}


def _delta_ok(rep, tol):
    r = rep.residuals
    return bool(rep.metrics["monotone"] and r[-1] < tol["final"])


def _check_T32(p, tol, seed, cid):
    z = complex(p["z"])
    rows = {}
    ok = True
    rate_ok = True
    for n in p["n"]:
        model = EdgeModel(n, z)
        for name in p["phi"]:
            phi = _fn(name)
            for xp in p["xprime"]:
                rep = delta_probe(lambda A: edge_kernel_slice(model, A, xp), phi, xp, p["A"],
                                  tolerances={"floor": tol["floor"]}, label=f"n={n},{phi.label},x'={xp}")
                good = _delta_ok(rep, tol)
                entry = _probe_summary(rep)
                entry["pass"] = good
                if n == 0 and phi.label.startswith("gaussian"):
                    entry["rate_ok"] = bool(abs(rep.fitted_rate - tol["rate"]) <= tol["rate_band"])
                    rate_ok &= entry["rate_ok"]
                rows[rep.label] = entry
                ok &= good
    return ok and rate_ok, {"probes": rows, "rate_criterion": rate_ok, "delta_criterion": ok}, {"A_grid": p["A"]}


def _check_T41(p, tol, seed, cid):
    model = InnerModel(p["alpha"], complex(p["z"]))
    rows = {}
    ok = True
    for name in p["phi"]:
        phi = _fn(name)
        for xp in p["xprime"]:
            rep = delta_probe(lambda A: inner_kernel_slice(model, A, xp), phi, xp, p["A"],
                              tolerances={"floor": tol["floor"]}, label=f"{phi.label},x'={xp}")
            good = _delta_ok(rep, tol)
            entry = _probe_summary(rep)
            entry["pass"] = good
            rows[rep.label] = entry
            ok &= good
    return ok, {"probes": rows}, {"A_grid": p["A"], "model": model.descriptor()}


def _check_L36(p, tol, seed, cid):
    z = complex(p["z"])
    phi = _fn(p["phi"])
    xp = p["xprime"]
    rows = {}
    ok = True
    for n in p["n"]:
        def fam(A, n=n):
            return XKernel(lambda x: ((xp - z) / (np.asarray(x) - z)) ** n * sinc_kernel(A, np.asarray(x) - xp),
                           f"weighted_sinc[n={n},A={A}]", freq=A, breakpoints=(xp,))

        rep = delta_probe(fam, phi, xp, p["A"], tolerances={"floor": tol["floor"]}, label=f"n={n}")
        rows[rep.label] = _probe_summary(rep)
        ok &= _delta_ok(rep, tol)
    return ok, {"probes": rows}, {"A_grid": p["A"]}


def _check_L33(p, tol, seed, cid):
    phi = _fn(p["phi"])
    n, m, kp = p["n"], p["m"], p["kprime"]
    w = (1 + kp * kp) ** (m / 2)

    def fam(R):
        return XKernel(lambda k: kp ** (2 * n) * sinc_kernel(R, np.asarray(k) - kp) / ((1 + np.asarray(k) ** 2)
                                                                                      ** (m / 2) * w),
                       f"k_sinc[R={R}]", freq=R, breakpoints=(kp,))

    target = kp ** (2 * n) * complex(phi(np.asarray(kp))) / (1 + kp * kp) ** m
    rep = delta_probe(fam, phi, kp, p["R"], tolerances={"floor": tol["floor"]}, target=target)
    last = rep.residuals[-1]
    ok = bool(rep.metrics["monotone"] and last < tol["final"])
    return ok, {"probe": _probe_summary(rep), "target": target, "final_residual": last}, {"R_grid": p["R"]}


def _check_T31(p, tol, seed, cid):
    phi = _fn(p["phi"])
    rows = {}
    ok = True
    for kp in p["kprime"]:
        rep = biortho_smeared_probe(p["n"], p["m"], phi, kp, p["R"], z=complex(p["z"]),
                                    tolerances={"floor": tol["floor"]})
        last = rep.residuals[-1]
        rows[f"k'={kp}"] = {**_probe_summary(rep), "final_residual": last}
        ok &= last < tol["final"]
    return ok, {"probes": rows}, {"R_grid": p["R"], "n": p["n"], "m": p["m"]}


def _slow_check(model, p, tol):
    if "phi" in p:
        phi = _fn(p["phi"]) if not isinstance(p["phi"], list) else _combo(p["phi"])
        make = (lambda A: edge_kernel_slice(model, A, p["xprime"])) if isinstance(model, EdgeModel) else \
            (lambda A: inner_kernel_slice(model, A, p["xprime"]))
        rep = delta_probe(make, phi, p["xprime"], p["A"], domain="oscillatory_tail",
                          tolerances={"require_monotone": False}, label=f"combo[{model.descriptor()}]")
    else:
        rep = slow_growth_probe(model, p["A"], p["kappa"], p["k0"], p["sign"], p["xprime"])
    last = rep.residuals[-1]
    return rep, bool(last < tol["final"])


def _combo(items):
    out = None
    for coeff, name in items:
        f = _fn(name).scaled(coeff)
        out = f if out is None else out + f
    return out


def _check_T33(p, tol, seed, cid):
    rows = {}
    ok = True
    for n in p["n"]:
        rep, good = _slow_check(EdgeModel(n, complex(p["z"])), p, tol)
        rows[f"n={n}"] = {**_probe_summary(rep), "final_residual": rep.residuals[-1]}
        ok &= good
    return ok, {"probes": rows}, {"A_grid": p["A"]}


def _check_T42(p, tol, seed, cid):
    model = InnerModel(p["alpha"], complex(p["z"]))
    rep, ok = _slow_check(model, p, tol)
    return ok, {"probe": {**_probe_summary(rep), "final_residual": rep.residuals[-1]}}, {"A_grid": p["A"]}


# --- vanishing and boundary ---------------------------------------------------

def _vanishing(name):
    def check(p, tol, seed, cid):
        phi = _fn(p["phi"])
        model = InnerModel(p["alpha"], complex(p["z"]))
        g_req = VANISHING_THRESHOLDS[name]
        rep = vanishing_probe(vanishing_family(name, p["xprime"], z=complex(p["z"]), model=model), phi, g_req,
                              p["eps"], xp=p["xprime"], gamma=p.get("gamma"),
                              tolerances={"last": tol["last"], "extrapolated": tol["extrapolated"]},
                              label=f"{name}[{phi.label}]")
        ok = rep.verdict == "vanishing"
        m = _probe_summary(rep)
        m.update({"gamma": rep.metrics["gamma"], "gamma_required": g_req,
                  "last_value": abs(rep.values[-1]), "extrapolated_abs": abs(rep.extrapolated)})
        return ok, m, {"eps_grid": list(p["eps"])}

    return check


def _boundary(name):
    def check(p, tol, seed, cid):
        phi = _fn(p["phi"])
        fam_params = {k: v for k, v in p.items() if k not in ("phi", "grid", "gamma", "gamma_threshold")}
        make = boundary_family(name, **fam_params)
        rows = {}
        ok = True
        for sgn in (1.0, -1.0):
            grid = [sgn * g for g in p["grid"]]
            rep = boundary_weak_limit_probe(make, phi, p["gamma"], grid, gamma_threshold=p["gamma_threshold"],
                                            ratio=tol["ratio"], label=f"{name}[{'+' if sgn > 0 else '-'}]")
            rows[rep.label] = {"values": rep.values, "decay_ratio": rep.metrics["decay_ratio"],
                               "verdict": rep.verdict}
            ok &= rep.verdict == "vanishing"
        return ok, {"probes": rows}, {"grid": list(p["grid"])}

    return check


# --- functionals supported at infinity ----------------------------------------

def infinity_oracle(which: str) -> float:
    """``int sin^2(t/4) sin(t/2) / t^3 dt`` (fun96a) or ``int [t - 2 sin(t/2)]^2 / t^4 dt`` (fun96b).

    High-precision quadrature over the real line of the stretched kernel.
    """
    import mpmath as mp

    mp.mp.dps = 30
    cut = 4 * mp.pi
    if which == "fun96a":
        f = lambda t: mp.sin(t / 4) ** 2 * mp.sin(t / 2) / t**3
        osc, exact = f, 0
    elif which == "fun96b":
        f = lambda t: (t - 2 * mp.sin(t / 2)) ** 2 / t**4
        # beyond the cut: 1/t^2 exactly plus an oscillatory remainder
        osc = lambda t: -4 * mp.sin(t / 2) / t**3 + 4 * mp.sin(t / 2) ** 2 / t**4
        exact = 1 / cut
    else:
        raise KeyError(which)
    # even integrands
    head = mp.quad(f, [mp.mpf("1e-30"), 1, cut])
    tail = mp.quadosc(osc, [cut, mp.inf], period=cut) + exact
    return float(2 * (head + tail))


def _check_R34(p, tol, seed, cid):
    z = complex(p["z"])
    xp = p["xprime"]
    phi = inverse_square(z)
    eps = p["eps"]
    itol = {"stable_rel": tol["stable_rel"], "nontrivial_min": tol["nontrivial_min"]}
    base = infinity_functional_probe("fun96a", phi, xp, eps, z=z, tolerances=itol)
    oracle = infinity_oracle("fun96a") / (xp - z) ** 2
    loc = locality_at_infinity_check("fun96a", phi, xp, p["R_list"], eps, z=z, rel_tol=tol["locality"],
                                     tolerances=itol)
    last_two = abs(base.values[-1] - base.values[-2]) / abs(base.values[-1])
    # the smooth cut-offs eta(|x| - R) phi converge to phi in CL_gamma while the functional stays 0 on them
    table = []
    for R in p["window_R"]:
        near, far = cutoff_split(phi, R)
        rep = infinity_functional_probe("fun96a", near, xp, eps, z=z, tolerances=itol)
        dist = weighted_l2_norm(far, p["window_gamma"], 1e4)
        table.append({"R": R, "functional": rep.extrapolated, "verdict": rep.verdict, "distance": dist})
    dists = [r["distance"] for r in table]
    window_ok = all(r["verdict"] == "vanishing" for r in table) and all(b < a for a, b in zip(dists, dists[1:]))
    b_rep = infinity_functional_probe("fun96b", phi, xp, eps, z=z, tolerances=itol)
    b_oracle = infinity_oracle("fun96b") / (xp - z) ** 2
    g_rep = infinity_functional_probe("fun96a", gaussian(0.0, 1.0), xp, eps, z=z, tolerances=itol)
    metrics = {
        "fun96a": _probe_summary(base),
        "fun96a_oracle": oracle,
        "fun96a_oracle_rel": abs(base.extrapolated - oracle) / abs(oracle),
        "final_two_rel": last_two,
        "locality": {"rows": loc["rows"], "near_verdict": loc["near_verdict"], "near_limit": loc["near_limit"]},
        "window_table": table,
        "gaussian_verdict": g_rep.verdict,
        "fun96b": {"verdict": b_rep.verdict, "limit": b_rep.extrapolated, "oracle": b_oracle,
                   "oracle_rel": abs(b_rep.extrapolated - b_oracle) / abs(b_oracle)},
    }
    ok = (base.verdict == "nontrivial_limit" and abs(base.extrapolated) > tol["nontrivial_min"]
          and last_two < tol["stable_rel"] and loc["pass"] and window_ok and g_rep.verdict == "vanishing"
          and metrics["fun96a_oracle_rel"] < tol["oracle"])
    return ok, metrics, {"eps_grid": list(eps), "R_list": list(p["R_list"])}


def _check_R42(p, tol, seed, cid):
    model = InnerModel(p["alpha"], complex(p["z"]))
    xp = p["xprime"]
    eps = p["eps"]
    itol = {"stable_rel": tol["stable_rel"], "nontrivial_min": tol["nontrivial_min"]}
    cands = [_fn(c) for c in p["candidates"]]
    found = witness_search("funA96", cands, xp, eps, model=model)
    table = []
    witness = None
    for (label, rep), phi in zip(found, cands):
        if isinstance(rep, str):
            table.append({"phi": label, "verdict": "error", "error": rep})
            continue
        table.append({"phi": label, "verdict": rep.verdict, "limit": rep.extrapolated})
        if witness is None and rep.verdict == "nontrivial_limit":
            witness = phi
    metrics = {"witness_table": table, "witness": witness.label if witness else None}
    if witness is None:
        metrics["finding"] = "no catalog witness produced a nontrivial limit"
        return False, metrics, {"eps_grid": list(eps)}
    loc = locality_at_infinity_check("funA96", witness, xp, p["R_list"], eps, model=model,
                                     rel_tol=tol["locality"], tolerances=itol)
    metrics["locality"] = {"rows": loc["rows"], "near_verdict": loc["near_verdict"], "limit": loc["limit"]}
    ok = loc["pass"]
    if witness.label.startswith("cos_over_linear"):
        oracle = complex(psi0_inner(model, xp)) / math.sqrt(2 * model.alpha)
        metrics["oracle"] = oracle
        metrics["oracle_rel"] = abs(loc["limit"] - oracle) / abs(oracle)
        ok &= metrics["oracle_rel"] < tol["oracle"]
    return ok, metrics, {"eps_grid": list(eps), "R_list": list(p["R_list"])}


# --- catalog --------------------------------------------------------------------

_BASE_TOL = {
    "identity": 1e-8,
    "direction": 1e-10,
    "slack": 1e-12,
    "final": 5e-3,
    "floor": 1e-12,
    "rate": -1.0,
    "rate_band": 0.3,
    "last": 1e-4,
    "extrapolated": 1e-6,
    "ratio": 1e-3,
    "stable_rel": 1e-2,
    "nontrivial_min": 1e-3,
    "locality": 1e-2,
    "oracle": 1e-3,
}

_VAN_PHI = {
    "L3.7": "inverse_square(1j)",
    "L3.8": "inverse_square(1j)",
    "L3.9": "gaussian(0,1)",
    "L3.10": "bump(0,1)",
    "L4.6": "cos_over_linear(1,1j)",
    "L4.7": "inverse_square(1j)",
    "L4.8": "inverse_square(1j)",
}

DEFAULTS = {
    "L3.1": {"n": [1, 2, 3], "R": [1.0, 5.0], "pairs": 20, "k_range": [0.2, 5.0], "z": 1j, "induction_pairs": 3},
    "L3.2": {"l": 0, "m": 1, "j": 1, "kprime": 0.5, "z": 1j, "phi": "bump(0.5,1)", "grid": list(BOUNDARY_GRID),
             "gamma": 0.0, "gamma_threshold": -1.0},
    "C3.1": {"n": 2, "l": 0, "m": 1, "kprime": 0.5, "z": 1j, "phi": "bump(0.5,1)", "grid": list(BOUNDARY_GRID),
             "gamma": 0.0, "gamma_threshold": -1.0},
    "L3.3": {"n": 1, "m": 1, "kprime": 0.7, "phi": "gaussian(0.5,0.3)", "R": list(A_DELTA)},
    "T3.1": {"n": 1, "m": 1, "kprime": [0.7, 2.0], "phi": "gaussian(0,1)", "R": [25.0, 50.0, 100.0, 200.0],
             "z": 1j},
    "L3.4": {"n": [1, 2, 3], "A": [2.0, 10.0], "r": [0.2, 0.5], "pairs": 20, "x_range": [-3.0, 3.0], "z": 1j,
             "induction_pairs": 3},
    "L3.5": {"l": 0, "m": 1, "xprime": 0.3, "z": 1j, "phi": "bump(0.3,1)", "grid": list(BOUNDARY_GRID),
             "gamma": 0.0, "gamma_threshold": -1.0},
    "C3.2": {"n": 2, "l": 1, "xprime": 0.3, "z": 1j, "phi": "bump(0.3,1)", "grid": list(BOUNDARY_GRID),
             "gamma": 0.0, "gamma_threshold": -3.0},
    "L3.6": {"n": [1, 2], "xprime": 0.3, "z": 1j, "phi": "bump(0,1)", "A": list(A_DELTA)},
    "T3.2": {"n": [0, 1, 2], "phi": ["gaussian(0,0.1)", "bump(0,1)"], "xprime": [0.0, 0.3], "A": list(A_DELTA),
             "z": 1j},
    "T3.3": {"n": [1], "kappa": 0.5, "k0": 2.0, "sign": 1, "xprime": 3.0, "A": list(A_SLOW), "z": 1j},
    "L4.1": {"alpha": 1.0, "z": 1j, "A": [2.0, 5.0], "pairs": 20, "x_range": [-3.0, 3.0], "residue_pairs": 5},
    "L4.2": {"alpha": 1.0, "z": 1j, "xprime": 0.3, "phi": "bump(0.3,1)", "grid": list(BOUNDARY_GRID),
             "gamma": 0.0, "gamma_threshold": -1.0},
    "L4.3": {"samples": 100_000, "alpha": 1.0, "z": 1j, "phi": "gaussian(0,1)", "xprime": 0.3,
             "A": [5.0, 10.0, 20.0, 40.0, 80.0]},
    "T4.1": {"alpha": 1.0, "z": 1j, "phi": ["gaussian(0,0.1)", "bump(0,1)"], "xprime": [0.0, 0.3],
             "A": list(A_DELTA)},
    "L4.4": {"samples": 100_000},
    "T4.2": {"alpha": 1.0, "z": 1j, "kappa": 0.5, "k0": 2.0, "sign": 1, "xprime": 3.0, "A": list(A_SLOW)},
    "L4.5": {"alpha": 1.0, "z": 1j, "eps": [0.2, 0.5], "pairs": 20, "x_range": [-3.0, 3.0]},
    "R3.4": {"z": 1j, "xprime": 0.0, "eps": list(LONG_EPS_GRID), "R_list": [10.0, 50.0],
             "window_R": [5.0, 10.0, 20.0, 40.0], "window_gamma": 2.0},
    "R4.2": {"alpha": 1.0, "z": 1j, "xprime": 0.5, "eps": list(LONG_EPS_GRID), "R_list": [10.0, 50.0],
             "candidates": ["gaussian(0,1)", "bump(0,1)", "inverse_square(1j)", "constant(1)",
                            "cos_over_linear(1,1j)"]},
}
for _name, _phi in _VAN_PHI.items():
    DEFAULTS[_name] = {"phi": _phi, "xprime": 0.5, "z": 1j, "alpha": 1.0, "eps": list(LONG_EPS_GRID)}

_FUNCS = {
    "L3.1": _check_L31,
    "L3.2": _boundary("L3.2"),
    "C3.1": _boundary("C3.1"),
    "L3.3": _check_L33,
    "T3.1": _check_T31,
    "L3.4": _check_L34,
    "L3.5": _boundary("L3.5"),
    "C3.2": _boundary("C3.2"),
    "L3.6": _check_L36,
    "T3.2": _check_T32,
    "T3.3": _check_T33,
    "L4.1": _check_L41,
    "L4.2": _boundary("L4.2"),
    "L4.3": _check_L43,
    "T4.1": _check_T41,
    "L4.4": _check_L44,
    "T4.2": _check_T42,
    "L4.5": _check_L45,
    "R3.4": _check_R34,
    "R4.2": _check_R42,
}
for _name in _VAN_PHI:
    _FUNCS[_name] = _vanishing(_name)

# composites pass iff every component passes
COMPOSITES = {
    "C4.1": ("T4.1", "L4.5", "L4.6", "L4.7", "L3.7"),
    "R3.3": ("T3.2", "L3.4"),
}

# parameter-range annotations: (target check, parameter overrides)
ANNOTATIONS = {
    "R3.1": ("T3.1", {"m": 0}),
    "R3.2": ("T3.3", {"n": [0, 1, 2],
                      "phi": [[1.0, "slow_growth(0.5,2,+)"], [0.5, "slow_growth(0.25,-1,-)"], [1.0, "gaussian(0,1)"]]}),
    "R4.1": ("T4.2", {"phi": [[1.0, "slow_growth(0.5,2,+)"], [0.5, "slow_growth(0.25,-1,-)"],
                              [1.0, "gaussian(0,1)"]]}),
}

SUITE_ORDER = (
    "L3.1", "L3.2", "C3.1", "L3.3", "T3.1", "R3.1", "L3.4", "L3.5", "C3.2", "L3.6", "T3.2", "T3.3", "R3.2",
    "R3.3", "L3.7", "L3.8", "L3.9", "L3.10", "R3.4", "L4.1", "L4.2", "L4.3", "T4.1", "L4.4", "T4.2", "R4.1",
    "L4.5", "L4.6", "L4.7", "C4.1", "L4.8", "R4.2",
)
CATALOG_IDS = frozenset(SUITE_ORDER)


def parse_param_value(text: str):
    """Literal (number, list, complex, ...) when possible, else the raw string."""
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return text


def _params_for(cid: str, params: dict) -> dict:
    p = copy.deepcopy(DEFAULTS[cid])
    p.update(params or {})
    return p


def _result(cid, ok, metrics, prov, seed, params, tol, t0):
    prov = dict(prov)
    prov.update({"seed": seed, "params": params, "tolerances": tol, "seconds": time.perf_counter() - t0})
    return CheckResult(cid, "pass" if ok else "fail", _jsonable(metrics), _jsonable(prov))


def run_check(spec: CheckSpec, seed: int = 0) -> CheckResult:
    """Run one catalog check.

    Raises:
        KeyError: unknown id.
        PreconditionError: parameters violate the check's preconditions.
    """
    cid = spec.id
    if cid not in CATALOG_IDS:
        raise KeyError(f"unknown check id {cid!r}")
    t0 = time.perf_counter()
    tol = dict(_BASE_TOL)
    tol.update(spec.tolerances or {})
    if cid in COMPOSITES:
        parts = [run_check(CheckSpec(c, {}, spec.tolerances), seed) for c in COMPOSITES[cid]]
        ok = all(r.passed for r in parts)
        metrics = {"components": {r.id: r.verdict for r in parts}}
        return _result(cid, ok, metrics, {"composed_of": list(COMPOSITES[cid])}, seed, {}, tol, t0)
    if cid in ANNOTATIONS:
        target, overrides = ANNOTATIONS[cid]
        params = dict(overrides)
        params.update(spec.params or {})
        res = run_check(CheckSpec(target, params, spec.tolerances), seed)
        prov = dict(res.provenance)
        prov["annotates"] = target
        return CheckResult(cid, res.verdict, res.metrics, prov, res.error)
    params = _params_for(cid, spec.params)
    ok, metrics, prov = _FUNCS[cid](params, tol, seed, cid)
    return _result(cid, ok, metrics, prov, seed, params, tol, t0)


def run_suite(config, *, progress=None) -> list:
    """Run the enabled checks of a :class:`RunConfig` in catalog order.

    Errors inside a check become a ``fail`` result carrying the message.
    """
    entries = config.enabled_checks()
    gtol = dict(config.tolerances)

    def one(entry):
        tol = dict(gtol)
        tol.update(entry.get("tolerances") or {})
        spec = CheckSpec(entry["id"], entry.get("params") or {}, tol)
        try:
            res = run_check(spec, config.seed)
        except (PreconditionError, ValueError, ArithmeticError, RuntimeError, KeyError) as exc:
            res = CheckResult(spec.id, "fail", {}, {"seed": config.seed, "params": _jsonable(spec.params)},
                              f"{type(exc).__name__}: {exc}")
        if progress is not None:
            progress(res)
        return res

    if config.workers > 1:
        with ThreadPoolExecutor(config.workers) as ex:
            return list(ex.map(one, entries))
    return [one(e) for e in entries]


# --- single probes ---------------------------------------------------------------

_PROBE_KIND = {
    "T3.2": "delta", "T4.1": "delta", "T3.3": "slow", "T4.2": "slow", "T3.1": "biortho",
    "R3.4": "infinity", "R4.2": "infinity",
    "L3.2": "boundary", "C3.1": "boundary", "L3.5": "boundary", "C3.2": "boundary", "L4.2": "boundary",
}
for _name in _VAN_PHI:
    _PROBE_KIND[_name] = "vanishing"
PROBE_IDS = frozenset(_PROBE_KIND)


def probe_report(cid: str, params: dict | None = None):
    """One :class:`ConvergenceReport` for a catalog id that has a probe form.

    Scalar parameters replace list-valued defaults, e.g. ``xprime=3`` or
    ``phi="bump(0,1)"``.

    Raises:
        KeyError: the id has no single-probe form.
    """
    if cid not in PROBE_IDS:
        raise KeyError(f"check {cid!r} has no single-probe form; choose from {sorted(PROBE_IDS)}")
    kind = _PROBE_KIND[cid]
    p = copy.deepcopy(DEFAULTS[cid])
    p.update(params or {})

    def first(v):
        return v[0] if isinstance(v, (list, tuple)) else v

    if kind == "delta":
        phi, xp = _fn(first(p["phi"])), float(first(p["xprime"]))
        if cid == "T3.2":
            model = EdgeModel(int(first(p["n"])), complex(p["z"]))
            make = lambda A: edge_kernel_slice(model, A, xp)
        else:
            model = InnerModel(p["alpha"], complex(p["z"]))
            make = lambda A: inner_kernel_slice(model, A, xp)
        return delta_probe(make, phi, xp, p["A"], label=f"{cid}[{model.descriptor()},{phi.label},x'={xp}]")
    if kind == "slow":
        model = (EdgeModel(int(first(p["n"])), complex(p["z"])) if cid == "T3.3"
                 else InnerModel(p["alpha"], complex(p["z"])))
        return slow_growth_probe(model, p["A"], float(p["kappa"]), float(p["k0"]), int(p["sign"]),
                                 float(p["xprime"]))
    if kind == "biortho":
        return biortho_smeared_probe(p["n"], p["m"], _fn(p["phi"]), float(first(p["kprime"])), p["R"],
                                     z=complex(p["z"]))
    if kind == "vanishing":
        model = InnerModel(p["alpha"], complex(p["z"]))
        phi = _fn(p["phi"])
        return vanishing_probe(vanishing_family(cid, p["xprime"], z=complex(p["z"]), model=model), phi,
                               VANISHING_THRESHOLDS[cid], p["eps"], xp=p["xprime"], gamma=p.get("gamma"),
                               label=f"{cid}[{phi.label}]")
    if kind == "infinity":
        which = p.get("which", "fun96a" if cid == "R3.4" else "funA96")
        default_phi = "inverse_square(1j)" if which != "funA96" else "cos_over_linear(1,1j)"
        phi = _fn(p.get("phi", default_phi))
        model = InnerModel(p.get("alpha", 1.0), complex(p["z"]))
        return infinity_functional_probe(which, phi, float(p["xprime"]), p["eps"], z=complex(p["z"]), model=model)
    fam_params = {k: v for k, v in p.items() if k not in ("phi", "grid", "gamma", "gamma_threshold")}
    return boundary_weak_limit_probe(boundary_family(cid, **fam_params), _fn(p["phi"]), p["gamma"], p["grid"],
                                     gamma_threshold=p["gamma_threshold"], label=cid)
