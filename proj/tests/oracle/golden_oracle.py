#!/usr/bin/env python3
"""Independent reference run over the bundled synthetic dataset.

Reads data/synthetic/{config.ini, registry.json, sheets/, prompt.txt,
rubric.csv} and writes the expected CSV/JSON reports into tests/golden/.
Shares no code with the C++ library. Arithmetic is written in the same
evaluation order as the reference definitions so full-precision JSON values
compare byte for byte; normality figures come from scipy and are only
rendered at fixed decimals. The tier predictor is refit with scipy's
L-BFGS on the same objective instead of the library's gradient descent.

Usage: golden_oracle.py [--data DIR] [--out DIR]
"""

import argparse
import configparser
import csv
import hashlib
import io
import json
import math
import os
from pathlib import Path

import numpy as np
from scipy import optimize, stats

ROOT = Path(__file__).resolve().parents[2]
PILLARS = ["GOV", "ENE", "BIO", "CLI"]
PILLAR_NAMES = {
    "GOV": "Governance",
    "ENE": "Energy & Circular Economy",
    "BIO": "Biodiversity",
    "CLI": "Climate Strategy",
}
TIERS = ["Weak", "Average", "Good", "Excellent"]
STUB_SUFFIX = "Recommendations unavailable in offline mode."
FIXED_TS = "1970-01-01T00:00:00Z"


# ---------------------------------------------------------------- rendering

def fixed(x, d):
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    s = "%.*f" % (d, x)
    if s.startswith("-") and set(s) <= set("-0."):
        s = s[1:]
    return s


def shortest(x):
    r = repr(float(x))
    return r[:-2] if r.endswith(".0") else r


def round_half_up(x, d):
    from decimal import Decimal, ROUND_HALF_UP
    return str(Decimal(repr(float(x))).quantize(Decimal(1).scaleb(-d), rounding=ROUND_HALF_UP))


def jnum(x):
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return None
    return x


def dump_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def dump_line(obj):
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def write_csv(path, header, rows):
    buf = io.StringIO()
    for r in [header] + rows:
        buf.write(",".join(csv_field(c) for c in r) + "\n")
    path.write_text(buf.getvalue(), encoding="utf-8")


def csv_field(s):
    s = str(s)
    if any(c in s for c in ',"\n\r'):
        return '"' + s.replace('"', '""') + '"'
    return s


# ---------------------------------------------------------------- ingestion

def blank(c):
    return c is None or c.strip() == ""


def code(s):
    out = []
    for ch in s.strip():
        if ch in " -\t":
            out.append("_")
        elif "a" <= ch <= "z":
            out.append(ch.upper())
        else:
            out.append(ch)
    return "".join(out)


def paren_only(s):
    s = s.strip()
    if len(s) < 2 or s[0] != "(" or s[-1] != ")":
        return False
    depth = 0
    for i, ch in enumerate(s):
        depth += ch == "("
        depth -= ch == ")"
        if depth == 0 and i != len(s) - 1:
            return False
    return True


def read_sheet(path, skip=10):
    text = path.read_text(encoding="utf-8-sig")
    rows = [[c if c != "" else None for c in r] for r in csv.reader(io.StringIO(text))]
    rows = rows[skip:]
    width = max(len(r) for r in rows)
    rows = [r + [None] * (width - len(r)) for r in rows]
    rows = [r for r in rows if not all(blank(c) for c in r)]
    cols = [c for c in range(width) if any(not blank(r[c]) for r in rows)]
    rows = [[r[c] for c in cols] for r in rows]
    header = [code(c) for c in rows[0][1:]]
    data = [r for r in rows[1:] if not (r[0] is not None and paren_only(r[0]))]
    crit, last = [], None
    for r in data:
        if not blank(r[0]):
            last = r[0].strip()
        assert last is not None
        crit.append(last)
    criteria, values = [], []
    for label, r in zip(crit, data):
        if all(blank(c) for c in r[1:]):
            continue
        vals = [0.0 if blank(c) else float(c) for c in r[1:]]
        assert all(v >= 0 for v in vals)
        criteria.append(label)
        values.append(vals)
    return code(path.stem), header, criteria, values


# ---------------------------------------------------------------- scoring

def load_registry(path):
    reg = {}
    for q in json.loads(path.read_text())["questions"]:
        if q["type"] == "write_down_binned":
            m = q["midpoints"]
            lo, hi = min(m), max(m)
            opts = {b: 10.0 * (x - lo) / (hi - lo) for b, x in zip(q["bins"], m)}
        else:
            opts = {k: float(v) for k, v in q["options"].items()}
        reg[q["id"]] = {
            "pillar": q["pillar"],
            "options": opts,
            "na": set(q.get("na", [])),
            "ignore": set(q.get("ignore", [])),
            "importance": float(q.get("importance", 1.0)),
        }
    return reg


def indicator(freqs, spec):
    mass = weighted = 0.0
    lo, hi = 10.0, 0.0
    for label in sorted(freqs, key=lambda s: s.encode()):
        f = freqs[label]
        if label in spec["na"] or label in spec["ignore"]:
            continue
        s = spec["options"][label]
        if f == 0.0:
            continue
        mass += f
        weighted += f * s
        lo, hi = min(lo, s), max(hi, s)
    assert mass > 0
    return min(max(weighted / mass, lo), hi)


def scale(x, mn, mx):
    if not mx > mn:
        return 5.5
    t = (x - mn) / (mx - mn)
    return min(max(1.0 + 9.0 * t, 1.0), 10.0)


def composite(vals, w):
    esg = 0.0
    for p in PILLARS:
        esg += w[p] * vals[p]
    return esg


# ---------------------------------------------------------------- statistics

def quantile(xs, p):
    h = (len(xs) - 1) * p
    lo = math.floor(h)
    if lo + 1 >= len(xs):
        return xs[-1]
    return xs[lo] + (h - lo) * (xs[lo + 1] - xs[lo])


def thresholds(vals):
    xs = sorted(vals)
    return quantile(xs, 0.25), quantile(xs, 0.5), quantile(xs, 0.75)


def tier(s, t):
    if s < t[0]:
        return 0
    if s < t[1]:
        return 1
    if s < t[2]:
        return 2
    return 3


def mean_std(vals):
    total = 0.0
    for v in vals:
        total += v
    m = total / len(vals)
    if len(vals) < 2:
        return m, None
    ss = 0.0
    for v in vals:
        ss += (v - m) * (v - m)
    return m, math.sqrt(ss / (len(vals) - 1))


def avg_ranks(v):
    idx = sorted(range(len(v)), key=lambda i: v[i])
    r = [0.0] * len(v)
    i = 0
    while i < len(idx):
        j = i
        while j + 1 < len(idx) and v[idx[j + 1]] == v[idx[i]]:
            j += 1
        for k in range(i, j + 1):
            r[idx[k]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return r


def spearman(x, y):
    rx, ry = avg_ranks(x), avg_ranks(y)
    n = float(len(rx))
    mx = my = 0.0
    for a, b in zip(rx, ry):
        mx += a
        my += b
    mx /= n
    my /= n
    sxy = sxx = syy = 0.0
    for a, b in zip(rx, ry):
        sxy += (a - mx) * (b - my)
        sxx += (a - mx) * (a - mx)
        syy += (b - my) * (b - my)
    if not (sxx > 0 and syy > 0):
        return None
    return min(max(sxy / math.sqrt(sxx * syy), -1.0), 1.0)


def errors(b, w):
    a = s2 = s = 0.0
    for x, y in zip(b, w):
        d = y - x
        a += abs(d)
        s2 += d * d
        s += d
    n = float(len(b))
    return a / n, math.sqrt(s2 / n), s / n


def categorical(a, b):
    n = float(len(a))
    ca, cb, hits = [0.0] * 4, [0.0] * 4, [0.0] * 4
    agree = 0.0
    for x, y in zip(a, b):
        ca[x] += 1.0
        cb[y] += 1.0
        if x == y:
            agree += 1.0
            hits[x] += 1.0
    acc = agree / n
    f1, absent = 0.0, []
    for k in range(4):
        den = ca[k] + cb[k]
        if den == 0.0:
            absent.append(TIERS[k])
            continue
        f1 += 2.0 * hits[k] / den
    pe = 0.0
    for k in range(4):
        pe += (ca[k] / n) * (cb[k] / n)
    if pe >= 1.0:
        kappa, degen = (1.0 if acc >= 1.0 else 0.0), True
    else:
        kappa, degen = (acc - pe) / (1.0 - pe), False
    return acc, f1 / 4.0, kappa, degen, absent


def summarize(per_seed):
    finite = [v for v in per_seed if v is not None and math.isfinite(v)]
    out = {"per_seed": [jnum(v) for v in per_seed], "valid": len(finite), "mean": None, "std": None}
    if len(finite) >= 2:
        m, s = mean_std(finite)
        out["mean"], out["std"] = m, s
    return out


def krippendorff_ordinal(matrix):
    co = [[0.0] * 5 for _ in range(5)]
    items = 0
    for i in range(len(matrix[0])):
        vals = [row[i] for row in matrix if row[i] is not None]
        if len(vals) < 2:
            continue
        items += 1
        w = 1.0 / (len(vals) - 1)
        for p in range(len(vals)):
            for q in range(len(vals)):
                if p != q:
                    co[vals[p] - 1][vals[q] - 1] += w
    if items < 2:
        return None
    marg = [0.0] * 5
    total = 0.0
    for c in range(5):
        for k in range(5):
            marg[c] += co[c][k]
        total += marg[c]

    def d2(c, k):
        c, k = min(c, k), max(c, k)
        s = 0.0
        for g in range(c, k + 1):
            s += marg[g]
        s -= (marg[c] + marg[k]) / 2.0
        return s * s

    obs = exp = 0.0
    for c in range(5):
        for k in range(5):
            if c != k:
                d = d2(c, k)
                obs += co[c][k] * d
                exp += marg[c] * marg[k] * d
    if not exp > 0:
        return None
    return 1.0 - (total - 1.0) * obs / exp


# ---------------------------------------------------------------- splitting

class MT64:
    """MT19937-64 (Matsumoto & Nishimura reference algorithm)."""
    M64 = (1 << 64) - 1

    def __init__(self, seed):
        self.mt = [0] * 312
        self.mt[0] = seed & self.M64
        for i in range(1, 312):
            self.mt[i] = (6364136223846793005 * (self.mt[i - 1] ^ (self.mt[i - 1] >> 62)) + i) & self.M64
        self.i = 312

    def next(self):
        if self.i >= 312:
            for k in range(312):
                x = (self.mt[k] & 0xFFFFFFFF80000000) | (self.mt[(k + 1) % 312] & 0x7FFFFFFF)
                xa = x >> 1
                if x & 1:
                    xa ^= 0xB5026F5AA96619E9
                self.mt[k] = self.mt[(k + 156) % 312] ^ xa
            self.i = 0
        x = self.mt[self.i]
        self.i += 1
        x ^= (x >> 29) & 0x5555555555555555
        x ^= (x << 17) & 0x71D67FFFEDA60000
        x ^= (x << 37) & 0xFFF7EEE000000000
        x ^= x >> 43
        return x & self.M64

    def below(self, bound):
        threshold = ((1 << 64) - bound) % bound
        while True:
            r = self.next()
            if r >= threshold:
                return r % bound


def split(countries, seed, fraction):
    xs = sorted(countries)
    k = math.floor(fraction * len(xs) + 0.5)
    assert len(xs) >= 10 and k >= 4
    rng = MT64(seed)
    for i in range(len(xs), 1, -1):
        j = rng.below(i)
        xs[i - 1], xs[j] = xs[j], xs[i - 1]
    return sorted(xs[:k]), sorted(xs[k:])


# ---------------------------------------------------------------- tier model

def fit_lr(X, y, lam):
    X = np.asarray(X, dtype=float)
    mean = X.mean(axis=0)
    sd = X.std(axis=0)
    sd[sd == 0] = 1.0
    Z = (X - mean) / sd
    n, d = Z.shape
    Y = np.zeros((n, 4))
    Y[np.arange(n), y] = 1.0

    def f(theta):
        W = theta[: 4 * d].reshape(4, d)
        b = theta[4 * d:]
        L = Z @ W.T + b
        L = L - L.max(axis=1, keepdims=True)
        logp = L - np.log(np.exp(L).sum(axis=1, keepdims=True))
        P = np.exp(logp)
        val = -(Y * logp).sum() / n + 0.5 * lam * (W * W).sum()
        G = (P - Y) / n
        gW = G.T @ Z + lam * W
        gb = G.sum(axis=0)
        return val, np.concatenate([gW.ravel(), gb])

    res = optimize.minimize(f, np.zeros(4 * d + 4), jac=True, method="L-BFGS-B",
                            options={"gtol": 1e-12, "ftol": 1e-15, "maxiter": 10000})
    W = res.x[: 4 * d].reshape(4, d)
    b = res.x[4 * d:]
    return mean, sd, W, b


def predict_lr(model, x):
    mean, sd, W, b = model
    z = W @ ((np.asarray(x) - mean) / sd) + b
    return int(np.argmax(z))


# ---------------------------------------------------------------- pipeline

def evaluate_split(raw, full_scaled, base, hold, scaling):
    """Per-pillar reference/workflow scores and thresholds for one split."""
    out = {}
    for p in PILLARS:
        vals = [raw[c][p] for c in base]
        mn, mx = min(vals), max(vals)
        work = {c: (scale(raw[c][p], mn, mx) if scaling else raw[c][p]) for c in raw}
        ref = {c: full_scaled[c][p] for c in raw}
        th = thresholds([work[c] for c in base])
        out[p] = (work, ref, th, (mn, mx))
    return out


def pillar_metrics(work, ref, th, hold):
    b = [ref[c] for c in hold]
    w = [work[c] for c in hold]
    mae, rmse, bias = errors(b, w)
    rho = spearman(b, w) if len(b) >= 2 else None
    acc, f1, kappa, degen, absent = categorical([tier(x, th) for x in b], [tier(x, th) for x in w])
    return mae, rmse, bias, rho, acc, f1, kappa, degen, absent


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--data", default=str(ROOT / "data" / "synthetic"))
    ap.add_argument("--out", default=str(ROOT / "tests" / "golden"))
    args = ap.parse_args()
    data, out = Path(args.data), Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    cfg = configparser.ConfigParser()
    cfg.read(data / "config.ini")
    reg = load_registry(data / cfg["input"]["registry"])
    countries = [code(c) for c in cfg["input"]["countries"].split(",")]
    weights = dict(zip(PILLARS, [float(x) for x in cfg["scoring"]["weights"].split(",")]))
    scaling = cfg["scoring"].getboolean("scaling")
    fraction = float(cfg["split"]["fraction"])
    seed = int(cfg["split"]["seed"])
    n_seeds = int(cfg["rrssv"]["seeds"])
    lam = float(cfg["ml"]["lambda"])
    skip = int(cfg["input"].get("skip_rows", "10"))

    # ingest + indicator scores
    ind = {c: {} for c in countries}
    sheets_dir = data / cfg["input"]["sheets"]
    for path in sorted(sheets_dir.glob("*.csv"), key=lambda p: p.stem):
        qid, header, criteria, values = read_sheet(path, skip)
        spec = reg[qid]
        for c in countries:
            col = header.index(c)
            freqs = {}
            for label, row in zip(criteria, values):
                freqs[label] = freqs.get(label, 0.0) + row[col]
            ind[c][qid] = indicator(freqs, spec)

    raw = {}
    for c in countries:
        raw[c] = {}
        for p in PILLARS:
            num = den = 0.0
            for qid in sorted(q for q in reg if reg[q]["pillar"] == p):
                if qid not in ind[c]:
                    continue
                num += reg[qid]["importance"] * ind[c][qid]
                den += reg[qid]["importance"]
            raw[c][p] = num / den
    ordered = sorted(countries)
    full = {c: {} for c in ordered}
    for p in PILLARS:
        vals = [raw[c][p] for c in ordered]
        mn, mx = min(vals), max(vals)
        for c in ordered:
            full[c][p] = scale(raw[c][p], mn, mx) if scaling else raw[c][p]
    comp = {c: composite(full[c], weights) for c in ordered}

    write_csv(out / "indicators.csv", ["country", "question", "pillar", "score"],
              [[c, q, reg[q]["pillar"], fixed(ind[c][q], 3)] for c in ordered for q in sorted(ind[c])])
    write_csv(out / "scores.csv",
              ["country"] + [p + "_raw" for p in PILLARS] + [p + "_scaled" for p in PILLARS] + ["composite"],
              [[c] + [fixed(raw[c][p], 3) for p in PILLARS] + [fixed(full[c][p], 3) for p in PILLARS]
               + [fixed(comp[c], 3)] for c in ordered])

    # primary split
    base, hold = split(ordered, seed, fraction)
    ev = evaluate_split(raw, full, base, hold, scaling)

    stats_rows, th_rows, cls_rows, diff_rows, agreement = [], [], [], [], []
    for p in PILLARS:
        work, ref, th, _ = ev[p]
        sample = [work[c] for c in base]
        m, s = mean_std(sample)
        xs = sorted(sample)
        constant = min(sample) == max(sample)
        sw = stats.shapiro(sample) if (not constant and 3 <= len(sample) <= 5000) else None
        dp = stats.normaltest(sample) if (not constant and len(sample) >= 20) else None
        stats_rows.append([
            p, str(len(sample)), fixed(m, 3), fixed(s, 3), fixed(quantile(xs, 0.5), 3),
            fixed(quantile(xs, 0.25), 3), fixed(quantile(xs, 0.75), 3),
            fixed(sw[0], 4) if sw else "", fixed(sw[1], 4) if sw else "",
            ("yes" if sw[1] > 0.05 else "no") if sw else "",
            fixed(dp[0], 4) if dp else "", fixed(dp[1], 4) if dp else "",
            ("yes" if dp[1] > 0.05 else "no") if dp else "",
        ])
        th_rows.append([p, fixed(th[0], 3), fixed(th[1], 3), fixed(th[2], 3)])
        for c in ordered:
            cls_rows.append([c, "baseline" if c in base else "holdout", p, fixed(ref[c], 3),
                             fixed(work[c], 3), TIERS[tier(ref[c], th)], TIERS[tier(work[c], th)]])

        bsum, wsum, bn, wn = [0.0] * 4, [0.0] * 4, [0] * 4, [0] * 4
        for c in base:
            k = tier(work[c], th)
            bsum[k] += work[c]
            bn[k] += 1
        for c in hold:
            k = tier(work[c], th)
            wsum[k] += work[c]
            wn[k] += 1
        diffs = []
        for k in range(4):
            bm = bsum[k] / bn[k] if bn[k] else None
            wm = wsum[k] / wn[k] if wn[k] else None
            df = wm - bm if (bm is not None and wm is not None) else None
            diff_rows.append([PILLAR_NAMES[p], TIERS[k], fixed(bm, 3), fixed(wm, 3), fixed(df, 3)])
            diffs.append({"tier": TIERS[k], "baseline_n": bn[k], "workflow_n": wn[k],
                          "baseline_mean": bm, "workflow_mean": wm, "diff": df})

        mae, rmse, bias, rho, acc, f1, kappa, degen, absent = pillar_metrics(work, ref, th, hold)
        agreement.append({
            "pillar": p, "name": PILLAR_NAMES[p], "n": len(hold), "mae": mae, "rmse": rmse, "bias": bias,
            "spearman": rho, "accuracy": acc, "macro_f1": f1, "cohen_kappa": kappa,
            "kappa_degenerate": degen, "absent_classes": absent,
            "thresholds": {"q1": th[0], "q2": th[1], "q3": th[2]},
            "per_tier_diffs": diffs,
        })

    write_csv(out / "baseline_stats.csv",
              ["pillar", "n", "mean", "std", "median", "q1", "q3", "shapiro_w", "shapiro_p", "shapiro_normal",
               "dagostino_k2", "dagostino_p", "dagostino_normal"], stats_rows)
    write_csv(out / "thresholds.csv", ["pillar", "q1", "q2", "q3"], th_rows)
    write_csv(out / "classification.csv",
              ["country", "set", "pillar", "reference_score", "workflow_score", "reference_tier",
               "workflow_tier"], cls_rows)
    write_csv(out / "tier_diffs.csv", ["Group", "Classification", "Baseline", "Workflow", "Diff."], diff_rows)
    split_obj = {"seed": seed, "fraction": fraction, "baseline_countries": base, "holdout_countries": hold}
    (out / "agreement.json").write_text(dump_json({"split": split_obj, "pillars": agreement}), encoding="utf-8")

    # repeated sub-sampling
    seeds = list(range(n_seeds))
    per = {}
    ml_acc, ml_f1, ml_conv, ml_unseen = [], [], [], []
    for s in seeds:
        b, h = split(ordered, s, fraction)
        e = evaluate_split(raw, full, b, h, scaling)
        truth, pred = [], []
        unseen = 0.0
        for p in PILLARS:
            work, ref, th, _ = e[p]
            mae, rmse, bias, rho, acc, f1, kappa, _, _ = pillar_metrics(work, ref, th, h)
            for name, v in [("mae", mae), ("rmse", rmse), ("bias", bias), ("spearman", rho),
                            ("accuracy", acc), ("macro_f1", f1), ("cohen_kappa", kappa)]:
                per.setdefault(p + "." + name, []).append(v)
            qids = sorted(q for q in reg if reg[q]["pillar"] == p)
            X = [[ind[c][q] for q in qids] for c in b]
            y = [tier(work[c], th) for c in b]
            unseen += 4 - len(set(y))
            model = fit_lr(X, y, lam)
            for c in h:
                truth.append(tier(ref[c], th))
                pred.append(predict_lr(model, [ind[c][q] for q in qids]))
        acc, f1, _, _, _ = categorical(truth, pred)
        ml_acc.append(acc)
        ml_f1.append(f1)
        ml_conv.append(1.0)
        ml_unseen.append(unseen)

    rr = {"seeds": seeds, "fraction": fraction, "metrics": {k: summarize(v) for k, v in per.items()}}
    (out / "rrssv.json").write_text(dump_json(rr), encoding="utf-8")
    ml = {
        "experimental": True,
        "task": "tier prediction per country and pillar",
        "model": "multinomial logistic regression, L2",
        "features": "pillar",
        "lambda": lam,
        "seeds": seeds,
        "fraction": fraction,
        "metrics": {"accuracy": summarize(ml_acc), "macro_f1": summarize(ml_f1),
                    "converged_fraction": summarize(ml_conv), "unseen_classes": summarize(ml_unseen)},
    }
    (out / "ml_baseline.json").write_text(dump_json(ml), encoding="utf-8")

    # recommendations on the composite
    wcomp = {c: composite({p: ev[p][0][c] for p in PILLARS}, weights) for c in ordered}
    cth = thresholds([wcomp[c] for c in base])
    template = (data / cfg["recommend"]["prompt_template"]).read_text(encoding="utf-8")
    flags = sorted(((wcomp[c], c) for c in hold if tier(wcomp[c], cth) < 2))
    lines = []
    for score, c in flags:
        t = TIERS[tier(score, cth)]
        prompt = (template.replace("{country}", c).replace("{score}", shortest(score))
                  .replace("{tier}", t).replace("{pillar}", "Composite ESG"))
        digest = hashlib.sha256(prompt.encode("utf-8")).hexdigest()
        lines.append(dump_line({
            "country": c, "pillar": None, "score": score, "tier": t,
            "feedback_line": "Scored only " + round_half_up(score, 2) + "/10.",
            "prompt": prompt, "response_text": "[stub " + digest + "] " + STUB_SUFFIX,
            "model_id": "stub", "temperature": 0.0, "timestamp": FIXED_TS,
            "latency_ms": 0.0, "retries": 0, "error": None,
        }))
    (out / "recommendations.jsonl").write_text("".join(l + "\n" for l in lines), encoding="utf-8")

    # rubric reliability
    rub = list(csv.DictReader(open(data / cfg["recommend"]["rubric"], encoding="utf-8")))
    raters = sorted({r["rater"] for r in rub})
    items = sorted({r["item"] for r in rub})
    rubric = {"raters": raters, "items": items, "alpha": {}}
    for crit in ["relevance", "actionability", "faithfulness"]:
        m = [[None] * len(items) for _ in raters]
        for r in rub:
            m[raters.index(r["rater"])][items.index(r["item"])] = int(r[crit])
        rubric["alpha"][crit] = krippendorff_ordinal(m)
    (out / "rubric.json").write_text(dump_json(rubric), encoding="utf-8")
    print("golden reports written to", out)


if __name__ == "__main__":
    main()
