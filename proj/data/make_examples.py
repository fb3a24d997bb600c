"""Regenerates the example CSVs in this directory."""
import numpy as np

rng = np.random.default_rng(20240611)


def write(path, header, rows):
    with open(path, "w") as f:
        f.write(",".join(header) + "\n")
        for r in rows:
            f.write(",".join(r) + "\n")


def fmt(v):
    return repr(float(v)) if not float(v).is_integer() else str(int(v))


def draw(count):
    x1 = rng.normal(size=count).round(4)
    z = rng.integers(0, 2, size=count)
    y = (1.0 + 0.5 * z + 0.3 * x1 + rng.normal(size=count)).round(4)
    yhat = (0.8 * y + 0.4 + 0.15 * z + 0.5 * rng.normal(size=count)).round(4)
    return x1, z, y, yhat


x1, z, y, yhat = draw(200)
write("shared.csv", ["id", "x_1", "z", "y", "yhat"],
      [[str(i), fmt(x1[i]), str(z[i]), fmt(y[i]), fmt(yhat[i])] for i in range(200)])
x1, z, _, yhat = draw(2000)
write("surrogate.csv", ["id", "x_1", "z", "yhat"],
      [[str(i), fmt(x1[i]), str(z[i]), fmt(yhat[i])] for i in range(2000)])

pairs = []
for k in range(40):
    h = rng.normal(0.2, 0.3)
    hse = rng.uniform(0.08, 0.2)
    l = 1.3 * h + rng.normal(0, 0.1)
    pairs.append([f"study_{k:02d}", fmt(round(h, 4)), fmt(round(hse, 4)),
                  fmt(round(l, 4)), fmt(round(hse * 0.6, 4))])
write("effect_pairs.csv", ["study_id", "human_effect", "human_se", "llm_effect", "llm_se"], pairs)

preds, resp = [], []
for s in range(30):
    p = rng.dirichlet([2, 2, 2])
    p = np.round(p, 3)
    p[2] = round(1.0 - p[0] - p[1], 3)
    for v in range(3):
        preds.append([f"s{s:02d}", str(v + 1), fmt(p[v])])
    for _ in range(int(rng.integers(3, 9))):
        resp.append([f"s{s:02d}", str(int(rng.choice(3, p=[1 / 3] * 3)) + 1)])
write("scenario_predictions.csv", ["scenario_id", "outcome", "probability"], preds)
write("scenario_responses.csv", ["scenario_id", "outcome"], resp)

write("sample_a.csv", ["value"], [[fmt(round(v, 4))] for v in rng.normal(0, 1, 300)])
write("sample_b.csv", ["value"], [[fmt(round(v, 4))] for v in rng.normal(0.3, 1.2, 250)])
write("p.csv", ["value"], [["0.1"], ["0.2"], ["0.3"], ["0.4"]])
write("q.csv", ["value"], [["0.25"], ["0.25"], ["0.25"], ["0.25"]])
