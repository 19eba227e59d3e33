"""Figure rendering for profile and report outputs.

Exact rationals are converted to floats only here, at the pixel boundary;
every file the figures sit next to keeps the exact values.
"""


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_profile_figure(rows, path, title=""):
    """Line plot of ord_res / hyp_res against the radius exponent t.

    rows: (t, ord_res, hyp_res) with exact values; hyp_res may be None when
    the exponent grid was too coarse for the retraction integral.
    """
    plt = _pyplot()
    ts = [float(r[0]) for r in rows]
    ords = [float(r[1]) for r in rows]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(ts, ords, "o-", label="ordRes", color="#1f6fb2")
    hyp_pts = [(float(r[0]), float(r[2])) for r in rows if r[2] is not None]
    if hyp_pts:
        ax.plot(*zip(*hyp_pts), "s--", label="hypRes", color="#b24a1f")
    ax.set_xlabel("radius exponent t")
    ax.set_ylabel("value")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_report_figure(report, path):
    """Two panels: minimum-locus exponent per iterate, and depth masses."""
    plt = _pyplot()
    per_j = report["per_j"]
    js = [row["j"] for row in per_j]
    texps = []
    for row in per_j:
        loc = row["locus"]
        if "segment" in loc:
            texps.append(float(_fraction(loc["segment"]["a"]["t"])))
        else:
            texps.append(float(_fraction(loc["t"])))
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4.2))
    ax1.step(js, texps, where="mid", color="#1f6fb2", marker="o")
    ax1.set_xlabel("iterate j")
    ax1.set_ylabel("locus radius exponent t")
    ax1.set_title("minimum locus per iterate")
    ax1.set_xticks(js)
    ax1.grid(True, alpha=0.3)

    bottoms = [0.0] * len(js)
    point_masses = [row["depths"]["point_mass"] for row in per_j]
    ax2.bar(js, point_masses, label="point mass", color="#444444")
    bottoms = [float(pm) for pm in point_masses]
    tags = []
    for row in per_j:
        for d in row["depths"]["directions"]:
            if d["tag"] not in tags:
                tags.append(d["tag"])
    cmap = plt.get_cmap("tab10")
    for k, tag in enumerate(tags):
        heights = []
        for row in per_j:
            h = 0
            for d in row["depths"]["directions"]:
                if d["tag"] == tag:
                    h = d["dep"] * d["count"]
            heights.append(h)
        ax2.bar(js, heights, bottom=bottoms, label=f"dir {tag}", color=cmap(k % 10))
        bottoms = [b + h for b, h in zip(bottoms, heights)]
    ax2.set_xlabel("iterate j")
    ax2.set_ylabel("pullback mass at the locus")
    ax2.set_title("depth profile per iterate")
    ax2.set_xticks(js)
    ax2.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _fraction(text):
    from fractions import Fraction

    return Fraction(text)
