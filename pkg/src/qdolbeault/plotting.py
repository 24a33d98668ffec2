"""Figures for the report directory."""
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def plot_spectra(spectra_raw, title, path):
    """One panel per auxiliary module: sorted eigenvalues of D² for each q0."""
    mods = sorted(spectra_raw)
    if not mods:
        return None
    fig, axes = plt.subplots(1, len(mods), figsize=(5 * len(mods), 4), squeeze=False)
    for ax, spec in zip(axes[0], mods):
        for q0, eig in sorted(spectra_raw[spec].items()):
            ax.plot(range(len(eig)), eig, marker="o", ms=3, lw=0.8, label=f"q0 = {q0:g}")
        ax.set_title(f"{title}, W = {spec}")
        ax.set_xlabel("index")
        ax.set_ylabel("eigenvalue of D²")
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
