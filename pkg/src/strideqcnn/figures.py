"""Matplotlib rendering of run reports: accuracy bars, feature-error
histograms, and architecture loss curves, written as PNG files next to the
delimited outputs."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_run_figures(summaries, out_dir) -> list[str]:
    """Accuracy/agreement bars per stride setting plus an error histogram."""
    paths = []
    labels = [f"({s.stride_conv},{s.stride_pool})" for s in summaries]
    x = np.arange(len(summaries))

    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    width = 0.27
    ax.bar(x - width, [s.accuracy_classical for s in summaries], width,
           label="classical", color="#4878d0")
    ax.bar(x, [s.accuracy_quantum for s in summaries], width,
           label="quantum", color="#ee854a")
    ax.bar(x + width, [s.agreement for s in summaries], width,
           label="agreement", color="#6acc64")
    ax.set_xticks(x)
    ax.set_xticklabels(labels)
    ax.set_xlabel("stride (conv, pool)")
    ax.set_ylabel("fraction")
    ax.set_ylim(0, 1.05)
    ax.legend(loc="lower right", fontsize=8)
    ax.set_title("accuracy and prediction agreement")
    fig.tight_layout()
    path = os.path.join(out_dir, "run_summary.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    paths.append(path)

    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    for summary, label in zip(summaries, labels):
        errors = [r.max_feature_error for r in summary.results]
        ax.hist(errors, bins=24, alpha=0.6, label=f"stride {label}")
    ax.set_xlabel("max |quantum - classical| feature error")
    ax.set_ylabel("images")
    ax.legend(fontsize=8)
    ax.set_title("feature error distribution")
    fig.tight_layout()
    path = os.path.join(out_dir, "feature_errors.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    paths.append(path)
    return paths


def render_loss_figures(histories: dict, out_dir) -> str:
    """Side-by-side train/validation loss curves for the two architectures."""
    fig, axes = plt.subplots(1, len(histories), figsize=(9.0, 3.4),
                             sharey=True, squeeze=False)
    for ax, (name, history) in zip(axes[0], sorted(histories.items())):
        history = np.asarray(history)
        epochs = np.arange(len(history))
        ax.plot(epochs, history[:, 0], label="train", color="#4878d0")
        ax.plot(epochs, history[:, 1], label="validation", color="#d65f5f",
                linestyle="--")
        ax.set_title(name.upper())
        ax.set_xlabel("epoch")
        ax.legend(fontsize=8)
    axes[0][0].set_ylabel("cross-entropy loss")
    fig.tight_layout()
    path = os.path.join(out_dir, "loss_curves.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
