import os
import logging

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import numpy as np
import seaborn as sns

logger = logging.getLogger(__name__)

# fixed ids and no date, so identical data gives identical SVG bytes
plt.rcParams['svg.hashsalt'] = 'cosponsor-influence'
plt.rcParams['svg.fonttype'] = 'none'
SVG_METADATA = {'Date': None, 'Creator': None}


def _save_svg(fig, path):
    os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
    fig.savefig(path, format='svg', metadata=SVG_METADATA)
    plt.close(fig)
    logger.info("Figure saved to %s", path)
    return path


def window_plot(window_frame, path, title=None):
    """Mean score of passed vs failed bills per window, with standard-error bars."""
    plt.style.use('default')
    sns.set_style('whitegrid')
    fig, ax = plt.subplots(figsize=(10, 5))
    x = np.arange(len(window_frame))
    for column, color, label in (('passed', 'tab:green', 'Passed'), ('failed', 'tab:red', 'Failed')):
        means = window_frame[f'mean_{column}'].to_numpy(dtype=np.float64)
        errors = np.nan_to_num(window_frame[f'se_{column}'].to_numpy(dtype=np.float64))
        ax.errorbar(x, means, yerr=errors, color=color, marker='o', markersize=3, capsize=2, label=label)

    step = max(1, len(x) // 12)
    ax.set_xticks(x[::step])
    ax.set_xticklabels(window_frame['window_start'].astype(str).to_numpy()[::step], rotation=45, ha='right')
    ax.set_xlabel('Window start')
    ax.set_ylabel('Mean bill score')
    if title:
        ax.set_title(title)
    legend = ax.legend()
    legend.get_frame().set_facecolor('white')
    legend.get_frame().set_edgecolor('black')
    fig.tight_layout()
    return _save_svg(fig, path)


def histogram_plot(histogram_frame, path, title=None):
    """Bar chart of the relative-difference histogram table."""
    plt.style.use('default')
    sns.set_style('whitegrid')
    fig, ax = plt.subplots(figsize=(7, 5))
    widths = (histogram_frame['bin_right'] - histogram_frame['bin_left']).to_numpy()
    ax.bar(histogram_frame['bin_left'].to_numpy(), histogram_frame['count'].to_numpy(),
           width=widths, align='edge', color='tab:purple', edgecolor='black')
    ax.axvline(0.0, color='black', linewidth=1, linestyle='--')
    ax.set_xlabel('Relative difference (passed vs failed)')
    ax.set_ylabel('Windows')
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save_svg(fig, path)
