import os

import psutil

# 默认输出目录（CLI 的 --output-dir 未指定时使用）
PSPLINE_MARGINAL_OUTPUT_DIR = os.getenv("PSPLINE_MARGINAL_OUTPUT_DIR", "runs")

PSPLINE_MARGINAL_LOG_LEVEL = os.getenv("PSPLINE_MARGINAL_LOG_LEVEL", "INFO")


def _default_threads() -> int:
    configured = os.getenv("PSPLINE_MARGINAL_THREADS")
    if configured:
        return max(1, int(configured))
    return max(1, psutil.cpu_count(logical=False) or 1)


# 副本/网格点并行的默认线程上限
PSPLINE_MARGINAL_THREADS = _default_threads()
