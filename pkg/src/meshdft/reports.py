"""Ledger reports and scaling sweeps built on deterministic counters.

Work counters follow closed forms (also embedded in every report under
``work_model``):

* direct engine, per core: sum over dims of 4*(N_d/P_d)*N_d*rest_d real MACs,
  where rest_d = block_elements/(N_d/P_d);
* fft engine local transforms, per core: sum over dims of
  5*(N_d/P_d)*log2(N_d/P_d)*rest_d real ops;
* fft engine phase combination, per core: sum over dims of 4*P_d*block_elements.

The ``ideal_work`` column of a scaling report divides the baseline row's
work by the core-count ratio; the ``expected_work`` column evaluates the
closed form at each row. For the direct engine the two agree exactly; for
the fft engine they differ by the log2(M) factor, which is why both are
reported.
"""

import csv
import json
import math

import numpy as np

from .errors import ArgumentError

WORK_MODEL = {
    "kdft_einsum_flops_per_core": (
        "sum_d 4*(N_d/P_d)*N_d*rest_d, rest_d = block_elements/(N_d/P_d)"
    ),
    "fft_local_fft_flops_per_core": (
        "sum_d 5*(N_d/P_d)*log2(N_d/P_d)*rest_d, rest_d = block_elements/(N_d/P_d)"
    ),
    "fft_einsum_flops_per_core": "sum_d 4*P_d*block_elements",
}

CSV_COLUMNS = (
    "dims",
    "shape",
    "num_cores",
    "status",
    "einsum_flops_per_core",
    "local_fft_flops_per_core",
    "permute_count",
    "all_to_all_count",
    "bytes_moved",
    "ideal_work",
    "expected_work",
    "max_rel_error_vs_oracle",
)

ORACLE_ELEMENT_LIMIT = 4096


def _block_elements(extents, shape):
    out = 1
    for d, n in enumerate(extents):
        out *= n // shape.dims[d]
    return out


def kdft_einsum_flops_per_core(extents, shape):
    block = _block_elements(extents, shape)
    return sum(4 * n * block for n in extents)


def fft_local_flops_per_core(extents, shape):
    block = _block_elements(extents, shape)
    total = 0
    for d, n in enumerate(extents):
        m = n // shape.dims[d]
        total += 5 * int(math.log2(m)) * block
    return total


def fft_einsum_flops_per_core(extents, shape):
    block = _block_elements(extents, shape)
    return sum(4 * shape.dims[d] * block for d in range(len(extents)))


def expected_permutes(extents, shape):
    return sum(shape.dims[d] - 1 for d in range(len(extents)))


def expected_all_to_alls(extents, algo):
    return len(extents) if algo == "fft" else 0


def expected_ledger(algo, extents, shape, precision):
    """Closed-form prediction of every ledger counter for one transform."""
    num = shape.num_cores
    block = _block_elements(extents, shape)
    elem_bytes = 16 if precision.real_dtype == np.float64 else 8
    block_bytes = block * elem_bytes
    bytes_moved = 0
    for d in range(len(extents)):
        p = shape.dims[d]
        bytes_moved += (p - 1) * num * block_bytes
        if algo == "fft":
            bytes_moved += num * block_bytes
    if algo == "kdft":
        einsum = kdft_einsum_flops_per_core(extents, shape) * num
        local = 0
    else:
        einsum = fft_einsum_flops_per_core(extents, shape) * num
        local = fft_local_flops_per_core(extents, shape) * num
    return {
        "permute_count": expected_permutes(extents, shape),
        "all_to_all_count": expected_all_to_alls(extents, algo),
        "bytes_moved": bytes_moved,
        "einsum_flops": einsum,
        "local_fft_flops": local,
    }


def per_core(total, num_cores):
    if total % num_cores != 0:
        raise ArgumentError(
            f"counter {total} does not divide evenly over {num_cores} cores"
        )
    return total // num_cores


def transform_report(algo, extents, shape, precision, sampling, input_desc,
                     mesh, oracle_error=None, oracle_max_abs=None):
    """JSON-ready report for a single transform run.

    Physical execution details (worker count, timing) are deliberately
    absent: a report is a function of the logical run only.
    """
    ledger = mesh.ledger
    report = {
        "schema_version": 1,
        "command": "transform",
        "algo": algo,
        "dims": [int(n) for n in extents],
        "shape": list(shape.dims),
        "num_cores": shape.num_cores,
        "precision": precision.value,
        "sampling": sampling,
        "input": input_desc,
        "ledger": ledger.as_dict(),
        "per_dimension": ledger.per_tag(),
        "work_model": dict(WORK_MODEL),
        "expected": expected_ledger(algo, extents, shape, precision),
    }
    if oracle_error is not None:
        report["oracle"] = {
            "relative_l2_error": float(oracle_error),
            "max_abs": float(oracle_max_abs),
        }
    else:
        report["oracle"] = None
    return report


def oracle_feasible(extents):
    return int(np.prod(extents)) <= ORACLE_ELEMENT_LIMIT


def scaling_rows(results, algo):
    """Attach ideal_work to measured sweep rows (baseline = first ok row)."""
    baseline = None
    rows = []
    for r in results:
        row = dict(r)
        if row["status"] == "ok":
            work = (
                row["einsum_flops_per_core"]
                if algo == "kdft"
                else row["local_fft_flops_per_core"]
            )
            if baseline is None:
                baseline = (work, row["num_cores"])
            total = baseline[0] * baseline[1]
            if total % row["num_cores"] == 0:
                row["ideal_work"] = total // row["num_cores"]
            else:
                row["ideal_work"] = total / row["num_cores"]
        else:
            row["ideal_work"] = ""
        rows.append(row)
    return rows


def write_scaling_csv(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(CSV_COLUMNS), extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def write_scaling_json(path, algo, mode, base, rows):
    doc = {
        "schema_version": 1,
        "command": "scaling",
        "algo": algo,
        "mode": mode,
        "base": base,
        "work_model": dict(WORK_MODEL),
        "rows": rows,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    return doc
