"""Command-line surface.

Subcommands: simulate (write a CSV dataset), test (run one configured
hypothesis test), calibrate (Monte Carlo null calibration), cone-weights
(order-cone mixture weights), cov-check (covariance-structure test).

Reports are JSON with floats at 17 significant digits, byte-identical
for a fixed (data, config, seed) apart from the timestamp, which
--no-timestamp suppresses. Datasets are CSV: header `p=<int>,group`,
then one observation per row as the p(p+1)/2 raw upper-triangle entries
in row-major order followed by the group label (1 or 2).

Exit codes: 0 success, 1 internal-consistency failure, 2 input error.
"""

import argparse
import csv
import datetime
import json
import math
import sys

import numpy as np

from . import __version__, calibrate, lrt
from .symcore import ConvergenceError, matrix_log, sym_dim
from .matnormal import sample
from .symcore import CovParams


class InputError(Exception):
    """Bad user input: malformed file, inconsistent config, wrong shape."""


# ---------------------------------------------------------------------------
# serialization

def _fmt(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return "null"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            raise ValueError("cannot serialize non-finite number %r" % x)
        return "%.17g" % x
    if isinstance(x, str):
        return json.dumps(x)
    raise TypeError("cannot serialize %r" % (x,))


def dumps(obj, _indent=0):
    """JSON text with floats at 17 significant digits.

    The stdlib encoder offers no hook for float formatting, so the
    (small) recursion is done here; parsing still uses json.loads.
    """
    pad = "  " * _indent
    inner = "  " * (_indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = []
        for k, v in obj.items():
            parts.append("%s%s: %s" % (inner, json.dumps(str(k)),
                                       dumps(v, _indent + 1)))
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating))
               and not isinstance(v, bool) for v in seq):
            return "[" + ", ".join(_fmt(v) for v in seq) + "]"
        parts = ["%s%s" % (inner, dumps(v, _indent + 1)) for v in seq]
        return "[\n" + ",\n".join(parts) + "\n" + pad + "]"
    return _fmt(obj)


def _matrix(M):
    return [[float(v) for v in row] for row in np.asarray(M, dtype=float)]


def _dist_payload(dist):
    if isinstance(dist, lrt.ChiSq):
        return {"type": "chisq", "df": float(dist.df)}
    if isinstance(dist, lrt.ChiSqApprox):
        return {"type": "chisq-approx", "df": float(dist.df)}
    if isinstance(dist, lrt.FDist):
        return {"type": "f", "df1": float(dist.df1), "df2": float(dist.df2)}
    if isinstance(dist, lrt.ChiSqMix):
        return {"type": "chisq-mixture", "weights": list(dist.weights),
                "dfs": list(dist.dfs)}
    raise TypeError("unknown distribution %r" % (dist,))


def _mle_payload(fit):
    if fit is None:
        return None
    out = {}
    if hasattr(fit, "M_hat"):
        out["M_hat"] = _matrix(fit.M_hat)
    else:
        out["M1_hat"] = _matrix(fit.M1_hat)
        out["M2_hat"] = _matrix(fit.M2_hat)
    out["sigma2_hat"] = float(fit.sigma2_hat)
    out["tau_hat"] = float(fit.tau_hat)
    face = getattr(fit, "face_dim", None)
    if face is not None:
        out["face_dim"] = int(face)
    return out


def _timestamp():
    return datetime.datetime.now(datetime.timezone.utc).isoformat(
        timespec="seconds")


def _report_from_result(res, n, n1, seed, with_timestamp):
    report = {
        "tool": "symtest",
        "version": __version__,
        "test_id": res.test_id,
        "n": int(n),
    }
    if n1 is not None:
        report["n1"] = int(n1)
        report["n2"] = int(n - n1)
    report["statistic"] = float(res.statistic)
    report["distribution"] = _dist_payload(res.dist)
    report["p_value"] = float(res.p_value)
    report["mle"] = _mle_payload(res.fit_null)
    report["warnings"] = list(res.warnings)
    report["seed"] = None if seed is None else int(seed)
    if with_timestamp:
        report["timestamp"] = _timestamp()
    return report


# ---------------------------------------------------------------------------
# dataset files

def read_dataset(path):
    """Parse a dataset CSV into (S, n1).

    S stacks the group-1 observations before the group-2 ones; n1 is the
    group-1 count when group 2 is present, else None.
    """
    try:
        fh = open(path, newline="")
    except OSError as e:
        raise InputError("cannot read %s: %s" % (path, e))
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError("%s: empty file" % path)
        if (len(header) != 2 or not header[0].startswith("p=")
                or header[1].strip() != "group"):
            raise InputError("%s line 1: header must be 'p=<int>,group'" % path)
        try:
            p = int(header[0][2:])
        except ValueError:
            raise InputError("%s line 1: bad dimension %r" % (path, header[0]))
        if p < 1:
            raise InputError("%s line 1: dimension must be positive" % path)
        q = sym_dim(p)
        groups = {1: [], 2: []}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != q + 1:
                raise InputError("%s line %d: expected %d fields, got %d"
                                 % (path, lineno, q + 1, len(row)))
            try:
                vals = [float(v) for v in row[:q]]
            except ValueError as e:
                raise InputError("%s line %d: %s" % (path, lineno, e))
            if not all(math.isfinite(v) for v in vals):
                raise InputError("%s line %d: non-finite value" % (path, lineno))
            g = row[q].strip()
            if g not in ("1", "2"):
                raise InputError("%s line %d: group must be 1 or 2, got %r"
                                 % (path, lineno, g))
            Y = np.zeros((p, p))
            iu = np.triu_indices(p)
            Y[iu] = vals
            Y.T[iu] = vals
            groups[int(g)].append(Y)
    if not groups[1]:
        raise InputError("%s: no group-1 observations" % path)
    if groups[2]:
        S = np.stack(groups[1] + groups[2])
        return S, len(groups[1])
    return np.stack(groups[1]), None


def write_dataset(path, S, n1=None):
    """Write observations as CSV; group 2 starts at index n1 if given."""
    S = np.asarray(S, dtype=float)
    p = S.shape[1]
    iu = np.triu_indices(p)
    try:
        fh = open(path, "w", newline="")
    except OSError as e:
        raise InputError("cannot write %s: %s" % (path, e))
    with fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["p=%d" % p, "group"])
        for i, Y in enumerate(S):
            group = 1 if n1 is None or i < n1 else 2
            writer.writerow(["%.17g" % v for v in Y[iu]] + [str(group)])


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise InputError("cannot read %s: %s" % (path, e))
    except json.JSONDecodeError as e:
        raise InputError("%s: invalid JSON at line %d column %d: %s"
                         % (path, e.lineno, e.colno, e.msg))


def _log_transform(S):
    out = np.empty_like(S)
    for i, Y in enumerate(S):
        try:
            out[i] = matrix_log(Y)
        except ValueError:
            raise InputError(
                "observation %d is not positive definite; --log-transform "
                "requires positive definite matrices" % (i + 1))
    return out


# ---------------------------------------------------------------------------
# subcommands

def cmd_simulate(config_path, out_path, seed=None):
    config = load_json(config_path)
    try:
        sigma2 = float(config["sigma2"])
        tau = float(config["tau"])
    except KeyError as e:
        raise InputError("simulate config requires %s" % e)
    cov = CovParams(sigma2, tau)
    if seed is None:
        seed = int(config.get("seed", 0))
    two_sample = "M1" in config or "n1" in config
    if two_sample:
        try:
            M1 = np.asarray(config["M1"], dtype=float)
            M2 = np.asarray(config["M2"], dtype=float)
            n1, n2 = int(config["n1"]), int(config["n2"])
        except KeyError as e:
            raise InputError("two-sample simulate config requires %s" % e)
        _check_p(config, M1.shape[0])
        ss1, ss2 = np.random.SeedSequence(seed).spawn(2)
        S = np.concatenate([sample(n1, M1, cov, ss1), sample(n2, M2, cov, ss2)])
        write_dataset(out_path, S, n1)
    else:
        try:
            M = np.asarray(config["M"], dtype=float)
            n = int(config["n"])
        except KeyError as e:
            raise InputError("simulate config requires %s" % e)
        _check_p(config, M.shape[0])
        S = sample(n, M, cov, np.random.SeedSequence(seed))
        write_dataset(out_path, S)
    return 0


def _check_p(config, p_actual):
    if "p" in config and int(config["p"]) != p_actual:
        raise InputError("config p=%d does not match the mean's dimension %d"
                         % (int(config["p"]), p_actual))


def cmd_test(data_path, config_path, log_transform=False, with_timestamp=True,
             out=None):
    out = sys.stdout if out is None else out
    config = load_json(config_path)
    if "test_id" not in config:
        raise InputError("%s: config requires test_id" % config_path)
    S, n1 = read_dataset(data_path)
    if log_transform:
        S = _log_transform(S)
    test_id = config["test_id"]
    if not test_id.startswith("2") and n1 is not None:
        raise InputError("test %r is one-sample but %s has two groups"
                         % (test_id, data_path))
    try:
        res = lrt.run_config(config, S, n1=n1)
    except (KeyError, ValueError) as e:
        raise InputError(str(e))
    report = _report_from_result(res, S.shape[0], n1, config.get("seed"),
                                 with_timestamp)
    out.write(dumps(report) + "\n")
    return 0


def cmd_cov_check(data_path, log_transform=False, with_timestamp=True,
                  out=None):
    out = sys.stdout if out is None else out
    S, n1 = read_dataset(data_path)
    if n1 is not None:
        raise InputError("cov-check is one-sample but %s has two groups"
                         % data_path)
    if log_transform:
        S = _log_transform(S)
    try:
        res = lrt.test_sigma_structure(S)
    except ValueError as e:
        raise InputError(str(e))
    report = _report_from_result(res, S.shape[0], None, None, with_timestamp)
    out.write(dumps(report) + "\n")
    return 0


def cmd_calibrate(config_path, seed=None, reps=None, out_path=None,
                  with_timestamp=True, out=None):
    out = sys.stdout if out is None else out
    config = load_json(config_path)
    for key in ("test", "truth", "n"):
        if key not in config:
            raise InputError("calibrate config requires %r" % key)
    if reps is None:
        reps = int(config.get("reps", 5000))
    if seed is None:
        seed = int(config.get("seed", 0))
    n = config["n"]
    n = (int(n[0]), int(n[1])) if isinstance(n, list) else int(n)
    try:
        rep = calibrate.calibrate_null(config["test"], config["truth"], n,
                                       reps, seed)
    except (KeyError, ValueError) as e:
        raise InputError(str(e))
    payload = {
        "tool": "symtest",
        "version": __version__,
        "test_id": rep.test_id,
        "reps": rep.reps,
        "n": rep.n,
    }
    if rep.n1 is not None:
        payload["n1"] = rep.n1
        payload["n2"] = rep.n2
    payload["distribution"] = _dist_payload(rep.dist)
    payload["quantile_probs"] = list(rep.quantile_probs)
    payload["empirical_quantiles"] = list(rep.empirical_quantiles)
    payload["theoretical_quantiles"] = list(rep.theoretical_quantiles)
    payload["ks_distance"] = rep.ks_distance
    payload["alpha"] = rep.alpha
    payload["rejection_rate"] = rep.rejection_rate
    payload["seed"] = int(seed)
    if with_timestamp:
        payload["timestamp"] = _timestamp()
    out.write(dumps(payload) + "\n")
    if out_path is not None:
        _write_qq(out_path, rep)
    return 0


def _write_qq(path, rep):
    # 99 interior percentile points, plot-ready
    try:
        fh = open(path, "w", newline="")
    except OSError as e:
        raise InputError("cannot write %s: %s" % (path, e))
    with fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["q_theoretical", "q_empirical"])
        for i in range(1, 100):
            pr = i / 100.0
            writer.writerow(["%.17g" % lrt.quantile(rep.dist, pr),
                             "%.17g" % float(np.quantile(rep.statistics, pr))])


def cmd_cone_weights(config_path, seed=None, reps=None, with_timestamp=True,
                     out=None):
    out = sys.stdout if out is None else out
    config = load_json(config_path)
    if "d_true" not in config:
        raise InputError("cone-weights config requires 'd_true'")
    if reps is None:
        reps = int(config.get("reps", 100000))
    if seed is None:
        seed = int(config.get("seed", 0))
    try:
        w = calibrate.estimate_cone_weights(config["d_true"], reps, seed)
    except ValueError as e:
        raise InputError(str(e))
    payload = {
        "tool": "symtest",
        "version": __version__,
        "d_true": list(w.d_true),
        "face_dims": list(w.face_dims),
        "weights": list(w.weights),
        "reps": w.reps,
        "seed": int(seed),
    }
    if with_timestamp:
        payload["timestamp"] = _timestamp()
    out.write(dumps(payload) + "\n")
    return 0


# ---------------------------------------------------------------------------
# argument parsing

def _build_parser():
    parser = argparse.ArgumentParser(
        prog="symtest",
        description="Estimation and likelihood-ratio tests for the "
                    "eigenstructure of Gaussian symmetric matrices.")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="write a simulated dataset CSV")
    sim.add_argument("--config", required=True, help="generator config JSON")
    sim.add_argument("--out", required=True, help="output CSV path")
    sim.add_argument("--seed", type=int, default=None,
                     help="override the config seed")

    tst = sub.add_parser("test", help="run a configured hypothesis test")
    tst.add_argument("--data", required=True, help="dataset CSV path")
    tst.add_argument("--config", required=True, help="hypothesis config JSON")
    tst.add_argument("--log-transform", action="store_true",
                     help="apply a matrix logarithm to each observation")
    tst.add_argument("--no-timestamp", action="store_true",
                     help="omit the timestamp field from the report")

    cal = sub.add_parser("calibrate", help="Monte Carlo null calibration")
    cal.add_argument("--config", required=True,
                     help="config JSON with test, truth, n, reps, seed")
    cal.add_argument("--seed", type=int, default=None)
    cal.add_argument("--reps", type=int, default=None)
    cal.add_argument("--out", default=None,
                     help="write a QQ plot CSV (theoretical vs empirical)")
    cal.add_argument("--no-timestamp", action="store_true")

    cw = sub.add_parser("cone-weights",
                        help="estimate order-cone mixture weights")
    cw.add_argument("--config", required=True,
                    help="config JSON with d_true, reps, seed")
    cw.add_argument("--seed", type=int, default=None)
    cw.add_argument("--reps", type=int, default=None)
    cw.add_argument("--no-timestamp", action="store_true")

    cc = sub.add_parser("cov-check",
                        help="test the orthogonally invariant covariance")
    cc.add_argument("--data", required=True, help="dataset CSV path")
    cc.add_argument("--log-transform", action="store_true")
    cc.add_argument("--no-timestamp", action="store_true")

    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return cmd_simulate(args.config, args.out, seed=args.seed)
        if args.command == "test":
            return cmd_test(args.data, args.config,
                            log_transform=args.log_transform,
                            with_timestamp=not args.no_timestamp)
        if args.command == "calibrate":
            return cmd_calibrate(args.config, seed=args.seed, reps=args.reps,
                                 out_path=args.out,
                                 with_timestamp=not args.no_timestamp)
        if args.command == "cone-weights":
            return cmd_cone_weights(args.config, seed=args.seed,
                                    reps=args.reps,
                                    with_timestamp=not args.no_timestamp)
        if args.command == "cov-check":
            return cmd_cov_check(args.data, log_transform=args.log_transform,
                                 with_timestamp=not args.no_timestamp)
        raise AssertionError("unreachable")
    except InputError as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    except (lrt.StatisticError, ConvergenceError) as e:
        print("internal error: %s" % e, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
