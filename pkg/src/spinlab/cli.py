"""Command line front end.

One JSON config drives every subcommand:

    {"model": {...}, "params": {...}, "seed": 0}

The "model" block is the document accepted by
:func:`spinlab.spinops.model_from_json`; "params" is subcommand
specific and strictly validated; unknown keys anywhere are an input
error.  Results land in the output directory as CSV and JSON files next
to a run record (model hash, tolerances, solver residuals, wall time,
file manifest).  Nothing is written when the input is rejected.

Exit status: 0 on success, 1 when a mathematical check fails (an
ordering violated, an equivalence broken, a bound refused), 2 on input
errors.  All randomness is seeded from the config (default 0); repeated
runs with the same config produce byte-identical CSV files.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
import time

import numpy as np

from . import climit, fcs, gapbound, locality, spectra, spinops, ssep

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2

SUBCOMMANDS = (
    "spectrum",
    "foel",
    "lieb-mattis",
    "gap-cert",
    "fcs",
    "lr",
    "cluster",
    "ssep",
    "climit",
)


def _fmt(value) -> str:
    """Full round-trip decimal text for one CSV field."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _csv_text(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(field) for field in row))
    return "\n".join(lines) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _json_text(doc) -> str:
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"


def _reject_unknown(doc, allowed, where):
    if not isinstance(doc, dict):
        raise ValueError("%s must be a JSON object" % where)
    unknown = sorted(set(doc) - set(allowed))
    if unknown:
        raise ValueError("unknown key(s) %s in %s" % (", ".join(map(repr, unknown)), where))


def _require(params, key):
    if key not in params:
        raise ValueError("params is missing %r" % key)
    return params[key]


def _number(value, where):
    if isinstance(value, (bool, np.bool_)) or not isinstance(value, (int, float)):
        raise ValueError("%s must be a number" % where)
    return float(value)


def _integer(value, where):
    if isinstance(value, (bool, np.bool_)) or not isinstance(value, int):
        raise ValueError("%s must be an integer" % where)
    return int(value)


def _number_list(value, where):
    if not isinstance(value, list) or not value:
        raise ValueError("%s must be a non-empty list of numbers" % where)
    return [_number(v, where) for v in value]


def _model_hash(model_doc) -> str:
    canonical = json.dumps(model_doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _site_op(graph, site):
    """S^3 at a site, together with its operator norm."""
    spin = graph.spin(site)
    return spinops.spin_matrices(spin)[2], spin.s


# --------------------------------------------------------------------------
# subcommand handlers: each returns (exit_code, tolerances, residuals, files)
# where files is a list of (name, text) pairs, written only afterwards
# --------------------------------------------------------------------------


def _run_spectrum(graph, model, params, seed):
    _reject_unknown(params, ("sector", "max_levels"), "spectrum params")
    chosen = params.get("sector")
    if chosen is not None:
        chosen = _number(chosen, "params.sector")
    max_levels = params.get("max_levels")
    if max_levels is not None:
        max_levels = _integer(max_levels, "params.max_levels")
        if max_levels < 1:
            raise ValueError("params.max_levels must be positive")
    ham = spinops.build_hamiltonian(graph, model)
    sectors = spinops.magnetization_sectors(ham)
    if chosen is not None and not any(abs(m - chosen) < 1e-9 for m in sectors):
        raise ValueError("no magnetization sector %g" % chosen)
    rows = []
    worst = 0.0
    for m_val in sectors:
        if chosen is not None and abs(m_val - chosen) >= 1e-9:
            continue
        res = spectra.eigen_spectrum(ham, sector=m_val)
        worst = max(worst, res.residual_max)
        evals = res.eigenvalues[:max_levels] if max_levels else res.eigenvalues
        rows.extend((m_val, e) for e in evals)
    files = [("spectrum.csv", _csv_text(("M", "eigenvalue"), rows))]
    return EXIT_OK, {"residual_rel_tol": spectra.RESIDUAL_REL_TOL}, {
        "eigen_residual_max": worst,
    }, files


def _levels_rows(table, margins_by_low_spin):
    rows = []
    for s in table.spins_descending:
        rows.append((s, table.energies[s], margins_by_low_spin.get(s)))
    return rows


def _run_foel(graph, model, params, seed):
    _reject_unknown(params, ("method",), "foel params")
    method = params.get("method", "casimir")
    ham = spinops.build_hamiltonian(graph, model)
    table = spectra.spin_level_table(ham, graph, method=method)
    report = spectra.foel_check(table)
    # the margin E(S-1) - E(S) is listed on the row of the smaller spin
    margins = {s_low: m for _, s_low, m in report.margins}
    files = [
        ("levels.csv", _csv_text(("S", "E", "margin"), _levels_rows(table, margins))),
        ("foel.json", _json_text({
            "ordered": report.ordered,
            "margins": [list(entry) for entry in report.margins],
            "inconclusive": [list(entry) for entry in report.inconclusive],
            "method": table.method,
        })),
    ]
    code = EXIT_OK if report.ordered else EXIT_CHECK_FAILED
    return code, {"inconclusive_band": spectra.FOEL_INCONCLUSIVE}, {}, files


def _run_lieb_mattis(graph, model, params, seed):
    _reject_unknown(params, ("part_a", "part_b"), "lieb-mattis params")
    part_a = _require(params, "part_a")
    part_b = _require(params, "part_b")
    if model.kind != "xxx":
        raise ValueError("the level ordering check fixes its own edge signs; "
                         "use the isotropic model block")
    report = spectra.lieb_mattis_check(graph, part_a, part_b)
    margins = {s_low: m for s_low, _s_high, m in report.margins}
    files = [
        ("levels.csv", _csv_text(("S", "E", "margin"),
                                 _levels_rows(report.table, margins))),
        ("lieb_mattis.json", _json_text({
            "s_a": report.s_a,
            "s_b": report.s_b,
            "expected_ground_spin": report.expected_ground_spin,
            "ground_spin": report.ground_spin,
            "ground_ok": report.ground_ok,
            "ordering_ok": report.ordering_ok,
        })),
    ]
    ok = report.ground_ok and report.ordering_ok
    return (EXIT_OK if ok else EXIT_CHECK_FAILED), {}, {}, files


def _chain_spec_from_model(graph, model):
    spins = {sv.twice_s for _, sv in graph.sites}
    couplings = {j for _, _, j in graph.edges}
    if len(spins) != 1 or len(couplings) != 1:
        raise ValueError("gap certificates need a uniform chain "
                         "(one spin magnitude, one coupling)")
    twice_s = spins.pop()
    pair = spinops.SpinGraph.chain(2, twice_s=twice_s, coupling=couplings.pop())
    term = spinops.build_hamiltonian(pair, model).matrix.toarray()
    grading = tuple(np.diag(spinops.spin_matrices(pair.spin(0))[2]).real)
    try:
        return gapbound.ChainSpec(twice_s + 1, term, grading=grading)
    except ValueError:
        return gapbound.ChainSpec(twice_s + 1, term)


def _run_gap_cert(graph, model, params, seed):
    _reject_unknown(params, ("length", "lengths"), "gap-cert params")
    length = _integer(_require(params, "length"), "params.length")
    if length < 3:
        raise ValueError("params.length must be at least 3")
    lengths = params.get("lengths")
    if lengths is None:
        lengths = list(range(3, length + 1))
    else:
        lengths = [_integer(v, "params.lengths") for v in lengths]
        if any(v < 3 for v in lengths):
            raise ValueError("every curve length must be at least 3")
        if length not in lengths:
            lengths.append(length)
    spec = _chain_spec_from_model(graph, model)
    certificates = {ell: gapbound.certify_gap(spec, ell) for ell in sorted(lengths)}
    final = certificates[length]
    curve_rows = [
        (ell, cert.refined_bound, cert.exact_lambda1)
        for ell, cert in certificates.items()
    ]
    files = [
        ("certificate.json", _json_text({
            "L": final.length,
            "gamma2": final.gamma2,
            "epsilon": final.epsilon,
            "per_n": {str(n + 1): e for n, e in enumerate(final.e_values)},
            "bound73": final.basic_bound,
            "bound74": final.refined_bound,
            "exact_lambda1": final.exact_lambda1,
            "cutoffs": {"kernel": final.kernel_cutoff},
        })),
        ("gapcurve.csv", _csv_text(("L", "bound", "exact"), curve_rows)),
    ]
    code = EXIT_OK if final.assumption_holds else EXIT_CHECK_FAILED
    return code, {"kernel_cutoff_rel": gapbound.KERNEL_CUTOFF_REL}, {
        "kernel_cutoff": final.kernel_cutoff,
    }, files


def _run_fcs(graph, model, params, seed):
    _reject_unknown(params, ("r_max", "isometry_csv"), "fcs params")
    r_max = params.get("r_max", 8)
    r_max = _integer(r_max, "params.r_max")
    if r_max < 1:
        raise ValueError("params.r_max must be positive")
    if "isometry_csv" in params:
        isometry = fcs.import_isometry_csv(params["isometry_csv"])
        cp_map = fcs.make_pure_map(isometry)
        state = fcs.invariant_state(cp_map)
        triple = fcs.FcsTriple(cp_map, state.rho)
        defect = state.fixed_point_defect
    else:
        if model.kind != "aklt":
            raise ValueError("without an isometry file the fcs subcommand "
                             "needs the valence-bond model block")
        isometry = fcs.aklt_isometry()
        triple = fcs.aklt_triple()
        defect = fcs.invariant_state(triple.cp_map).fixed_point_defect
    phys_spin = spinops.SpinValue(isometry.n - 1)
    s3 = spinops.spin_matrices(phys_spin)[2]
    seps = list(range(1, r_max + 1))
    curve = fcs.two_point_function(triple, s3, s3, seps)
    length = fcs.correlation_length(triple.cp_map)
    rows = [(r, value.real) for r, value in zip(seps, curve)]
    edge = fcs.block_expectation(triple, spinops.aklt_edge_term(), width=2) \
        if model.kind == "aklt" and "isometry_csv" not in params else None
    record = {
        "transfer_spectrum": [[ev.real, ev.imag] for ev in length.eigenvalues],
        "subleading_modulus": length.subleading_modulus,
        "correlation_length": length.xi,
        "dominant_degenerate": length.dominant_degenerate,
    }
    if edge is not None:
        record["edge_term_expectation"] = abs(edge)
    files = [
        ("correlations.csv", _csv_text(("r", "value"), rows)),
        ("fcs.json", _json_text(record)),
    ]
    handle, tmp = tempfile.mkstemp(suffix=".csv")
    os.close(handle)
    try:
        fcs.export_isometry_csv(isometry, tmp)
        with open(tmp) as fh:
            files.append(("isometry.csv", fh.read()))
    finally:
        os.unlink(tmp)
    residuals = {"fixed_point_defect": defect}
    if edge is not None:
        residuals["edge_term_expectation"] = abs(edge)
    return EXIT_OK, {}, residuals, files


def _run_lr(graph, model, params, seed):
    _reject_unknown(params, ("lambdas", "times", "b_site", "n_directions"),
                    "lr params")
    lambdas = _number_list(_require(params, "lambdas"), "params.lambdas")
    if any(lam <= 0 for lam in lambdas):
        raise ValueError("decay rates must be positive")
    times = _number_list(_require(params, "times"), "params.times")
    b_site = params.get("b_site", graph.site_ids[-1])
    if b_site not in graph.site_ids:
        raise ValueError("unknown site %r" % (b_site,))
    n_directions = _integer(params.get("n_directions", 32), "params.n_directions")
    b_op, b_norm = _site_op(graph, b_site)
    phi = spinops.interaction_from_model(graph, model)
    phi_norms = {lam: spinops.interaction_norm(graph, phi, lam) for lam in lambdas}
    rows = []
    for site in graph.site_ids:
        profile = locality.dynamic_commutator_profile(
            graph, model, site, b_site, b_op, times,
            n_directions=n_directions, seed=seed)
        envelopes = [
            locality.lieb_robinson_envelope(graph, model, lam, site, (b_site,),
                                            b_norm, times)
            for lam in lambdas
        ]
        for j, t in enumerate(times):
            bound = min(env.values[j] for env in envelopes)
            rows.append((graph.index(site), t, profile.values[j], bound))
    violations = sum(1 for _x, _t, measured, bound in rows
                     if measured > bound + 1e-9)
    files = [
        ("profile.csv", _csv_text(("x", "t", "measured", "bound"), rows)),
        ("lr.json", _json_text({
            "lambdas": lambdas,
            "phi_norms": {repr(lam): phi_norms[lam] for lam in lambdas},
            "b_site": b_site,
            "b_norm": b_norm,
            "n_directions": n_directions,
            "violations": violations,
        })),
    ]
    code = EXIT_OK if violations == 0 else EXIT_CHECK_FAILED
    return code, {}, {"bound_violations": violations}, files


def _run_cluster(graph, model, params, seed):
    _reject_unknown(params, ("lambda", "base_site", "sector"), "cluster params")
    lam = _number(params.get("lambda", 0.5), "params.lambda")
    if lam <= 0:
        raise ValueError("params.lambda must be positive")
    base = params.get("base_site", graph.site_ids[0])
    if base not in graph.site_ids:
        raise ValueError("unknown site %r" % (base,))
    sector = params.get("sector")
    if sector is not None:
        sector = _number(sector, "params.sector")
    obs, _ = _site_op(graph, base)
    targets = [site for site in graph.site_ids if site != base]
    scan = locality.correlation_scan(graph, model, obs, base, targets,
                                    sector=sector)
    fit = locality.fit_decay(scan.distances, scan.connected)
    phi = spinops.interaction_from_model(graph, model)
    phi_norm = spinops.interaction_norm(graph, phi, lam)
    mu = locality.clustering_rate_floor(scan.sector_gap, phi_norm, lam)
    rows = [
        (d, c, np.exp(fit.intercept - fit.rate * d))
        for d, c in zip(scan.distances, scan.connected)
    ]
    files = [
        ("cluster.csv", _csv_text(("d", "truncated_correlation", "fit"), rows)),
        ("cluster.json", _json_text({
            "lambda": lam,
            "phi_norm": phi_norm,
            "gamma": scan.sector_gap,
            "mu": mu,
            "fitted_rate": fit.rate,
            "r_squared": fit.r_squared,
            "base_site": base,
            "sector": sector,
        })),
    ]
    code = EXIT_OK if fit.rate >= mu else EXIT_CHECK_FAILED
    return code, {}, {"fit_r_squared": fit.r_squared}, files


def _run_ssep(graph, model, params, seed):
    _reject_unknown(params, ("fillings",), "ssep params")
    if model.kind != "xxx":
        raise ValueError("the exclusion correspondence reads edge weights "
                         "as exchange rates of the isotropic model")
    n_sites = len(graph.sites)
    fillings = params.get("fillings")
    if fillings is None:
        fillings = list(range(1, n_sites))
    else:
        fillings = [_integer(v, "params.fillings") for v in fillings]
        if any(v < 0 or v > n_sites for v in fillings):
            raise ValueError("fillings must lie between 0 and the site count")
    reports = {n: ssep.heisenberg_equivalence_check(graph, n) for n in fillings}
    table = ssep.aldous_scan(graph)
    rows = [(n, table.gaps[n]) for n in sorted(table.gaps)]
    worst = max(rep.max_abs_difference for rep in reports.values())
    all_ok = all(rep.ok for rep in reports.values())
    files = [
        ("ssep.csv", _csv_text(("n", "lambda_n"), rows)),
        ("ssep.json", _json_text({
            "equivalence_ok": all_ok,
            "max_abs_difference": worst,
            "sectors": {str(n): rep.sector for n, rep in reports.items()},
            "shifts": {str(n): rep.shift for n, rep in reports.items()},
            "one_particle_gap": table.one_particle,
            "uniform_across_sectors": table.uniform_across_sectors,
            "particle_hole_symmetric": table.particle_hole_symmetric,
            "max_rel_deviation": table.max_rel_deviation,
        })),
    ]
    ok = all_ok and table.uniform_across_sectors
    return (EXIT_OK if ok else EXIT_CHECK_FAILED), {
        "equivalence_tol": ssep.EQUIVALENCE_TOL,
        "aldous_rel_tol": ssep.ALDOUS_REL_TOL,
    }, {"equivalence_max_abs_difference": worst,
        "aldous_max_rel_deviation": table.max_rel_deviation}, files


def _run_climit(graph, model, params, seed):
    _reject_unknown(params, ("betas", "twice_s_values", "fit_constant"),
                    "climit params")
    betas = _number_list(_require(params, "betas"), "params.betas")
    if any(b <= 0 for b in betas):
        raise ValueError("inverse temperatures must be positive")
    twice_values = params.get("twice_s_values")
    if twice_values is None:
        spins = {sv.twice_s for _, sv in graph.sites}
        if len(spins) != 1:
            raise ValueError("give twice_s_values explicitly for mixed graphs")
        twice_values = [spins.pop()]
    else:
        twice_values = [_integer(v, "params.twice_s_values") for v in twice_values]
        if any(v < 1 for v in twice_values):
            raise ValueError("twice_s_values must be positive integers")
    fit_constant = params.get("fit_constant", True)
    if not isinstance(fit_constant, bool):
        raise ValueError("params.fit_constant must be a boolean")

    def regraded(twice_s):
        sites = tuple((sid, spinops.SpinValue(twice_s)) for sid, _ in graph.sites)
        return spinops.SpinGraph(sites, graph.edges)

    reports = {t: climit.sandwich_check(regraded(t), model, betas)
               for t in twice_values}
    header = ["beta", "Z_C"]
    for t in twice_values:
        header.append("Z_Q_2s_%d" % t)
    if fit_constant:
        for t in twice_values:
            header.append("c_2s_%d" % t)
    rows = []
    for k, beta in enumerate(betas):
        row = [beta, reports[twice_values[0]].z_classical[k]]
        for t in twice_values:
            row.append(reports[t].z_quantum[k])
        if fit_constant:
            for t in twice_values:
                row.append(climit.effective_upper_constant(
                    regraded(t), model, beta, tol=1e-3))
        rows.append(row)
    quad = climit.classical_partition(regraded(twice_values[0]), model, betas[0])
    files = [
        ("climit.csv", _csv_text(header, rows)),
        ("climit.json", _json_text({
            "normalization": "spin operators divided by s; trace divided by "
                             "the Hilbert space dimension",
            "quadrature": {
                "rtol": climit.QUADRATURE_RTOL,
                "n_polar_first_point": quad.n_polar,
                "converged_first_point": quad.converged,
            },
            "upper_scale": "beta (1 + 1/s)^2",
            "lower_margins_min": min(min(r.lower_margins) for r in reports.values()),
            "upper_margins_min": min(min(r.upper_margins) for r in reports.values()),
        })),
    ]
    return EXIT_OK, {"quadrature_rtol": climit.QUADRATURE_RTOL,
                     "lower_rel_slack": climit.LOWER_REL_SLACK}, {}, files


HANDLERS = {
    "spectrum": _run_spectrum,
    "foel": _run_foel,
    "lieb-mattis": _run_lieb_mattis,
    "gap-cert": _run_gap_cert,
    "fcs": _run_fcs,
    "lr": _run_lr,
    "cluster": _run_cluster,
    "ssep": _run_ssep,
    "climit": _run_climit,
}


def _load_config(path):
    with open(path) as fh:
        doc = json.load(fh)
    _reject_unknown(doc, ("model", "params", "seed"), "config")
    if "model" not in doc:
        raise ValueError("config is missing the model block")
    graph, model = spinops.model_from_json(doc["model"])
    params = doc.get("params", {})
    if not isinstance(params, dict):
        raise ValueError("params must be a JSON object")
    seed = doc.get("seed", 0)
    seed = _integer(seed, "seed")
    return doc, graph, model, params, seed


def run(subcommand, config_path, out_dir, seed_override=None, threads=None):
    """Execute one subcommand; returns the exit status."""
    try:
        doc, graph, model, params, seed = _load_config(config_path)
        if seed_override is not None:
            seed = int(seed_override)
    except (OSError, json.JSONDecodeError, ValueError, KeyError, TypeError) as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT_ERROR
    handler = HANDLERS[subcommand]
    started = time.perf_counter()
    try:
        if threads is not None:
            import threadpoolctl
            with threadpoolctl.threadpool_limits(limits=threads):
                code, tolerances, residuals, files = handler(graph, model, params, seed)
        else:
            code, tolerances, residuals, files = handler(graph, model, params, seed)
    except (ValueError, KeyError, TypeError, OSError) as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT_ERROR
    except RuntimeError as exc:
        print("check failed: %s" % exc, file=sys.stderr)
        return EXIT_CHECK_FAILED
    elapsed = time.perf_counter() - started
    os.makedirs(out_dir, exist_ok=True)
    names = []
    for name, text in files:
        with open(os.path.join(out_dir, name), "w") as fh:
            fh.write(text)
        names.append(name)
    record = {
        "subcommand": subcommand,
        "model_hash": _model_hash(doc["model"]),
        "seed": seed,
        "tolerances": tolerances,
        "residuals": residuals,
        "wall_time_s": elapsed,
        "outputs": sorted(names) + ["run_record.json"],
    }
    with open(os.path.join(out_dir, "run_record.json"), "w") as fh:
        fh.write(_json_text(record))
    return code


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="spinlab",
        description="finite spin system laboratory",
    )
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", required=True, help="JSON config path")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    parser.add_argument("--threads", type=int, default=None,
                        help="limit BLAS thread pools")
    args = parser.parse_args(argv)
    return run(args.subcommand, args.config, args.out,
               seed_override=args.seed, threads=args.threads)


if __name__ == "__main__":
    sys.exit(main())
