use std::process::Command;

use armijo_cli::{
    emit, parse_cli, run_experiments, write_rows, CliError, ComparisonRow, ExperimentSpec, Format,
    Invocation, CSV_HEADER,
};
use armijo_core::{generate, LineSearchKind, ProblemKind};

fn specs(args: &[&str]) -> Vec<ExperimentSpec> {
    let argv = std::iter::once("armijo-bench").chain(args.iter().copied());
    match parse_cli(argv).unwrap() {
        Invocation::Experiments { specs, .. } => specs,
        Invocation::Check => panic!("expected experiments"),
    }
}

fn csv_string(rows: &[ComparisonRow]) -> String {
    let mut buf = Vec::new();
    write_rows(rows, Format::Csv, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_armijo-bench"))
}

#[test]
fn run_maps_flags_to_one_spec() {
    let s = specs(&[
        "run",
        "--problem",
        "rayleigh",
        "--n",
        "100",
        "--seed",
        "21",
        "--linesearch",
        "modified",
    ]);
    assert_eq!(s.len(), 1);
    let spec = &s[0];
    assert_eq!(spec.problem, ProblemKind::RayleighSphere);
    assert_eq!((spec.n, spec.p, spec.seed), (100, 1, 21));
    assert_eq!(spec.config.line_search, LineSearchKind::Modified);
    assert_eq!(spec.config.params.beta, 0.5);
    assert_eq!(spec.config.params.tau, 0.1);
    assert_eq!(spec.config.tol_grad, 1e-8);
    assert_eq!(spec.config.max_iter, 500);
    assert_eq!((spec.config.nu, spec.config.rho), (1e-3, 1e6));
}

#[test]
fn compare_fans_out_to_both_strategies() {
    let s = specs(&[
        "compare",
        "--problem",
        "rayleigh",
        "--n",
        "100",
        "--seed",
        "21",
    ]);
    assert_eq!(s.len(), 2);
    assert_eq!(s[0].config.line_search, LineSearchKind::Standard);
    assert_eq!(s[1].config.line_search, LineSearchKind::Modified);
    assert_eq!(s[0].id, s[1].id);
    assert_eq!(s[0].seed, s[1].seed);
    let a = generate(s[0].problem, s[0].n, s[0].p, s[0].seed).unwrap();
    let b = generate(s[1].problem, s[1].n, s[1].p, s[1].seed).unwrap();
    assert_eq!(a.x0, b.x0);
}

#[test]
fn lists_expand_in_problem_seed_order() {
    let s = specs(&[
        "compare",
        "--problem",
        "quadratic,brockett",
        "--n",
        "5",
        "--p",
        "2",
        "--seed",
        "3,4",
    ]);
    let ids: Vec<_> = s
        .iter()
        .map(|s| (s.id.as_str(), s.config.line_search))
        .collect();
    assert_eq!(ids.len(), 8);
    assert_eq!(
        ids[0],
        ("quadratic_euclidean-n5-p1-s3", LineSearchKind::Standard)
    );
    assert_eq!(
        ids[3],
        ("quadratic_euclidean-n5-p1-s4", LineSearchKind::Modified)
    );
    assert_eq!(
        ids[4],
        ("brockett_stiefel-n5-p2-s3", LineSearchKind::Standard)
    );
}

#[test]
fn malformed_flags_are_usage_errors() {
    for args in [
        vec!["run", "--beta", "1.5"],
        vec!["run", "--tau", "0"],
        vec!["run", "--tol", "-1"],
        vec!["run", "--bogus"],
        vec!["run", "--problem", "torus"],
        vec!["run", "--linesearch", "wolfe"],
        vec!["frobnicate"],
    ] {
        let argv = std::iter::once("armijo-bench").chain(args.iter().copied());
        let err = parse_cli(argv).unwrap_err();
        assert!(matches!(err, CliError::Usage(_)), "{args:?}");
        assert_eq!(err.exit_code(), 1);
    }
}

#[test]
fn invalid_dimensions_are_rejected() {
    let argv = [
        "armijo-bench",
        "run",
        "--problem",
        "brockett",
        "--n",
        "2",
        "--p",
        "5",
    ];
    assert!(matches!(parse_cli(argv), Err(CliError::Config(_))));
    let argv = ["armijo-bench", "run", "--nu", "10", "--rho", "1"];
    assert!(matches!(parse_cli(argv), Err(CliError::Config(_))));
}

#[test]
fn euclidean_compare_rows_agree() {
    let rows = run_experiments(&specs(&[
        "compare",
        "--problem",
        "quadratic",
        "--n",
        "30",
        "--seed",
        "8",
    ]));
    let (a, b) = (&rows[0], &rows[1]);
    assert_eq!(a.iterations, b.iterations);
    assert_eq!(a.f_final, b.f_final);
    assert_eq!(a.grad_norm_final, b.grad_norm_final);
    assert_eq!(a.status, b.status);
    assert_eq!(b.ambient_f_evals, a.retracted_f_evals);
}

#[test]
fn rayleigh_compare_saves_retractions() {
    let rows = run_experiments(&specs(&[
        "compare",
        "--problem",
        "rayleigh",
        "--n",
        "99",
        "--seed",
        "21",
    ]));
    assert_eq!(rows[0].method, "newton_standard");
    assert_eq!(rows[1].method, "newton_modified");
    assert!(rows.iter().all(ComparisonRow::converged));
    assert!(rows[1].retraction_evals <= rows[0].retraction_evals);
}

#[test]
fn stationary_start_costs_no_retractions() {
    let rows = run_experiments(&specs(&["run", "--problem", "rayleigh", "--tol", "1e6"]));
    assert_eq!(rows[0].status, "converged");
    assert_eq!(rows[0].iterations, 0);
    assert_eq!(rows[0].retraction_evals, 0);
    assert_eq!(rows[0].gradient_evals, 1);
}

#[test]
fn solver_limits_become_rows() {
    let rows = run_experiments(&specs(&[
        "compare",
        "--n",
        "20",
        "--tau",
        "0.9",
        "--max-iter",
        "2",
        "--seed",
        "0,1",
    ]));
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.status == "max_iter"));
    assert_eq!(armijo_cli::batch_exit_code(&rows), 2);
}

#[test]
fn empty_batch_is_header_only() {
    let out = csv_string(&[]);
    assert_eq!(out, format!("{}\n", CSV_HEADER.join(",")));
    assert_eq!(
        CSV_HEADER.join(","),
        "spec_id,method,problem,n,p,seed,status,iterations,f_final,grad_norm_final,ambient_f_evals,\
         retraction_evals,retracted_f_evals,gradient_evals,hessian_builds,wall_time_s"
    );
}

#[test]
fn one_row_has_sixteen_fields_with_full_precision() {
    let rows = run_experiments(&specs(&["run", "--n", "12", "--seed", "5"]));
    let out = csv_string(&rows);
    let lines: Vec<_> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    let fields: Vec<_> = lines[1].split(',').collect();
    assert_eq!(fields.len(), 16);
    let f_final: f64 = fields[8].parse().unwrap();
    assert_eq!(Some(f_final), rows[0].f_final);
    let mantissa = fields[8].trim_start_matches('-').split('e').next().unwrap();
    assert_eq!(mantissa.replace('.', "").len(), 17);
}

#[test]
fn json_round_trip_is_exact() {
    let rows = run_experiments(&specs(&[
        "compare",
        "--problem",
        "rayleigh,brockett",
        "--n",
        "7",
        "--seed",
        "1,2",
    ]));
    let mut buf = Vec::new();
    write_rows(&rows, Format::Json, &mut buf).unwrap();
    let back: Vec<ComparisonRow> = serde_json::from_slice(&buf).unwrap();
    assert_eq!(back, rows);
}

#[test]
fn csv_output_is_reproducible_apart_from_timing() {
    let args = [
        "compare",
        "--problem",
        "brockett",
        "--n",
        "8",
        "--seed",
        "4",
    ];
    let strip = |s: String| -> Vec<String> {
        s.lines()
            .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_string())
            .collect()
    };
    let a = strip(csv_string(&run_experiments(&specs(&args))));
    let b = strip(csv_string(&run_experiments(&specs(&args))));
    assert_eq!(a, b);
}

#[test]
fn emit_writes_files_and_reports_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let rows = run_experiments(&specs(&["run", "--n", "5"]));
    let path = dir.path().join("rows.csv");
    emit(&rows, Format::Csv, Some(&path)).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), csv_string(&rows));

    let bad = dir.path().join("missing").join("rows.csv");
    let err = emit(&rows, Format::Csv, Some(&bad)).unwrap_err();
    assert!(matches!(err, CliError::Io { .. }));
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn binary_exit_codes() {
    let ok = bin()
        .args(["run", "--problem", "quadratic", "--n", "4"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).starts_with("spec_id,"));

    let limited = bin()
        .args(["run", "--n", "20", "--max-iter", "1", "--tau", "0.9"])
        .output()
        .unwrap();
    assert_eq!(limited.status.code(), Some(2));

    let usage = bin().args(["run", "--beta", "1.5"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&usage.stderr).contains("--beta"));

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rows.json");
    let written = bin()
        .args([
            "compare",
            "--problem",
            "quadratic",
            "--n",
            "4",
            "--format",
            "json",
            "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(written.status.code(), Some(0));
    assert!(written.stdout.is_empty());
    let rows: Vec<ComparisonRow> =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rows.len(), 2);

    let unwritable = bin()
        .args(["run", "--out", "/nonexistent-dir/rows.csv"])
        .output()
        .unwrap();
    assert_eq!(unwritable.status.code(), Some(1));
}
