use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use nehari_core::certificates::{self, Certificate, CertifyOptions, TolProfile};
use nehari_core::hankel::{build_matrix, omega_weights, operator_norm, schur_bound, HankelSymbol};
use nehari_core::poly_torus::{
    lp_norm_monte_carlo, lp_norm_quadrature, lp_norm_separable, polynomial_from_json, separable_factors, LpEstimate,
    Polynomial,
};
use nehari_core::report::{format_f64, to_json};
use nehari_core::weak_factorization::{default_grid, wf_norm_dual, wf_norm_primal};
use nehari_core::Error;
use serde_json::json;

use crate::{
    human, CertifyArgs, ConstructArgs, Format, Method, NormArgs, NormKind, Profile, RunArgs, SweepArgs, EXIT_BUDGET,
    EXIT_FAILED, EXIT_INVALID, EXIT_OK,
};

/// Maps library errors onto the exit-code table; anything else (I/O,
/// unreadable input) counts as invalid input.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    match e.chain().find_map(|cause| cause.downcast_ref::<Error>()) {
        Some(lib) => library_exit_code(lib),
        None => EXIT_INVALID,
    }
}

fn library_exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::NotConverged { .. } | Error::SolverNotConverged { .. } | Error::ZeroNormSymbol => EXIT_FAILED,
        _ => EXIT_INVALID,
    }
}

fn options(run: &RunArgs) -> CertifyOptions {
    CertifyOptions {
        profile: match run.tol_profile {
            Profile::Default => TolProfile::default(),
            Profile::Strict => TolProfile::strict(),
        },
        max_d: run.max_d,
        seed: run.seed,
        mc_samples: run.samples,
        quadrature_budget: run.budget,
        timings: run.timings,
        ..CertifyOptions::default()
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn certificate_exit_code(cert: &Certificate) -> u8 {
    match &cert.error {
        Some(e) if library_exit_code(e) == EXIT_BUDGET => EXIT_BUDGET,
        _ if cert.certified => EXIT_OK,
        _ => EXIT_FAILED,
    }
}

pub fn certify(args: CertifyArgs) -> Result<u8> {
    let cert = certificates::certify(args.d, &options(&args.run))?;
    let text = match args.run.format {
        Format::Json => to_json(&cert),
        Format::Csv => format!("{}\n{}", Certificate::csv_header(), cert.csv_row()),
        Format::Human => human::certificate(&cert),
    };
    emit(&with_newline(text), args.run.out.as_deref())?;
    if let Some(failure) = &cert.failure {
        eprintln!("certificate aborted: {failure}");
    }
    Ok(certificate_exit_code(&cert))
}

pub fn sweep(args: SweepArgs) -> Result<u8> {
    let report = certificates::sweep(args.d_min, args.d_max, &options(&args.run))?;
    let text = match args.run.format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut lines = vec![Certificate::csv_header().to_string()];
            lines.extend(report.rows.iter().map(Certificate::csv_row));
            lines.join("\n")
        }
        Format::Human => human::sweep(&report),
    };
    emit(&with_newline(text), args.run.out.as_deref())?;
    let worst = report.rows.iter().map(certificate_exit_code).max().unwrap_or(EXIT_OK);
    Ok(if worst == EXIT_OK && !report.certified { EXIT_FAILED } else { worst })
}

fn read_polynomial(path: &Path) -> Result<Polynomial> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    polynomial_from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn lp(f: &Polynomial, p: f64, method: Method, args: &NormArgs) -> Result<LpEstimate> {
    Ok(match method {
        Method::Separable => lp_norm_separable(&separable_factors(f)?, p, args.nodes)?,
        Method::Quad => lp_norm_quadrature(f, p, args.nodes, args.budget)?,
        Method::Mc => lp_norm_monte_carlo(f, p, args.samples, args.seed)?,
    })
}

fn lp_report(kind: &str, estimate: LpEstimate, args: &NormArgs) -> serde_json::Value {
    let mut value = json!({
        "kind": kind,
        "value": estimate.value,
        "method": estimate.method,
        "error_bound": estimate.error_bound,
    });
    match estimate.method {
        nehari_core::poly_torus::LpMethod::MonteCarlo => {
            value["samples"] = json!(args.samples);
            value["seed"] = json!(args.seed);
        }
        _ => value["nodes"] = json!(args.nodes),
    }
    value
}

pub fn norm(args: NormArgs) -> Result<u8> {
    let f = read_polynomial(&args.poly)?;
    let report = match args.kind {
        NormKind::L1 => lp_report("l1", lp(&f, 1.0, args.method.unwrap_or(Method::Separable), &args)?, &args),
        NormKind::L2 => match args.method {
            Some(method) => lp_report("l2", lp(&f, 2.0, method, &args)?, &args),
            None => json!({ "kind": "l2", "value": f.h2_norm(), "method": "coefficients", "error_bound": 0.0 }),
        },
        NormKind::Hankel => {
            let psi = HankelSymbol::new(f.clone());
            let grid = default_grid(&f)?;
            let m = build_matrix(&psi, grid.rows())?;
            let result = operator_norm(&m, 1e-12)?;
            json!({
                "kind": "hankel",
                "value": result.value,
                "method": result.method,
                "iterations": result.iterations,
                "index_set_size": grid.rows().len(),
            })
        }
        NormKind::Schur => {
            let psi = HankelSymbol::new(f.clone());
            let grid = default_grid(&f)?;
            let m = build_matrix(&psi, grid.rows())?;
            let value = schur_bound(&m, &omega_weights(grid.rows()))?;
            json!({
                "kind": "schur",
                "value": value,
                "method": "schur-test",
                "weights": "2^(-Omega(j)/2)",
                "index_set_size": grid.rows().len(),
            })
        }
        NormKind::Wf => {
            let psi = match &args.symbol {
                Some(path) => HankelSymbol::new(read_polynomial(path)?),
                None => HankelSymbol::new(f.clone()),
            };
            let grid = default_grid(&f)?;
            let (primal, factorization) = wf_norm_primal(&f, &grid, args.tol)?;
            let lower = wf_norm_dual(&f, &psi, &grid)?;
            json!({
                "kind": "wf",
                "upper": primal.upper,
                "lower": lower,
                "method": "admm",
                "grid_size": primal.grid_size,
                "iterations": primal.iterations,
                "pairs": factorization.pairs.len(),
            })
        }
    };
    let text = match args.format {
        Format::Json => to_json(&report),
        Format::Human => human::norm(&report),
        Format::Csv => norm_csv(&report),
    };
    emit(&with_newline(text), None)?;
    Ok(EXIT_OK)
}

fn norm_csv(report: &serde_json::Value) -> String {
    let object = report.as_object().expect("norm reports are objects");
    let header: Vec<&str> = object.keys().map(String::as_str).collect();
    let row: Vec<String> = object
        .values()
        .map(|v| match v {
            serde_json::Value::Number(n) if n.is_f64() => format_f64(n.as_f64().unwrap_or(f64::NAN)),
            serde_json::Value::String(s) => s.clone(),
            other => other.to_string().replace(',', ";"),
        })
        .collect();
    format!("{}\n{}", header.join(","), row.join(","))
}

pub fn construct(args: ConstructArgs) -> Result<u8> {
    let construction = certificates::build_construction_with_max(args.d, args.max_d)?;
    emit(&with_newline(to_json(&construction)), args.out.as_deref())?;
    Ok(EXIT_OK)
}
