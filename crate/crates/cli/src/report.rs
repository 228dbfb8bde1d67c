//! Report files: structured text with stable field ordering, plus CSV
//! sidecars. No timestamps, no map iteration order, no locale formatting;
//! two runs of the same config produce byte-identical bytes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use orlicz_core::conditions::{ArrowCheck, SuiteOutcome};
use orlicz_core::modular::DensityTable;
use orlicz_core::{ConditionReport, ViolationCertificate};

use crate::config::RunConfig;

pub fn open(path: &Path) -> std::io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub fn write_config_block(w: &mut impl Write, config: &RunConfig) -> std::io::Result<()> {
    writeln!(w, "[config]")?;
    for (k, v) in config.resolved_pairs() {
        writeln!(w, "{k} = {v}")?;
    }
    Ok(())
}

fn write_violation(w: &mut impl Write, v: &ViolationCertificate) -> std::io::Result<()> {
    writeln!(w, "worst_tuple = {v}")?;
    writeln!(w, "residual = {}", v.residual)
}

/// One condition report, fields in the fixed order: condition, verdict,
/// beta, h_form, sigma, worst_tuple, residual.
pub fn write_condition_report(
    w: &mut impl Write,
    config: &RunConfig,
    report: &ConditionReport,
) -> std::io::Result<()> {
    write_config_block(w, config)?;
    writeln!(w, "[result]")?;
    writeln!(w, "condition = {}", report.condition)?;
    writeln!(w, "verdict = {}", report.verdict)?;
    match (&report.witness, report.best_beta) {
        (Some(wit), _) => writeln!(w, "beta = {}", wit.beta)?,
        (None, Some(b)) => writeln!(w, "beta = {b}")?,
        (None, None) => writeln!(w, "beta = n/a")?,
    }
    match &report.witness {
        Some(wit) => {
            writeln!(w, "h_form = {}", wit.h.describe())?;
            writeln!(w, "sigma = {}", wit.sigma)?;
        }
        None => {
            writeln!(w, "h_form = n/a")?;
            writeln!(w, "sigma = n/a")?;
        }
    }
    match &report.violation {
        Some(v) => write_violation(w, v)?,
        None => {
            writeln!(w, "worst_tuple = none")?;
            writeln!(w, "residual = 0")?;
        }
    }
    if let Some(b) = report.best_beta {
        writeln!(w, "best_beta = {b}")?;
    }
    writeln!(w, "tuples_checked = {}", report.tuples_checked)?;
    Ok(())
}

pub fn write_certificate(
    w: &mut impl Write,
    config: &RunConfig,
    report: &ConditionReport,
) -> std::io::Result<()> {
    write_config_block(w, config)?;
    writeln!(w, "[certificate]")?;
    writeln!(w, "condition = {}", report.condition)?;
    match &report.violation {
        Some(v) => {
            writeln!(w, "x = {}", v.x)?;
            match &v.y {
                Some(y) => writeln!(w, "y = {y}")?,
                None => writeln!(w, "y = none")?,
            }
            writeln!(w, "argument = {}", v.argument)?;
            writeln!(w, "lhs = {}", v.lhs)?;
            writeln!(w, "rhs = {}", v.rhs)?;
            writeln!(w, "residual = {}", v.residual)?;
        }
        None => writeln!(w, "none")?,
    }
    Ok(())
}

fn write_arrow(w: &mut impl Write, a: &ArrowCheck) -> std::io::Result<()> {
    writeln!(
        w,
        "arrow {} -> {}: source={} target={} consistent={}",
        a.from,
        a.to,
        a.source_verdict,
        a.target_verdict,
        if a.consistent { "yes" } else { "NO" }
    )
}

pub fn write_suite_report(
    w: &mut impl Write,
    config: &RunConfig,
    out: &SuiteOutcome,
) -> std::io::Result<()> {
    write_config_block(w, config)?;
    writeln!(w, "[suite]")?;
    writeln!(w, "family = {}", out.family_name)?;
    writeln!(w, "sigma = {}", out.sigma)?;
    writeln!(w, "A0 = {} (beta = {})", out.a0.report.verdict, fmt_opt(out.a0.report.best_beta))?;
    writeln!(w, "A1 = {} (beta = {})", out.a1.report.verdict, fmt_opt(out.a1.report.best_beta))?;
    for (id, r) in &out.formulations {
        let beta = r.witness.as_ref().map(|wit| wit.beta);
        writeln!(w, "formulation {id} = {} (beta = {})", r.verdict, fmt_opt(beta))?;
    }
    writeln!(w, "[arrows]")?;
    for a in &out.arrows {
        write_arrow(w, a)?;
    }
    writeln!(w, "[summary]")?;
    writeln!(w, "consistent = {}", if out.consistent { "yes" } else { "NO" })?;
    writeln!(w, "tuples_checked = {}", out.tuples_checked)?;
    Ok(())
}

pub fn write_suite_csv(w: &mut impl Write, out: &SuiteOutcome) -> std::io::Result<()> {
    writeln!(w, "formulation,verdict,beta")?;
    writeln!(w, "A0,{},{}", out.a0.report.verdict, fmt_opt(out.a0.report.best_beta))?;
    writeln!(w, "A1,{},{}", out.a1.report.verdict, fmt_opt(out.a1.report.best_beta))?;
    for (id, r) in &out.formulations {
        let beta = r.witness.as_ref().map(|wit| wit.beta);
        writeln!(w, "{id},{},{}", r.verdict, fmt_opt(beta))?;
    }
    Ok(())
}

pub fn write_density_report(
    w: &mut impl Write,
    config: &RunConfig,
    table: &DensityTable,
    threshold: f64,
    pass: bool,
) -> std::io::Result<()> {
    write_config_block(w, config)?;
    writeln!(w, "[density]")?;
    writeln!(w, "f_norm = {}", table.f_norm)?;
    writeln!(w, "f_grad_norm = {}", table.f_grad_norm)?;
    writeln!(w, "threshold = {threshold}")?;
    for row in &table.rows {
        writeln!(w, "eps = {} norm = {} grad_norm = {}", row.epsilon, row.norm, row.grad_norm)?;
    }
    writeln!(w, "pass = {}", if pass { "yes" } else { "NO" })?;
    Ok(())
}

pub fn write_density_csv(w: &mut impl Write, table: &DensityTable) -> std::io::Result<()> {
    writeln!(w, "eps,norm,grad_norm")?;
    for row in &table.rows {
        writeln!(w, "{},{},{}", row.epsilon, row.norm, row.grad_norm)?;
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(v) => v.to_string(),
        None => "n/a".to_string(),
    }
}
