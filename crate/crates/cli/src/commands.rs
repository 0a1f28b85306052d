use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use num_complex::Complex64;
use radop_core::berezin::laplacian_identity_check;
use radop_core::*;
use serde::Serialize;
use serde_json::json;

use crate::input;
use crate::output::{num, Output, Table};
use crate::{Command, Global, UsageError};

#[derive(Serialize)]
struct Config<'a, A: Serialize, O: Serialize> {
    strict_window: bool,
    args: &'a A,
    options: O,
}

fn config<'a, A: Serialize, O: Serialize>(g: &Global, args: &'a A, options: O) -> Config<'a, A, O> {
    Config {
        strict_window: g.strict_window,
        args,
        options,
    }
}

fn sequence_table(seq: &[Complex64]) -> Table {
    let mut t = Table::new(vec!["n", "re", "im"]);
    for (n, v) in seq.iter().enumerate() {
        t.push(vec![n.to_string(), num(v.re), num(v.im)]);
    }
    t
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct QuadratureArgs {
    /// Absolute tolerance of the adaptive radial quadrature.
    #[arg(long, default_value_t = QuadratureConfig::default().abs_tol)]
    pub quad_tol: f64,
    /// Gauss–Legendre nodes per panel.
    #[arg(long, default_value_t = QuadratureConfig::default().nodes_per_panel)]
    pub quad_nodes: usize,
    #[arg(long, default_value_t = QuadratureConfig::default().max_panels)]
    pub quad_max_panels: usize,
}

impl QuadratureArgs {
    fn config(&self) -> QuadratureConfig {
        QuadratureConfig {
            nodes_per_panel: self.quad_nodes,
            abs_tol: self.quad_tol,
            max_panels: self.quad_max_panels,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EigArgs {
    /// Symbol JSON, e.g. {"variant": "power", "s": 2.0}.
    #[arg(long)]
    pub symbol: PathBuf,
    /// Window length.
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub quadrature: QuadratureArgs,
}

fn eig(g: &Global, a: &EigArgs) -> Result<Output> {
    let b = input::symbol(&a.symbol)?;
    let cfg = a.quadrature.config();
    let lambda = eigenvalues_of_symbol(&b, a.n, &cfg)?;
    let table = sequence_table(lambda.values());
    let result = json!({
        "symbol": b,
        "sup_norm": lambda.sup_norm().value,
        "lambda": lambda,
    });
    Ok(Output::new("eig", config(g, a, cfg), result)?
        .with_table(table)
        .csv_by_default())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SeminormsArgs {
    /// Sequence: JSON, CSV (`n,re,im`), or a report holding `result.lambda`.
    #[arg(long)]
    pub lambda: PathBuf,
    /// Also report the Hausdorff grid maximum up to `M,K`.
    #[arg(long, value_delimiter = ',')]
    pub hausdorff: Option<Vec<usize>>,
}

fn seminorms(g: &Global, a: &SeminormsArgs) -> Result<Output> {
    let lambda = input::lambda(&a.lambda)?;
    let h = match a.hausdorff.as_deref() {
        None => None,
        Some([m, k]) => Some((*m, *k)),
        Some(_) => return Err(UsageError("--hausdorff expects `M,K`".into()).into()),
    };
    let rep = seminorm_report(&lambda, h)?;
    let mut t = Table::new(vec!["len", "sup_norm", "d1", "d2", "hausdorff_max"]);
    t.push(vec![
        rep.len.to_string(),
        num(rep.sup_norm),
        num(rep.d1),
        num(rep.d2),
        rep.hausdorff_max.map(num).unwrap_or_default(),
    ]);
    Ok(Output::new("seminorms", config(g, a, ()), rep)?.with_table(t))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HausdorffArgs {
    #[arg(long)]
    pub lambda: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub m_max: usize,
    /// Largest `k`; defaults to the last index of the window.
    #[arg(long)]
    pub k_max: Option<usize>,
}

fn hausdorff(g: &Global, a: &HausdorffArgs) -> Result<Output> {
    let lambda = input::lambda(&a.lambda)?;
    let k_max = a.k_max.unwrap_or(lambda.len() - 1);
    let grid = hausdorff_grid(&lambda, a.m_max, k_max)?;
    let mut t = Table::new(vec!["m", "k", "value"]);
    for m in 0..=grid.m_max {
        for k in m..=grid.k_max {
            t.push(vec![
                m.to_string(),
                k.to_string(),
                num(grid.get(m, k).unwrap_or(f64::NAN)),
            ]);
        }
    }
    let options = json!({ "k_max": k_max });
    Ok(Output::new("hausdorff", config(g, a, options), grid)?.with_table(t))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ProjectArgs {
    /// Target accuracy ε; the construction guarantees sup deviation 5ε.
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub input: PathBuf,
}

fn project_d2(g: &Global, a: &ProjectArgs) -> Result<Output> {
    let x = input::lambda(&a.input)?;
    let r = project_to_d2(&x, a.eps)?;
    let audit = verify_approximation(&x, &r)?;
    let mut t = Table::new(vec!["n", "x_re", "x_im", "y_re", "y_im"]);
    for (n, (xv, yv)) in x.values().iter().zip(r.y.values()).enumerate() {
        t.push(vec![
            n.to_string(),
            num(xv.re),
            num(xv.im),
            num(yv.re),
            num(yv.im),
        ]);
    }
    let failed = !audit.all_pass;
    let options = ApproximationParams::for_epsilon(a.eps)?;
    let result = json!({ "approximation": r, "reaudit": audit });
    Ok(Output::new("project-d2", config(g, a, options), result)?
        .with_table(t)
        .fail_if(failed, "approximation audit"))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GammaArgs {
    #[arg(long)]
    pub lambda: PathBuf,
}

fn gamma(g: &Global, a: &GammaArgs) -> Result<Output> {
    let lambda = input::lambda(&a.lambda)?;
    let gamma = gamma_of_lambda(&lambda)?;
    let check = norm_equivalence_check(&lambda)?;
    let table = sequence_table(gamma.values());
    let failed = check.verdict == Verdict::Violated;
    let result = json!({
        "lambda0": lambda.values()[0],
        "gamma": gamma,
        "equivalence": check,
    });
    Ok(Output::new("gamma", config(g, a, ()), result)?
        .with_table(table)
        .fail_if(failed, "norm equivalence violated"))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GammaInverseArgs {
    /// γ sequence, or a `gamma` report.
    #[arg(long)]
    pub gamma: PathBuf,
    /// `re,im` (or a real number).
    #[arg(long, value_parser = input::parse_complex)]
    pub lambda0: Complex64,
}

fn gamma_inverse(g: &Global, a: &GammaInverseArgs) -> Result<Output> {
    let gamma = input::gamma(&a.gamma)?;
    let lambda = lambda_of_gamma(&gamma, a.lambda0)?;
    let table = sequence_table(lambda.values());
    Ok(Output::new(
        "gamma-inverse",
        config(g, a, ()),
        json!({ "lambda": lambda }),
    )?
    .with_table(table)
    .csv_by_default())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BerezinArgs {
    #[arg(long)]
    pub lambda: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    #[arg(long, value_delimiter = ',', default_value = "0,0.3,0.6,0.9")]
    pub radii: Vec<f64>,
    /// Bound on the truncated series tail.
    #[arg(long, default_value_t = ProfileOptions::default().tol)]
    pub series_tol: f64,
    /// Largest accepted residual of the Laplacian identity.
    #[arg(long, default_value_t = 1e-7)]
    pub identity_tol: f64,
}

#[derive(Serialize)]
struct BerezinRow {
    r: f64,
    value: Complex64,
    invariant_laplacian: Complex64,
}

fn berezin(g: &Global, a: &BerezinArgs) -> Result<Output> {
    let lambda = input::lambda(&a.lambda)?;
    let opts = ProfileOptions {
        tol: a.series_tol,
        strict_window: g.strict_window,
    };
    if let Some(r) = a.radii.iter().find(|r| !(0.0..1.0).contains(*r)) {
        return Err(UsageError(format!("radius {r} is outside [0, 1)")).into());
    }
    let profile = berezin_of_radial_operator(&lambda, a.k, &opts)?;
    let rows: Vec<BerezinRow> = a
        .radii
        .iter()
        .map(|&r| BerezinRow {
            r,
            value: profile.eval(r),
            invariant_laplacian: profile.invariant_laplacian(r),
        })
        .collect();
    let identity = laplacian_identity_check(&lambda, a.k, &a.radii, &opts)?;
    let mut t = Table::new(vec!["r", "re", "im", "laplacian_re", "laplacian_im"]);
    for row in &rows {
        t.push(vec![
            num(row.r),
            num(row.value.re),
            num(row.value.im),
            num(row.invariant_laplacian.re),
            num(row.invariant_laplacian.im),
        ]);
    }
    let failed = identity.max_residual > a.identity_tol;
    let result = json!({
        "k": a.k,
        "truncation_order": profile.truncation_order,
        "tail_bound": profile.tail_bound,
        "window_extended": profile.window_extended,
        "rows": rows,
        "identity": identity,
    });
    Ok(Output::new("berezin", config(g, a, opts), result)?
        .with_table(t)
        .fail_if(failed, "Laplacian identity residual above --identity-tol"))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IterateArgs {
    #[arg(long)]
    pub lambda: PathBuf,
    #[arg(long, default_value_t = 30)]
    pub kmax: usize,
    /// Rows of the deviation window (default: the whole input).
    #[arg(long)]
    pub n: Option<usize>,
    /// Row mass past the window above which a result counts as extended.
    #[arg(long, default_value_t = IterateOptions::default().tail_tol)]
    pub tail_tol: f64,
}

fn iterate(g: &Global, a: &IterateArgs) -> Result<Output> {
    let lambda = input::lambda(&a.lambda)?;
    let opts = IterateOptions {
        tail_tol: a.tail_tol,
        strict_window: g.strict_window,
    };
    let len = a.n.unwrap_or(lambda.len());
    let rep = convergence_report(&lambda, a.kmax, len, &opts)?;
    let mut t = Table::new(vec![
        "k",
        "deviation",
        "deviation_argmax",
        "sup_norm",
        "gamma_proxy",
        "max_tail_mass",
    ]);
    for row in &rep.rows {
        t.push(vec![
            row.k.to_string(),
            num(row.deviation),
            row.deviation_argmax.to_string(),
            num(row.sup_norm),
            num(row.gamma_proxy),
            num(row.max_tail_mass),
        ]);
    }
    let failed = !rep.contraction_holds;
    Ok(Output::new(
        "iterate",
        config(g, a, json!({ "n": len, "iterate": opts })),
        rep,
    )?
    .with_table(t)
    .fail_if(failed, "an iterate exceeds the input sup norm"))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LconArgs {
    #[arg(long)]
    pub symbol: PathBuf,
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[command(flatten)]
    pub quadrature: QuadratureArgs,
}

fn lcon_check(g: &Global, a: &LconArgs) -> Result<Output> {
    let b = input::symbol(&a.symbol)?;
    let cfg = a.quadrature.config();
    let rep = corollary_bounds_check(&b, a.n, &cfg)?;
    let mut t = Table::new(vec!["clause", "lhs", "rhs", "holds"]);
    for c in &rep.clauses {
        t.push(vec![
            c.name.clone(),
            num(c.lhs),
            num(c.rhs),
            c.holds.to_string(),
        ]);
    }
    let failed = !rep.all_pass;
    Ok(Output::new("lcon-check", config(g, a, cfg), rep)?
        .with_table(t)
        .fail_if(failed, "averaged-symbol bounds"))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumGenArgs {
    /// Polyline JSON: {"vertices": [[re, im], ...]}.
    #[arg(long)]
    pub path: PathBuf,
    #[arg(long)]
    pub n: usize,
    /// Step scale; the window d1 seminorm stays at most this.
    #[arg(long, default_value_t = 1.0)]
    pub speed: f64,
}

fn spectrum_gen(g: &Global, a: &SpectrumGenArgs) -> Result<Output> {
    let path = input::spectrum_path(&a.path)?;
    let lambda = sequence_from_path(&path, a.n, a.speed)?;
    let d1 = d1_seminorm(&lambda)?.value;
    let table = sequence_table(lambda.values());
    let result = json!({
        "path": path,
        "path_length": path.length(),
        "d1": d1,
        "lambda": lambda,
    });
    Ok(Output::new("spectrum-gen", config(g, a, ()), result)?
        .with_table(table)
        .csv_by_default())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumLimitsArgs {
    #[arg(long)]
    pub lambda: PathBuf,
    /// Fraction of the window, counted from the end, treated as the tail.
    #[arg(long, default_value_t = 0.5)]
    pub tail: f64,
    /// Clustering distance.
    #[arg(long, default_value_t = 0.05)]
    pub tol: f64,
    /// Gap allowed between limit points for the connectedness check
    /// (default: twice `--tol`).
    #[arg(long)]
    pub gap_tol: Option<f64>,
}

fn spectrum_limits(g: &Global, a: &SpectrumLimitsArgs) -> Result<Output> {
    let lambda = input::lambda(&a.lambda)?;
    let lp = limit_points(&lambda, a.tail, a.tol)?;
    let gap_tol = a.gap_tol.unwrap_or(2.0 * a.tol);
    let connected = connectedness_check(&lp.points(), gap_tol)?;
    let mut t = Table::new(vec!["cluster", "re", "im"]);
    for (i, c) in lp.clusters.iter().enumerate() {
        for p in &c.points {
            t.push(vec![i.to_string(), num(p.re), num(p.im)]);
        }
    }
    let result = json!({
        "connected": connected,
        "limit_points": lp,
    });
    Ok(Output::new(
        "spectrum-limits",
        config(g, a, json!({ "gap_tol": gap_tol })),
        result,
    )?
    .with_table(t))
}

pub fn dispatch(g: &Global, command: &Command) -> Result<Output> {
    let out = match command {
        Command::Eig(a) => eig(g, a),
        Command::Seminorms(a) => seminorms(g, a),
        Command::Hausdorff(a) => hausdorff(g, a),
        Command::ProjectD2(a) => project_d2(g, a),
        Command::Gamma(a) => gamma(g, a),
        Command::GammaInverse(a) => gamma_inverse(g, a),
        Command::Berezin(a) => berezin(g, a),
        Command::Iterate(a) => iterate(g, a),
        Command::LconCheck(a) => lcon_check(g, a),
        Command::SpectrumGen(a) => spectrum_gen(g, a),
        Command::SpectrumLimits(a) => spectrum_limits(g, a),
    };
    out.with_context(|| format!("{} failed", command_name(command)))
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Eig(_) => "eig",
        Command::Seminorms(_) => "seminorms",
        Command::Hausdorff(_) => "hausdorff",
        Command::ProjectD2(_) => "project-d2",
        Command::Gamma(_) => "gamma",
        Command::GammaInverse(_) => "gamma-inverse",
        Command::Berezin(_) => "berezin",
        Command::Iterate(_) => "iterate",
        Command::LconCheck(_) => "lcon-check",
        Command::SpectrumGen(_) => "spectrum-gen",
        Command::SpectrumLimits(_) => "spectrum-limits",
    }
}
