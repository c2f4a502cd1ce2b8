//! Subcommand argument types and implementations.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use singular_gmres::analysis::{classify, residual_metrics};
use singular_gmres::densela::{svd, DenseVector, PinvPolicy};
use singular_gmres::krylov::{
    gmres, ConvergenceHistory, HessSolveStrategy, SolveConfig, StopMetric, Termination,
};
use singular_gmres::precond::{ab_gmres, ba_gmres, build_jacobi_spd, PrecondKind};
use singular_gmres::problems::{gen_gp_matrix, gen_index2_matrix, gen_rhs, GpParams, RhsMode};

use crate::bench::{self, SuiteArg};
use crate::manifest::RunManifest;
use crate::{history, mm, CliError};

/// GMRES-type solvers for square singular and inconsistent linear systems.
#[derive(Parser)]
#[command(name = "sgmres", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Generate a test matrix and write it in Matrix Market coordinate
    /// format.
    Gen(GenArgs),
    /// Generate a right-hand side for a matrix and write it in Matrix
    /// Market array format.
    Rhs(RhsArgs),
    /// Run a solver and write the convergence history as CSV.
    Solve(SolveArgs),
    /// Report index, range symmetry, rank, and extreme singular values.
    Classify(ClassifyArgs),
    /// Dump the singular values of a matrix as CSV.
    Spectrum(SpectrumArgs),
    /// Run a named experiment suite, one CSV per solver curve.
    Bench(BenchArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    /// 128×128 index-1 matrix `[[A₁₁, A₁₂], [0, 0]]` of rank 64.
    Gp,
    /// Same upper blocks plus a nilpotent pattern in the (2,2) block.
    Index2,
}

#[derive(Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Eigenvalue-decay exponent (α₁₆ = 10⁻ρ). Default 12.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Singular-value-decay exponent (β₃₂ = 10⁻ᵞ). Default: 12 for gp,
    /// 15 for index2.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// `b = Ae/‖Ae‖₂` (lies in the range of `A`).
    Consistent,
    /// Consistent vector plus scaled uniform noise (generally outside the
    /// range).
    Inconsistent,
}

#[derive(Args)]
pub struct RhsArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long, value_enum, default_value = "consistent")]
    pub mode: ModeArg,
    /// Norm of the noise term added in inconsistent mode.
    #[arg(long, default_value_t = 0.01)]
    pub noise: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Unpreconditioned GMRES on `Ax = b`.
    Gmres,
    /// GMRES on `min ‖b − ABz‖₂` with `x = Bz` (right preconditioning).
    AbGmres,
    /// GMRES on `AᵀAx = Aᵀb` (left preconditioning with `B = Aᵀ`).
    BaGmres,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum BKindArg {
    /// `B = Aᵀ`.
    At,
    /// `B = CAᵀ` with `C = {diag(AᵀA)}⁻¹`.
    Cat,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum HsolveArg {
    /// Incremental Givens QR on the Hessenberg least-squares problem.
    Givens,
    /// Truncated pseudoinverse with threshold `α·σ₁(H̄)`.
    Pinv,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    /// `‖b − Ax_k‖₂ / ‖b‖₂`.
    RelRes,
    /// `‖Aᵀ(b − Ax_k)‖₂ / ‖Aᵀb‖₂`.
    AtRelRes,
}

impl MetricArg {
    fn to_metric(self) -> StopMetric {
        match self {
            MetricArg::RelRes => StopMetric::RelRes,
            MetricArg::AtRelRes => StopMetric::AtRelRes,
        }
    }
}

#[derive(Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub rhs: PathBuf,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    /// Preconditioner; only valid with `--method ab-gmres` (default: at).
    #[arg(long, value_enum)]
    pub b_kind: Option<BKindArg>,
    /// Reorthogonalize the Arnoldi basis (one extra Gram–Schmidt pass).
    #[arg(long)]
    pub reorth: bool,
    #[arg(long, value_enum, default_value = "givens")]
    pub hsolve: HsolveArg,
    /// Pseudoinverse truncation factor α; only valid with `--hsolve pinv`
    /// (default: 1e-8).
    #[arg(long)]
    pub pinv_alpha: Option<f64>,
    /// Maximum iterations (default: the matrix dimension).
    #[arg(long)]
    pub maxit: Option<usize>,
    #[arg(long, value_enum, default_value = "rel-res")]
    pub stop_metric: MetricArg,
    #[arg(long, default_value_t = 1e-10)]
    pub stop_tol: f64,
    #[arg(long)]
    pub history_out: PathBuf,
}

#[derive(Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub matrix: PathBuf,
}

#[derive(Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub suite: SuiteArg,
    #[arg(long)]
    pub outdir: PathBuf,
    /// Seed for the inconsistent right-hand sides used by the suites.
    #[arg(long, default_value_t = 9)]
    pub seed: u64,
}

/// Dispatches a parsed command line.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.cmd {
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Rhs(a) => cmd_rhs(a),
        Cmd::Solve(a) => cmd_solve(a),
        Cmd::Classify(a) => cmd_classify(a),
        Cmd::Spectrum(a) => cmd_spectrum(a),
        Cmd::Bench(a) => bench::cmd_bench(a),
    }
}

pub fn resolve_params(family: FamilyArg, rho: Option<f64>, gamma: Option<f64>) -> GpParams {
    let defaults = match family {
        FamilyArg::Gp => GpParams::gp_default(),
        FamilyArg::Index2 => GpParams::index2_default(),
    };
    GpParams {
        rho: rho.unwrap_or(defaults.rho),
        gamma: gamma.unwrap_or(defaults.gamma),
    }
}

fn cmd_gen(a: &GenArgs) -> Result<(), CliError> {
    let params = resolve_params(a.family, a.rho, a.gamma);
    let m = match a.family {
        FamilyArg::Gp => gen_gp_matrix(&params)?,
        FamilyArg::Index2 => gen_index2_matrix(&params)?,
    };
    mm::write_matrix(&a.out, &m)?;
    let family = match a.family {
        FamilyArg::Gp => "gp",
        FamilyArg::Index2 => "index2",
    };
    RunManifest::new(
        json!({
            "command": "gen",
            "family": family,
            "rho": params.rho,
            "gamma": params.gamma,
            "rows": m.rows(),
            "cols": m.cols(),
        }),
        None,
        &[&a.out],
    )
    .write_alongside(&a.out)?;
    println!("wrote {} ({}x{})", a.out.display(), m.rows(), m.cols());
    Ok(())
}

fn cmd_rhs(a: &RhsArgs) -> Result<(), CliError> {
    let m = mm::read_matrix(&a.matrix)?;
    let (mode, mode_name, seed) = match a.mode {
        ModeArg::Consistent => (RhsMode::Consistent, "consistent", None),
        ModeArg::Inconsistent => (
            RhsMode::Inconsistent {
                noise_scale: a.noise,
                seed: a.seed,
            },
            "inconsistent",
            Some(a.seed),
        ),
    };
    let b = gen_rhs(&m, mode)?;
    mm::write_vector(&a.out, &b)?;
    RunManifest::new(
        json!({
            "command": "rhs",
            "matrix": a.matrix.to_string_lossy(),
            "mode": mode_name,
            "noise": a.noise,
            "n": b.len(),
        }),
        seed,
        &[&a.out],
    )
    .write_alongside(&a.out)?;
    println!("wrote {} (n = {})", a.out.display(), b.len());
    Ok(())
}

/// Everything needed to run one solver configuration.
pub struct SolveSpec {
    pub method: MethodArg,
    pub b_kind: BKindArg,
    pub reorth: bool,
    pub hsolve: HsolveArg,
    pub pinv_alpha: f64,
    pub maxit: usize,
    pub stop_metric: StopMetric,
    pub stop_tol: f64,
}

impl SolveSpec {
    pub fn config(&self) -> SolveConfig {
        let mut cfg = SolveConfig::new(self.maxit);
        cfg.strategy = match self.hsolve {
            HsolveArg::Givens => HessSolveStrategy::GivensQR,
            HsolveArg::Pinv => {
                HessSolveStrategy::PinvTruncated(PinvPolicy::RelativeToSigma1(self.pinv_alpha))
            }
        };
        cfg.reorthogonalize = self.reorth;
        cfg.stop_metric = self.stop_metric;
        cfg.stop_tol = self.stop_tol;
        cfg.record_hessenberg_spectrum = true;
        cfg
    }

    pub fn run(
        &self,
        a: &singular_gmres::densela::DenseMatrix,
        b: &DenseVector,
    ) -> Result<ConvergenceHistory, CliError> {
        let cfg = self.config();
        let h = match self.method {
            MethodArg::Gmres => gmres(a, b, &DenseVector::zeros(a.rows()), &cfg)?,
            MethodArg::AbGmres => {
                let precond = match self.b_kind {
                    BKindArg::At => PrecondKind::At,
                    BKindArg::Cat => PrecondKind::CAt(build_jacobi_spd(a)),
                };
                ab_gmres(a, &precond, b, &DenseVector::zeros(a.rows()), &cfg)?
            }
            MethodArg::BaGmres => ba_gmres(a, b, &DenseVector::zeros(a.cols()), &cfg)?,
        };
        Ok(h)
    }

    pub fn describe(&self) -> serde_json::Value {
        json!({
            "method": match self.method {
                MethodArg::Gmres => "gmres",
                MethodArg::AbGmres => "ab-gmres",
                MethodArg::BaGmres => "ba-gmres",
            },
            "b_kind": match (self.method, self.b_kind) {
                (MethodArg::AbGmres, BKindArg::At) => "at",
                (MethodArg::AbGmres, BKindArg::Cat) => "cat",
                _ => "n/a",
            },
            "reorth": self.reorth,
            "hsolve": match self.hsolve {
                HsolveArg::Givens => "givens",
                HsolveArg::Pinv => "pinv",
            },
            "pinv_alpha": match self.hsolve {
                HsolveArg::Pinv => json!(self.pinv_alpha),
                HsolveArg::Givens => json!(null),
            },
            "maxit": self.maxit,
            "stop_metric": match self.stop_metric {
                StopMetric::RelRes => "rel-res",
                StopMetric::AtRelRes => "at-rel-res",
            },
            "stop_tol": self.stop_tol,
        })
    }
}

pub fn termination_name(t: Termination) -> &'static str {
    match t {
        Termination::Converged => "converged",
        Termination::Breakdown => "breakdown",
        Termination::MaxIter => "max-iter",
    }
}

fn cmd_solve(a: &SolveArgs) -> Result<(), CliError> {
    if a.b_kind.is_some() && a.method != MethodArg::AbGmres {
        return Err(CliError::Usage(
            "--b-kind is only valid with --method ab-gmres".into(),
        ));
    }
    if a.pinv_alpha.is_some() && a.hsolve != HsolveArg::Pinv {
        return Err(CliError::Usage(
            "--pinv-alpha is only valid with --hsolve pinv".into(),
        ));
    }
    let m = mm::read_matrix(&a.matrix)?;
    let b = mm::read_vector(&a.rhs)?;
    if b.len() != m.rows() {
        return Err(CliError::Usage(format!(
            "rhs length {} does not match matrix rows {}",
            b.len(),
            m.rows()
        )));
    }
    let spec = SolveSpec {
        method: a.method,
        b_kind: a.b_kind.unwrap_or(BKindArg::At),
        reorth: a.reorth,
        hsolve: a.hsolve,
        pinv_alpha: a.pinv_alpha.unwrap_or(1e-8),
        maxit: a.maxit.unwrap_or(m.rows()),
        stop_metric: a.stop_metric.to_metric(),
        stop_tol: a.stop_tol,
    };
    let h = spec.run(&m, &b)?;
    history::write(&a.history_out, &h)?;
    let mut config = spec.describe();
    config["command"] = json!("solve");
    config["matrix"] = json!(a.matrix.to_string_lossy());
    config["rhs"] = json!(a.rhs.to_string_lossy());
    RunManifest::new(config, None, &[&a.history_out]).write_alongside(&a.history_out)?;
    let fin = residual_metrics(&m, &b, &h.final_x)?;
    println!(
        "termination={} iterations={} rel_res={:.16e} at_rel_res={:.16e}",
        termination_name(h.termination),
        h.records.len(),
        fin.rel_res,
        fin.at_rel_res
    );
    Ok(())
}

fn cmd_classify(a: &ClassifyArgs) -> Result<(), CliError> {
    let m = mm::read_matrix(&a.matrix)?;
    let c = classify(&m)?;
    println!("index={}", c.index);
    println!("is_ep={}", c.is_ep);
    println!("rank={}", c.rank);
    println!("sigma_max={:.16e}", c.sigma_max);
    println!("sigma_min_pos={:.16e}", c.sigma_min_pos);
    println!("kappa={:.16e}", c.kappa);
    Ok(())
}

pub fn render_spectrum(sigma: &DenseVector) -> String {
    let mut out = String::from("i,sigma\n");
    for (i, s) in sigma.as_slice().iter().enumerate() {
        out.push_str(&format!("{},{:.16e}\n", i + 1, s));
    }
    out
}

fn cmd_spectrum(a: &SpectrumArgs) -> Result<(), CliError> {
    let m = mm::read_matrix(&a.matrix)?;
    let f = svd(&m)?;
    mm::write_atomic(&a.out, &render_spectrum(&f.sigma))?;
    RunManifest::new(
        json!({
            "command": "spectrum",
            "matrix": a.matrix.to_string_lossy(),
            "count": f.sigma.len(),
        }),
        None,
        &[&a.out],
    )
    .write_alongside(&a.out)?;
    println!("wrote {} ({} values)", a.out.display(), f.sigma.len());
    Ok(())
}

/// Reads a history CSV from disk (used by tests and the bench summary).
pub fn read_history(path: &Path) -> Result<Vec<singular_gmres::krylov::IterateRecord>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    history::parse(path, &text)
}
