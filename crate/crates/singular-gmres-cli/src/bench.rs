//! Named experiment suites: each runs a fixed set of solver curves on a
//! generated problem and writes one history CSV per curve plus a summary
//! of per-curve minima.

use std::path::Path;

use clap::ValueEnum;
use serde_json::json;

use singular_gmres::densela::{DenseMatrix, DenseVector};
use singular_gmres::krylov::StopMetric;
use singular_gmres::problems::{gen_gp_matrix, gen_index2_matrix, gen_rhs, GpParams, RhsMode};

use crate::commands::{termination_name, BKindArg, BenchArgs, HsolveArg, MethodArg, SolveSpec};
use crate::manifest::RunManifest;
use crate::{history, mm, CliError};

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    /// GP matrix, noisy right-hand side: plain GMRES vs AB-GMRES with
    /// `Aᵀ`/`CAᵀ` across pseudoinverse thresholds (7 curves).
    GpInconsistent,
    /// GP matrix, consistent right-hand side (3 curves).
    GpConsistent,
    /// Index-2 matrix, noisy right-hand side (7 curves).
    Index2Inconsistent,
    /// Index-2 matrix, consistent right-hand side (3 curves).
    Index2Consistent,
    /// AB-GMRES vs BA-GMRES on the GP matrix, both right-hand sides
    /// (6 curves).
    BaComparison,
}

impl SuiteArg {
    fn name(self) -> &'static str {
        match self {
            SuiteArg::GpInconsistent => "gp-inconsistent",
            SuiteArg::GpConsistent => "gp-consistent",
            SuiteArg::Index2Inconsistent => "index2-inconsistent",
            SuiteArg::Index2Consistent => "index2-consistent",
            SuiteArg::BaComparison => "ba-comparison",
        }
    }
}

/// One curve: a solver configuration applied to a named right-hand side.
struct Curve {
    name: &'static str,
    consistent_rhs: bool,
    spec: SolveSpec,
}

fn spec(
    method: MethodArg,
    b_kind: BKindArg,
    hsolve: HsolveArg,
    pinv_alpha: f64,
    stop_metric: StopMetric,
) -> SolveSpec {
    SolveSpec {
        method,
        b_kind,
        reorth: true,
        hsolve,
        pinv_alpha,
        maxit: 128,
        stop_metric,
        // Run the full history; curves are for minima and shapes, not for
        // early exit.
        stop_tol: 0.0,
    }
}

/// The method/threshold grid of each suite. Inconsistent suites monitor
/// `‖Aᵀr‖`; consistent suites monitor `‖r‖`.
fn curves(suite: SuiteArg) -> Vec<Curve> {
    use BKindArg::{At, Cat};
    use HsolveArg::{Givens, Pinv};
    use MethodArg::{AbGmres, BaGmres, Gmres};
    match suite {
        SuiteArg::GpInconsistent => {
            let m = StopMetric::AtRelRes;
            vec![
                Curve {
                    name: "gmres-reorth",
                    consistent_rhs: false,
                    spec: spec(Gmres, At, Givens, 0.0, m),
                },
                Curve {
                    name: "ab-at-pinv1e-11",
                    consistent_rhs: false,
                    spec: spec(AbGmres, At, Pinv, 1e-11, m),
                },
                Curve {
                    name: "ab-at-pinv1e-8",
                    consistent_rhs: false,
                    spec: spec(AbGmres, At, Pinv, 1e-8, m),
                },
                Curve {
                    name: "ab-at-givens",
                    consistent_rhs: false,
                    spec: spec(AbGmres, At, Givens, 0.0, m),
                },
                Curve {
                    name: "ab-cat-pinv1e-11",
                    consistent_rhs: false,
                    spec: spec(AbGmres, Cat, Pinv, 1e-11, m),
                },
                Curve {
                    name: "ab-cat-pinv1e-8",
                    consistent_rhs: false,
                    spec: spec(AbGmres, Cat, Pinv, 1e-8, m),
                },
                Curve {
                    name: "ab-cat-givens",
                    consistent_rhs: false,
                    spec: spec(AbGmres, Cat, Givens, 0.0, m),
                },
            ]
        }
        SuiteArg::GpConsistent => {
            let m = StopMetric::RelRes;
            vec![
                Curve {
                    name: "gmres-reorth",
                    consistent_rhs: true,
                    spec: spec(Gmres, At, Givens, 0.0, m),
                },
                Curve {
                    name: "ab-at-reorth",
                    consistent_rhs: true,
                    spec: spec(AbGmres, At, Givens, 0.0, m),
                },
                Curve {
                    name: "ab-cat-reorth",
                    consistent_rhs: true,
                    spec: spec(AbGmres, Cat, Givens, 0.0, m),
                },
            ]
        }
        SuiteArg::Index2Inconsistent => {
            let m = StopMetric::AtRelRes;
            vec![
                Curve {
                    name: "gmres-reorth",
                    consistent_rhs: false,
                    spec: spec(Gmres, At, Givens, 0.0, m),
                },
                Curve {
                    name: "ab-at-pinv1e-10",
                    consistent_rhs: false,
                    spec: spec(AbGmres, At, Pinv, 1e-10, m),
                },
                Curve {
                    name: "ab-at-pinv1e-8",
                    consistent_rhs: false,
                    spec: spec(AbGmres, At, Pinv, 1e-8, m),
                },
                Curve {
                    name: "ab-at-givens",
                    consistent_rhs: false,
                    spec: spec(AbGmres, At, Givens, 0.0, m),
                },
                Curve {
                    name: "ab-cat-pinv1e-10",
                    consistent_rhs: false,
                    spec: spec(AbGmres, Cat, Pinv, 1e-10, m),
                },
                Curve {
                    name: "ab-cat-pinv1e-8",
                    consistent_rhs: false,
                    spec: spec(AbGmres, Cat, Pinv, 1e-8, m),
                },
                Curve {
                    name: "ab-cat-givens",
                    consistent_rhs: false,
                    spec: spec(AbGmres, Cat, Givens, 0.0, m),
                },
            ]
        }
        SuiteArg::Index2Consistent => {
            let m = StopMetric::RelRes;
            vec![
                Curve {
                    name: "gmres-reorth",
                    consistent_rhs: true,
                    spec: spec(Gmres, At, Givens, 0.0, m),
                },
                Curve {
                    name: "ab-at-pinv1e-10",
                    consistent_rhs: true,
                    spec: spec(AbGmres, At, Pinv, 1e-10, m),
                },
                Curve {
                    name: "ab-cat-pinv1e-10",
                    consistent_rhs: true,
                    spec: spec(AbGmres, Cat, Pinv, 1e-10, m),
                },
            ]
        }
        SuiteArg::BaComparison => {
            let mi = StopMetric::AtRelRes;
            let mc = StopMetric::RelRes;
            vec![
                Curve {
                    name: "ba-reorth-inconsistent",
                    consistent_rhs: false,
                    spec: spec(BaGmres, At, Givens, 0.0, mi),
                },
                Curve {
                    name: "ab-at-pinv1e-8-inconsistent",
                    consistent_rhs: false,
                    spec: spec(AbGmres, At, Pinv, 1e-8, mi),
                },
                Curve {
                    name: "ab-cat-pinv1e-8-inconsistent",
                    consistent_rhs: false,
                    spec: spec(AbGmres, Cat, Pinv, 1e-8, mi),
                },
                Curve {
                    name: "ba-reorth-consistent",
                    consistent_rhs: true,
                    spec: spec(BaGmres, At, Givens, 0.0, mc),
                },
                Curve {
                    name: "ab-at-reorth-consistent",
                    consistent_rhs: true,
                    spec: spec(AbGmres, At, Givens, 0.0, mc),
                },
                Curve {
                    name: "ab-cat-reorth-consistent",
                    consistent_rhs: true,
                    spec: spec(AbGmres, Cat, Givens, 0.0, mc),
                },
            ]
        }
    }
}

fn suite_problem(suite: SuiteArg) -> (GpParams, bool) {
    match suite {
        SuiteArg::GpInconsistent | SuiteArg::GpConsistent | SuiteArg::BaComparison => {
            (GpParams::gp_default(), true)
        }
        SuiteArg::Index2Inconsistent | SuiteArg::Index2Consistent => {
            (GpParams::index2_default(), false)
        }
    }
}

pub fn cmd_bench(a: &BenchArgs) -> Result<(), CliError> {
    std::fs::create_dir_all(&a.outdir).map_err(|e| CliError::io(&a.outdir, e))?;
    let (params, is_gp) = suite_problem(a.suite);
    let matrix: DenseMatrix = if is_gp {
        gen_gp_matrix(&params)?
    } else {
        gen_index2_matrix(&params)?
    };
    let b_consistent = gen_rhs(&matrix, RhsMode::Consistent)?;
    let b_inconsistent = gen_rhs(
        &matrix,
        RhsMode::Inconsistent {
            noise_scale: 0.01,
            seed: a.seed,
        },
    )?;

    let mut summary = String::from("curve,termination,iterations,min_rel_res,min_at_rel_res\n");
    let mut outputs: Vec<std::path::PathBuf> = Vec::new();
    for curve in curves(a.suite) {
        let b: &DenseVector = if curve.consistent_rhs {
            &b_consistent
        } else {
            &b_inconsistent
        };
        let h = curve.spec.run(&matrix, b)?;
        let csv_path = a.outdir.join(format!("{}.csv", curve.name));
        history::write(&csv_path, &h)?;
        let mut config = curve.spec.describe();
        config["command"] = json!("bench");
        config["suite"] = json!(a.suite.name());
        config["curve"] = json!(curve.name);
        config["family"] = json!(if is_gp { "gp" } else { "index2" });
        config["rho"] = json!(params.rho);
        config["gamma"] = json!(params.gamma);
        config["rhs_mode"] = json!(if curve.consistent_rhs {
            "consistent"
        } else {
            "inconsistent"
        });
        config["noise"] = json!(0.01);
        let seed = (!curve.consistent_rhs).then_some(a.seed);
        RunManifest::new(config, seed, &[&csv_path]).write_alongside(&csv_path)?;
        let min_rel = h.min_metric(StopMetric::RelRes).unwrap_or(f64::NAN);
        let min_atr = h.min_metric(StopMetric::AtRelRes).unwrap_or(f64::NAN);
        summary.push_str(&format!(
            "{},{},{},{:.16e},{:.16e}\n",
            curve.name,
            termination_name(h.termination),
            h.records.len(),
            min_rel,
            min_atr
        ));
        outputs.push(csv_path);
    }
    let summary_path = a.outdir.join("summary.csv");
    mm::write_atomic(&summary_path, &summary)?;
    let output_refs: Vec<&Path> = outputs
        .iter()
        .map(|p| p.as_path())
        .chain(std::iter::once(summary_path.as_path()))
        .collect();
    RunManifest::new(
        json!({
            "command": "bench",
            "suite": a.suite.name(),
            "rho": params.rho,
            "gamma": params.gamma,
            "noise": 0.01,
        }),
        Some(a.seed),
        &output_refs,
    )
    .write_alongside(&summary_path)?;
    println!(
        "suite {} -> {} curves in {}",
        a.suite.name(),
        outputs.len(),
        a.outdir.display()
    );
    Ok(())
}
