use serde::Serialize;
use serde_json::{json, Value};

use nullag::boundary::{boundary_nl_basis, boundary_nl_basis_len, decompose_boundary, decompose_minors, is_boundary_nl, special_form, FrameReport};
use nullag::conc::{
    default_test_functions, higher_integrability_experiment, weak_continuity_experiment, AnalyticSequence, ExperimentReport,
    HigherIntegrabilityOptions, TestFunction, WeakOptions,
};
use nullag::poly::PolyMatrixFn;
use nullag::qcb::{interior_qc_deficit, qcb_deficit, qcb_envelope0, OptimOptions, QcbOptions};
use nullag::Error;

use crate::{parse, selftest, Cli, CliError, Command, MeshArgs, Outcome, SequenceArg, EXIT_OK};

fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Numerical(format!("serialization: {e}")))
}

fn ok(result: Value) -> Result<Outcome, CliError> {
    Ok(Outcome { result, csv: None, code: EXIT_OK })
}

fn poly_value(f: &PolyMatrixFn) -> Result<Value, CliError> {
    Ok(json!({ "display": f.to_string(), "json": to_value(&f.to_json())? }))
}

fn qcb_options(mesh: &MeshArgs, seed: u64) -> QcbOptions {
    QcbOptions {
        h: mesh.h,
        trials: mesh.trials,
        seed,
        optim: OptimOptions {
            max_iter: mesh.max_iter,
            bound: mesh.bound,
            ..Default::default()
        },
    }
}

fn experiment(r: &ExperimentReport) -> Result<Outcome, CliError> {
    Ok(Outcome {
        result: to_value(r)?,
        csv: Some(r.to_csv_rows()),
        code: EXIT_OK,
    })
}

pub fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Decompose { poly, normal } => {
            let f = parse::poly(poly)?;
            match normal {
                None => match decompose_minors(&f) {
                    Ok(e) => ok(json!({ "quasiaffine": true, "expansion": to_value(&e.to_report())? })),
                    Err(Error::NotQuasiaffine { residual }) => ok(json!({ "quasiaffine": false, "residual": residual })),
                    Err(e) => Err(e.into()),
                },
                Some(text) => {
                    let nrm = parse::normal(text)?;
                    let frame = to_value(&FrameReport::new(&nrm)?)?;
                    match decompose_boundary(&f, &nrm) {
                        Ok(e) => ok(json!({
                            "quasiaffine": true,
                            "boundary_nl": true,
                            "frame": frame,
                            "expansion": to_value(&e.to_report())?,
                        })),
                        Err(Error::NotBoundaryNl { offending }) => ok(json!({
                            "quasiaffine": true,
                            "boundary_nl": false,
                            "frame": frame,
                            "offending": offending,
                        })),
                        Err(Error::NotQuasiaffine { residual }) => ok(json!({
                            "quasiaffine": false,
                            "boundary_nl": false,
                            "frame": frame,
                            "residual": residual,
                        })),
                        Err(e) => Err(e.into()),
                    }
                }
            }
        }
        Command::CheckBoundaryNl { poly, normal } => {
            let f = parse::poly(poly)?;
            let v = is_boundary_nl(&f, &parse::normal(normal)?)?;
            ok(to_value(&v.to_report()?)?)
        }
        Command::Basis { m, n, normal } => {
            let nrm = parse::normal(normal)?;
            let basis = boundary_nl_basis(*m, *n, &nrm)?;
            let polys = basis.iter().map(poly_value).collect::<Result<Vec<_>, _>>()?;
            ok(json!({
                "count": basis.len(),
                "expected_count": boundary_nl_basis_len(*m, *n),
                "frame": to_value(&FrameReport::new(&nrm)?)?,
                "polynomials": polys,
            }))
        }
        Command::SpecialForm { poly, f } => {
            let v = parse::poly(poly)?;
            let f0 = parse::rational_matrix(f, v.rows(), v.cols())?;
            ok(json!({ "polynomial": poly_value(&special_form(&v, &f0)?)? }))
        }
        Command::Qcb { poly, normal, f, mesh } => {
            let v = parse::poly(poly)?;
            let fm = parse::real_matrix(f.as_deref(), v.rows(), v.cols())?;
            let nrm = parse::normal(normal)?;
            ok(to_value(&qcb_deficit(&v, &fm, &nrm.float, &qcb_options(mesh, cli.seed))?)?)
        }
        Command::Envelope0 { poly, normal, mesh } => {
            let v = parse::poly(poly)?;
            let nrm = parse::normal(normal)?;
            ok(to_value(&qcb_envelope0(&v, &nrm.float, &qcb_options(mesh, cli.seed))?)?)
        }
        Command::InteriorQc { poly, f, mesh } => {
            let v = parse::poly(poly)?;
            let fm = parse::real_matrix(f.as_deref(), v.rows(), v.cols())?;
            ok(to_value(&interior_qc_deficit(&v, &fm, &qcb_options(mesh, cli.seed))?)?)
        }
        Command::Weakcont { poly, sequence, ks, phis } => {
            let mut args = poly.clone();
            args.m.get_or_insert(2);
            let f = parse::poly(&args)?;
            let n = f.cols();
            let seq = match sequence {
                SequenceArg::Boundary => AnalyticSequence::boundary_concentration(n, 1)?,
                SequenceArg::Interior => AnalyticSequence::interior_concentration(n, 1)?,
                SequenceArg::Constant => AnalyticSequence::constant(n)?,
            };
            let phis = match phis {
                None => default_test_functions(n),
                Some(text) => text.split(';').map(|p| TestFunction::parse(p, n)).collect::<Result<Vec<_>, _>>()?,
            };
            let ks = parse::integers(ks, "--ks")?;
            experiment(&weak_continuity_experiment(&f, &seq, &phis, &ks, &WeakOptions::default())?)
        }
        Command::Counterex { n, ks, eps, deltas } => {
            let ks = parse::integers(ks, "--ks")?;
            let deltas = parse::reals(deltas, "--deltas")?;
            experiment(&higher_integrability_experiment(*n, &ks, *eps, &deltas, &HigherIntegrabilityOptions::default())?)
        }
        Command::Selftest => {
            let report = selftest::run(cli.seed);
            let code = if report.passed { EXIT_OK } else { crate::EXIT_NUMERICAL };
            Ok(Outcome {
                result: to_value(&report)?,
                csv: None,
                code,
            })
        }
    }
}
