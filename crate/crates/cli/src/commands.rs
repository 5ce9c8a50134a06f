//! One function per subcommand; each returns the text written to standard output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use cmmb::calibrate::{chain_table, chain_table_with};
use cmmb::cmb::{self, g_poly, pgf_poly};
use cmmb::geometry::{reconstruct_from_weights, symmetric_weights};
use cmmb::joint::key_from_mask;
use cmmb::orders::{cx_dominates, na_check_exhaustive, sign_changes, sm_dominates_lp};
use cmmb::sampling::{sample_exchangeable, sample_thinned, sample_w, BinaryMatrix};
use cmmb::stability::{
    cmb_sr_verdict, find_sr_threshold, is_hyperbolic_exact, is_hyperbolic_numeric,
    sr_check_multiaffine_d3, sr_falsify_random,
};
use cmmb::{CmbParams, Execution, HyperbolicityVerdict, ThinningSpec};
use serde_json::{json, Value};

use crate::law::read_law;
use crate::output::{Cell, Format, Output};
use crate::{
    ChainArgs, Cli, CliError, Command, DecomposeArgs, HistArgs, Mode, OrderArgs, PmfArgs,
    SampleArgs, SrArgs, What,
};

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let out = match &cli.command {
        Command::Pmf(a) => pmf(a, cli.format)?,
        Command::Chain(a) => chain(a)?,
        Command::SrCheck(a) => sr_check(a)?,
        Command::Hist(a) => return hist(a, cli),
        Command::OrderCheck(a) => order_check(a)?,
        Command::Sample(a) => sample(a)?,
        Command::Decompose(a) => decompose(a, cli.format)?,
    };
    let text = out.render(cli.format, cli.precision);
    std::io::stdout()
        .write_all(text.as_bytes())
        .map_err(|e| CliError::Usage(format!("cannot write output: {e}")))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn write_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Usage(format!("cannot write {}: {e}", path.display()))
}

fn pmf(a: &PmfArgs, format: Format) -> Result<Output, CliError> {
    let params = CmbParams::new(a.d, a.r, a.nu)?;
    let f = cmb::pmf(&params);
    Ok(match format {
        Format::Csv => Output::Table {
            header: vec!["k", "probability"],
            rows: f
                .weights()
                .iter()
                .enumerate()
                .map(|(k, w)| vec![k.into(), (*w).into()])
                .collect(),
        },
        Format::Json => Output::Object(json!({
            "d": a.d,
            "r": a.r,
            "nu": a.nu,
            "weights": f.weights(),
        })),
    })
}

fn chain(a: &ChainArgs) -> Result<Output, CliError> {
    let rows = chain_table_with(Execution::default(), a.d, a.p, &a.nu_list, a.tol)?;
    Ok(Output::Table {
        header: vec!["nu", "r", "mean", "variance"],
        rows: rows
            .iter()
            .map(|row| vec![row.nu.into(), row.r.into(), row.mean.into(), row.variance.into()])
            .collect(),
    })
}

fn verdict_json(v: &HyperbolicityVerdict) -> Value {
    json!({
        "is_sr": v.is_hyperbolic,
        "method": v.method,
        "degree": v.degree,
        "real_root_count": v.real_root_count,
        "witness": v.witness.map(|(re, im)| json!({"re": re, "im": im})),
    })
}

fn sr_check(a: &SrArgs) -> Result<Output, CliError> {
    if let Some(spec) = &a.law {
        let joint = read_law(spec)?.joint()?;
        let mut v = json!({"d": joint.d()});
        if joint.d() == 3 {
            v["is_sr"] = json!(sr_check_multiaffine_d3(&joint)?);
            v["method"] = json!("d3_closed_form");
        } else {
            let witness = sr_falsify_random(&joint, a.trials, a.seed)?;
            v["is_sr"] = json!(witness.is_none());
            v["method"] = json!("random_falsifier");
            v["conclusive"] = json!(witness.is_some());
            v["trials"] = json!(a.trials);
            v["seed"] = json!(a.seed);
            v["witness"] = json!(witness);
        }
        return Ok(Output::Object(v));
    }
    let d = a.d.expect("clap requires --d without --law");
    if a.threshold {
        let (lo, hi) = (a.lo.unwrap(), a.hi.unwrap());
        let t = find_sr_threshold(d, lo, hi, a.tol)?;
        return Ok(Output::Object(json!({
            "d": d, "lo": lo, "hi": hi, "tol": a.tol, "threshold": t,
        })));
    }
    let nu = a.nu.expect("clap requires --nu");
    let verdict = if a.exact {
        is_hyperbolic_exact(&g_poly(d, nu)?)?
    } else if let Some(r) = a.r {
        is_hyperbolic_numeric(&pgf_poly(&CmbParams::new(d, r, nu)?)?, a.rel_tol)?
    } else if a.numeric {
        is_hyperbolic_numeric(&g_poly(d, nu)?, a.rel_tol)?
    } else {
        cmb_sr_verdict(d, nu)?
    };
    let mut v = verdict_json(&verdict);
    v["d"] = json!(d);
    v["nu"] = json!(nu);
    if let Some(r) = a.r {
        v["r"] = json!(r);
    }
    Ok(Output::Object(v))
}

fn hist(a: &HistArgs, cli: &Cli) -> Result<(), CliError> {
    let rows = chain_table(a.d, a.p, &a.nu_list)?;
    let mut table = Vec::new();
    for row in rows {
        let f = cmb::pmf(&CmbParams::new(a.d, row.r, row.nu)?);
        for (k, w) in f.weights().iter().enumerate() {
            table.push(vec![Cell::from(row.nu), k.into(), (*w).into()]);
        }
    }
    let out = Output::Table {
        header: vec!["nu", "k", "probability"],
        rows: table,
    };
    let text = out.render(cli.format, cli.precision);
    match &a.out {
        Some(path) => {
            let mut w = create(path)?;
            w.write_all(text.as_bytes()).map_err(write_err(path))?;
            w.flush().map_err(write_err(path))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Usage(format!("cannot write output: {e}"))),
    }
}

fn order_check(a: &OrderArgs) -> Result<Output, CliError> {
    let pair = || -> Result<_, CliError> {
        match (&a.lo, &a.hi) {
            (Some(lo), Some(hi)) => Ok((read_law(lo)?, read_law(hi)?)),
            _ => Err(CliError::Usage("--lo and --hi are required for cx and sm".into())),
        }
    };
    let v = match a.mode {
        Mode::Cx => {
            let (lo, hi) = pair()?;
            let (lo, hi) = (lo.sum_law()?, hi.sum_law()?);
            let holds = cx_dominates(&hi, &lo, a.tol)?;
            let reverse = cx_dominates(&lo, &hi, a.tol)?;
            let direction = match (holds, reverse) {
                (true, true) => "equal",
                (true, false) => "lo <=cx hi",
                (false, true) => "hi <=cx lo",
                (false, false) => "incomparable",
            };
            let s = sign_changes(&hi, &lo)?;
            json!({
                "mode": "cx",
                "holds": holds,
                "direction": direction,
                "means": [lo.mean(), hi.mean()],
                "variances": [lo.variance(), hi.variance()],
                "sign_changes": s.changes(),
                "sign_positions": s.positions,
                "signs": s.signs,
            })
        }
        Mode::Sm => {
            let (lo, hi) = pair()?;
            let (lo, hi) = (lo.joint()?, hi.joint()?);
            let v = sm_dominates_lp(&lo, &hi)?;
            let witness = v.witness.map(|phi| {
                phi.iter()
                    .enumerate()
                    .map(|(m, x)| (key_from_mask(m, lo.d()), json!(x)))
                    .collect::<serde_json::Map<_, _>>()
            });
            json!({
                "mode": "sm",
                "holds": v.dominates,
                "gap": v.gap,
                "witness": witness,
            })
        }
        Mode::Na => {
            let spec = a
                .law
                .as_ref()
                .ok_or_else(|| CliError::Usage("--law is required for na".into()))?;
            let joint = read_law(spec)?.joint()?;
            let w = na_check_exhaustive(&joint)?;
            json!({
                "mode": "na",
                "holds": w.is_none(),
                "witness": w,
            })
        }
    };
    Ok(Output::Object(v))
}

fn write_matrix(path: &Path, x: &BinaryMatrix) -> Result<(), CliError> {
    let mut w = create(path)?;
    let header: Vec<String> = (1..=x.d()).map(|j| format!("i{j}")).collect();
    writeln!(w, "{}", header.join(",")).map_err(write_err(path))?;
    let mut line = String::with_capacity(2 * x.d());
    for row in x.rows() {
        line.clear();
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push(if *v == 1 { '1' } else { '0' });
        }
        line.push('\n');
        w.write_all(line.as_bytes()).map_err(write_err(path))?;
    }
    w.flush().map_err(write_err(path))
}

fn matrix_summary(x: &BinaryMatrix) -> Value {
    let cov = x.covariance();
    let sums = x.row_sums();
    let (m, v) = moments(&sums);
    json!({
        "d": x.d(),
        "mean": x.column_means(),
        "variance": (0..x.d()).map(|j| cov[j][j]).collect::<Vec<_>>(),
        "covariance": cov,
        "sum_mean": m,
        "sum_variance": v,
    })
}

/// Mean and variance (divisor `n`).
fn moments(draws: &[usize]) -> (f64, f64) {
    let n = draws.len() as f64;
    let mean = draws.iter().sum::<usize>() as f64 / n;
    let var = draws.iter().map(|&k| (k as f64 - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

fn sample(a: &SampleArgs) -> Result<Output, CliError> {
    let params = || -> Result<CmbParams, CliError> {
        match (a.d, a.r) {
            (Some(d), Some(r)) => Ok(CmbParams::new(d, r, a.nu)?),
            _ => Err(CliError::Usage("--d and --r are required".into())),
        }
    };
    let mut v = match a.what {
        What::W => {
            let params = params()?;
            let draws = sample_w(&params, a.n, a.seed)?;
            if let Some(path) = &a.out {
                let mut w = create(path)?;
                writeln!(w, "w").map_err(write_err(path))?;
                for k in &draws {
                    writeln!(w, "{k}").map_err(write_err(path))?;
                }
                w.flush().map_err(write_err(path))?;
            }
            let (m, var) = moments(&draws);
            json!({"d": params.d(), "r": params.r(), "mean": m, "variance": var})
        }
        What::Exch => {
            let params = params()?;
            let x = sample_exchangeable(&params, a.n, a.seed)?;
            if let Some(path) = &a.out {
                write_matrix(path, &x)?;
            }
            let mut s = matrix_summary(&x);
            s["r"] = json!(params.r());
            s
        }
        What::Thinned => {
            if a.p.is_empty() {
                return Err(CliError::Usage("--p is required for thinned draws".into()));
            }
            let spec = ThinningSpec::new(a.nu, a.p.clone())?;
            let x = sample_thinned(&spec, a.n, a.seed)?;
            if let Some(path) = &a.out {
                write_matrix(path, &x)?;
            }
            let mut s = matrix_summary(&x);
            s["p"] = json!(spec.p());
            s
        }
    };
    v["what"] = json!(match a.what {
        What::W => "w",
        What::Exch => "exch",
        What::Thinned => "thinned",
    });
    v["nu"] = json!(a.nu);
    v["n"] = json!(a.n);
    v["seed"] = json!(a.seed);
    Ok(Output::Object(v))
}

fn decompose(a: &DecomposeArgs, format: Format) -> Result<Output, CliError> {
    let weights = symmetric_weights(a.d, a.nu)?;
    let rebuilt = reconstruct_from_weights(a.d, &weights)?;
    let direct = cmb::pmf(&CmbParams::new(a.d, 0.5, a.nu)?);
    let residual = rebuilt
        .weights()
        .iter()
        .zip(direct.weights())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let rows: Vec<(usize, f64)> = weights.lambdas().iter().copied().enumerate().collect();
    Ok(match format {
        Format::Csv => {
            eprintln!("reconstruction residual: {residual:e}");
            Output::Table {
                header: vec!["j", "lambda", "low", "high"],
                rows: rows
                    .iter()
                    .map(|&(j, l)| vec![j.into(), l.into(), j.into(), (a.d - j).into()])
                    .collect(),
            }
        }
        Format::Json => Output::Object(json!({
            "d": a.d,
            "nu": a.nu,
            "weights": rows
                .iter()
                .map(|&(j, l)| json!({"j": j, "lambda": l, "low": j, "high": a.d - j}))
                .collect::<Vec<_>>(),
            // scientific notation keeps the residual visible at any precision
            "residual": format!("{residual:e}"),
        })),
    })
}
