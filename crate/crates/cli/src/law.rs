//! Probability laws given on the command line: JSON files or inline specs.
//!
//! Inline specs read `kind:key=value,key=value`, with list values separated
//! by `;`:
//!
//! - `cmb:d=9,r=0.3,nu=2`
//! - `calibrated:d=9,p=1/3,nu=2` (r solved so that the mean is `d p`)
//! - `frechet:d=3,p=1/2` (upper Frechet bound)
//! - `independent:p=0.2;0.5;0.7`
//! - `thinned:nu=2,p=0.2;0.3;0.5`
//!
//! Files hold `{"d": 3, "weights": [...]}` (law of the sum) or
//! `{"d": 3, "table": {"010": 0.1, ...}}` (joint law, coordinate 1 first).

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use cmmb::calibrate::{solve_r, DEFAULT_TOL};
use cmmb::orders::{exchangeable_from_sum, ExchBernoulliPmf};
use cmmb::thinning::thin_joint_pmf;
use cmmb::{cmb, CmbParams, DiscretePmf, MultiAffinePmf, ThinningSpec};
use serde::Deserialize;

use crate::CliError;

/// Parses a real number or a fraction such as `1/3`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let value = match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (parse_plain(a)?, parse_plain(b)?);
            if b == 0.0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            a / b
        }
        None => parse_plain(s)?,
    };
    if !value.is_finite() {
        return Err(format!("{s:?} is not finite"));
    }
    Ok(value)
}

fn parse_plain(s: &str) -> Result<f64, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("{s:?} is not a number"))
}

pub enum Law {
    Sum(DiscretePmf),
    Joint(MultiAffinePmf),
}

impl Law {
    /// Law of the coordinate sum.
    pub fn sum_law(&self) -> Result<DiscretePmf, CliError> {
        match self {
            Law::Sum(f) => Ok(f.clone()),
            Law::Joint(j) => Ok(DiscretePmf::new(j.sum_weights())?),
        }
    }

    /// Joint law; a sum law stands for its exchangeable vector.
    pub fn joint(&self) -> Result<MultiAffinePmf, CliError> {
        match self {
            Law::Sum(f) => Ok(exchangeable(f).expand()?),
            Law::Joint(j) => Ok(j.clone()),
        }
    }
}

fn exchangeable(f: &DiscretePmf) -> ExchBernoulliPmf {
    exchangeable_from_sum(f.clone())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum LawFile {
    Sum { d: usize, weights: Vec<f64> },
    Joint { d: usize, table: BTreeMap<String, f64> },
}

pub fn read_law(arg: &str) -> Result<Law, CliError> {
    if arg.ends_with(".json") || Path::new(arg).is_file() {
        return read_file(arg);
    }
    parse_inline(arg)
}

fn read_file(path: &str) -> Result<Law, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?;
    let file: LawFile = serde_json::from_str(&text).map_err(|e| {
        CliError::Usage(format!(
            "{path}: expected {{\"d\", \"weights\"}} or {{\"d\", \"table\"}}: {e}"
        ))
    })?;
    match file {
        LawFile::Sum { d, weights } => {
            if weights.len() != d + 1 {
                return Err(CliError::Usage(format!(
                    "{path}: d = {d} needs {} weights, got {}",
                    d + 1,
                    weights.len()
                )));
            }
            Ok(Law::Sum(DiscretePmf::new(renormalize(path, weights)?)?))
        }
        LawFile::Joint { d, table } => {
            let total: f64 = table.values().sum();
            check_total(path, total)?;
            Ok(Law::Joint(MultiAffinePmf::from_binary_table(
                d,
                table.iter().map(|(k, v)| (k.as_str(), v / total)),
            )?))
        }
    }
}

/// Files written with a few decimals do not sum to one exactly.
const FILE_SUM_TOL: f64 = 1e-6;

fn check_total(path: &str, total: f64) -> Result<(), CliError> {
    if (total - 1.0).abs() > FILE_SUM_TOL {
        return Err(CliError::Usage(format!("{path}: probabilities sum to {total}, expected 1")));
    }
    Ok(())
}

fn renormalize(path: &str, weights: Vec<f64>) -> Result<Vec<f64>, CliError> {
    let total: f64 = weights.iter().sum();
    check_total(path, total)?;
    Ok(weights.into_iter().map(|w| w / total).collect())
}

fn parse_inline(spec: &str) -> Result<Law, CliError> {
    let usage = |msg: String| CliError::Usage(format!("law {spec:?}: {msg}"));
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| usage("expected a .json file or kind:key=value,...".into()))?;
    let mut fields = HashMap::new();
    for pair in rest.split(',').filter(|p| !p.is_empty()) {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| usage(format!("{pair:?} is not key=value")))?;
        fields.insert(k.trim(), v.trim());
    }
    let real = |key: &str| -> Result<f64, CliError> {
        let v = fields.get(key).ok_or_else(|| usage(format!("missing {key}")))?;
        parse_real(v).map_err(usage)
    };
    let dim = |key: &str| -> Result<usize, CliError> {
        let v = fields.get(key).ok_or_else(|| usage(format!("missing {key}")))?;
        v.parse().map_err(|_| usage(format!("{key} = {v:?} is not a nonnegative integer")))
    };
    let list = |key: &str| -> Result<Vec<f64>, CliError> {
        let v = fields.get(key).ok_or_else(|| usage(format!("missing {key}")))?;
        v.split(';').map(parse_real).collect::<Result<_, _>>().map_err(usage)
    };
    match kind {
        "cmb" => Ok(Law::Sum(cmb::pmf(&CmbParams::new(dim("d")?, real("r")?, real("nu")?)?))),
        "calibrated" => {
            let (d, p, nu) = (dim("d")?, real("p")?, real("nu")?);
            let r = solve_r(d, nu, p, DEFAULT_TOL)?;
            Ok(Law::Sum(cmb::pmf(&CmbParams::new(d, r, nu)?)))
        }
        "frechet" => Ok(Law::Joint(MultiAffinePmf::upper_frechet(dim("d")?, real("p")?)?)),
        "independent" => Ok(Law::Joint(MultiAffinePmf::independent(&list("p")?)?)),
        "thinned" => Ok(Law::Joint(thin_joint_pmf(&ThinningSpec::new(
            real("nu")?,
            list("p")?,
        )?)?)),
        other => Err(usage(format!(
            "unknown kind {other:?} (cmb, calibrated, frechet, independent, thinned)"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions() {
        assert_eq!(parse_real("1/4").unwrap(), 0.25);
        assert_eq!(parse_real("-2").unwrap(), -2.0);
        assert!(parse_real("1/0").is_err());
        assert!(parse_real("abc").is_err());
        assert!(parse_real("inf").is_err());
    }

    #[test]
    fn inline_specs() {
        let Law::Sum(f) = parse_inline("cmb:d=4,r=1/2,nu=2").unwrap() else { panic!() };
        assert!((f.weights()[2] - 36.0 / 70.0).abs() < 1e-15);
        let Law::Joint(j) = parse_inline("independent:p=0.2;0.5").unwrap() else { panic!() };
        assert_eq!(j.d(), 2);
        let Law::Joint(t) = parse_inline("thinned:nu=2,p=0.2;0.3;0.5").unwrap() else { panic!() };
        assert!((t.marginal_means()[0] - 0.2).abs() < 1e-15);
        assert!(parse_inline("cmb:d=4,r=0.5").is_err());
        assert!(parse_inline("poisson:l=1").is_err());
        assert!(parse_inline("nonsense").is_err());
    }
}
