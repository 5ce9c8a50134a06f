use cmmb::calibrate::solve_r;
use cmmb::cmb::{self, DiscretePmf};
use cmmb::orders::{cmmb, cx_dominates, pairwise_covariance};
use cmmb::sampling::{sample_exchangeable, sample_thinned, sample_w};
use cmmb::thinning::thin_joint_pmf;
use cmmb::{CmbParams, ThinningSpec};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn moments(draws: &[usize]) -> (f64, f64) {
    let n = draws.len() as f64;
    let mean = draws.iter().sum::<usize>() as f64 / n;
    let var = draws.iter().map(|&k| (k as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Standard errors of the sample mean and sample variance under `f`.
fn standard_errors(f: &DiscretePmf, n: usize) -> (f64, f64) {
    let m = f.mean();
    let central = |p: i32| -> f64 {
        f.weights()
            .iter()
            .enumerate()
            .map(|(k, w)| w * (k as f64 - m).powi(p))
            .sum()
    };
    let (m2, m4) = (central(2), central(4));
    ((m2 / n as f64).sqrt(), ((m4 - m2 * m2) / n as f64).sqrt())
}

#[test]
fn calibrated_moments() {
    let r = solve_r(9, 3.0, 1.0 / 3.0, 1e-12).unwrap();
    let params = CmbParams::new(9, r, 3.0).unwrap();
    let n = 1_000_000;
    let draws = sample_w(&params, n, 7).unwrap();
    let (mean, var) = moments(&draws);
    let (se_m, se_v) = standard_errors(&cmb::pmf(&params), n);
    assert!((mean - 3.0).abs() < 5.0 * se_m, "{mean}");
    assert!((var - 0.731_982_767_136).abs() < 5.0 * se_v, "{var}");
    assert_eq!(draws, sample_w(&params, n, 7).unwrap());
}

#[test]
fn binomial_case_mean() {
    let params = CmbParams::new(9, 1.0 / 3.0, 1.0).unwrap();
    let draws = sample_w(&params, 200_000, 1).unwrap();
    let (mean, _) = moments(&draws);
    assert!((mean - 3.0).abs() < 5.0 * (2.0f64 / 200_000.0).sqrt());
}

fn chi_square_p_value(f: &DiscretePmf, draws: &[usize]) -> f64 {
    let n = draws.len() as f64;
    let mut counts = vec![0usize; f.d() + 1];
    draws.iter().for_each(|&k| counts[k] += 1);
    // merge adjacent cells until each expected count is at least 5
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut e, mut o) = (0.0, 0.0);
    for (w, c) in f.weights().iter().zip(&counts) {
        e += w * n;
        o += *c as f64;
        if e >= 5.0 {
            cells.push((e, o));
            e = 0.0;
            o = 0.0;
        }
    }
    if let Some(last) = cells.last_mut() {
        last.0 += e;
        last.1 += o;
    }
    let stat: f64 = cells.iter().map(|(e, o)| (o - e).powi(2) / e).sum();
    let dof = (cells.len() - 1) as f64;
    1.0 - ChiSquared::new(dof).unwrap().cdf(stat)
}

#[test]
fn goodness_of_fit() {
    let r = solve_r(9, 3.0, 1.0 / 3.0, 1e-12).unwrap();
    let params = CmbParams::new(9, r, 3.0).unwrap();
    let f = cmb::pmf(&params);
    let passed = (0..100)
        .filter(|&seed| chi_square_p_value(&f, &sample_w(&params, 100_000, seed).unwrap()) > 0.001)
        .count();
    assert!(passed >= 99, "{passed}/100");
}

#[test]
fn exchangeable_draws() {
    let params = CmbParams::new(3, 0.5, 2.0).unwrap();
    let n = 1_000_000;
    let x = sample_exchangeable(&params, n, 3).unwrap();
    let e = cmmb(&params);
    let p = e.marginal_mean();
    let se_p = (p * (1.0 - p) / n as f64).sqrt();
    for m in x.column_means() {
        assert!((m - p).abs() < 5.0 * se_p);
    }
    // Var(I1 I2) bounds the variance of the product-moment estimator
    let joint = e.expand().unwrap();
    let p11 = joint.weights().iter().enumerate().filter(|(m, _)| m & 3 == 3).map(|(_, w)| w).sum::<f64>();
    let se_cov = (p11 * (1.0 - p11) / n as f64).sqrt() + 2.0 * se_p;
    let cov = x.covariance()[0][1];
    assert!((cov - pairwise_covariance(&e).unwrap()).abs() < 5.0 * se_cov, "{cov}");

    let f = cmb::pmf(&params);
    let mut counts = vec![0usize; 4];
    x.row_sums().iter().for_each(|&k| counts[k] += 1);
    for (c, q) in counts.iter().zip(f.weights()) {
        assert!((*c as f64 / n as f64 - q).abs() < 5.0 * (q * (1.0 - q) / n as f64).sqrt());
    }
}

#[test]
fn thinned_joint_frequencies() {
    let spec = ThinningSpec::new(2.0, vec![0.2, 0.3, 0.5]).unwrap();
    let n = 1_000_000;
    let x = sample_thinned(&spec, n, 21).unwrap();
    let mut counts = [0usize; 8];
    for row in x.rows() {
        counts[(row[0] + 2 * row[1] + 4 * row[2]) as usize] += 1;
    }
    let joint = thin_joint_pmf(&spec).unwrap();
    for (mask, c) in counts.iter().enumerate() {
        let q = joint.prob(mask);
        let se = (q * (1.0 - q) / n as f64).sqrt();
        assert!((*c as f64 / n as f64 - q).abs() < 5.0 * se + 1e-12, "mask {mask}");
    }
    for (m, p) in x.column_means().iter().zip(spec.p()) {
        assert!((m - p).abs() < 5.0 * (p * (1.0 - p) / n as f64).sqrt());
    }
}

#[test]
fn empirical_stop_loss_follows_cx_order() {
    let r2 = solve_r(9, 2.0, 1.0 / 3.0, 1e-12).unwrap();
    let r5 = solve_r(9, 5.0, 1.0 / 3.0, 1e-12).unwrap();
    let (a, b) = (CmbParams::new(9, r2, 2.0).unwrap(), CmbParams::new(9, r5, 5.0).unwrap());
    assert!(cx_dominates(&cmb::pmf(&a), &cmb::pmf(&b), 1e-9).unwrap());
    let n = 200_000;
    let (wa, wb) = (sample_w(&a, n, 1).unwrap(), sample_w(&b, n, 2).unwrap());
    let empirical = |w: &[usize], t: f64| {
        w.iter().map(|&k| (k as f64 - t).max(0.0)).sum::<f64>() / n as f64
    };
    for t in 0..=9 {
        let t = t as f64;
        // Var((W - t)_+) <= E[W^2] <= 81, so 5 SE of a difference is below 0.15
        assert!(empirical(&wb, t) <= empirical(&wa, t) + 5.0 * (2.0 * 81.0 / n as f64).sqrt());
    }
}
