//! Numeric roots of real polynomials from companion-matrix eigenvalues.
//!
//! The variable is rescaled so that the first and last coefficients have the
//! same magnitude and the companion matrix is balanced. The eigenvalues are
//! grouped with Weierstrass inclusion disks, and isolated roots are polished
//! by Newton steps. A group of `m` disks that is connected and meets the real
//! axis is treated as an `m`-fold real root, which is how multiple real roots
//! such as those of `(1+z)^d` show up after rounding.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

const NEWTON_STEPS: usize = 8;
const SCHUR_MAX_ITER: usize = 10_000;

/// A root estimate and whether it was classified as real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ClassifiedRoot {
    pub value: Complex<f64>,
    pub real: bool,
}

/// Roots of `sum_k coeffs[k] z^k`, classified as real or not.
pub(crate) fn classified_roots(coeffs: &[f64], rel_tol: f64) -> Result<Vec<ClassifiedRoot>> {
    let zeros_at_origin = coeffs.iter().take_while(|c| **c == 0.0).count();
    let mut out: Vec<ClassifiedRoot> = (0..zeros_at_origin)
        .map(|_| ClassifiedRoot {
            value: Complex::new(0.0, 0.0),
            real: true,
        })
        .collect();
    let rest = &coeffs[zeros_at_origin..];
    let n = rest.len() - 1;
    if n == 0 {
        return Ok(out);
    }

    let (scaled, scale) = rescale(rest);
    let mut w = companion_eigenvalues(&scaled)?;
    let mut radii = inclusion_radii(&scaled, &w);
    let groups = connected_groups(&w, &radii);
    // Newton only on isolated roots: it would disturb the centroid of a cluster
    for group in groups.iter().filter(|g| g.len() == 1) {
        w[group[0]] = polish(&scaled, w[group[0]]);
    }
    if groups.iter().any(|g| g.len() == 1) {
        radii = inclusion_radii(&scaled, &w);
    }

    for group in groups {
        let meets_axis = group.iter().any(|&i| w[i].im.abs() <= radii[i]);
        if group.len() > 1 && meets_axis {
            let centroid = group.iter().map(|&i| w[i].re).sum::<f64>() / group.len() as f64;
            for _ in &group {
                out.push(ClassifiedRoot {
                    value: Complex::new(centroid * scale, 0.0),
                    real: true,
                });
            }
        } else {
            for &i in &group {
                let z = w[i] * scale;
                let real = meets_axis || z.im.abs() <= rel_tol * (1.0 + z.re.abs());
                out.push(ClassifiedRoot {
                    value: if real { Complex::new(z.re, 0.0) } else { z },
                    real,
                });
            }
        }
    }
    Ok(out)
}

/// Substitutes `z = s w` with `s = |c_0 / c_n|^(1/n)` and normalizes the
/// largest coefficient to one, working in log space.
fn rescale(coeffs: &[f64]) -> (Vec<f64>, f64) {
    let n = coeffs.len() - 1;
    let log_s = (coeffs[0].abs().ln() - coeffs[n].abs().ln()) / n as f64;
    let logs: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c.abs().ln() + k as f64 * log_s)
        .collect();
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scaled = coeffs
        .iter()
        .zip(&logs)
        .map(|(c, l)| c.signum() * (l - max).exp())
        .collect();
    (scaled, log_s.exp())
}

fn companion_eigenvalues(coeffs: &[f64]) -> Result<Vec<Complex<f64>>> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    if n == 1 {
        return Ok(vec![Complex::new(-coeffs[0] / lead, 0.0)]);
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -coeffs[i] / lead;
    }
    balance(&mut m);
    let schur = m
        .try_schur(f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::Numeric("companion matrix eigen-solver did not converge".into()))?;
    Ok(schur.complex_eigenvalues().iter().cloned().collect())
}

/// Diagonal similarity scaling by powers of two (Parlett-Reinsch).
fn balance(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / 2.0;
            while c < g {
                f *= 2.0;
                c *= 4.0;
            }
            g = r * 2.0;
            while c > g {
                f /= 2.0;
                c /= 4.0;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

fn horner(coeffs: &[f64], z: Complex<f64>) -> (Complex<f64>, Complex<f64>) {
    let mut p = Complex::new(0.0, 0.0);
    let mut dp = Complex::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn polish(coeffs: &[f64], mut z: Complex<f64>) -> Complex<f64> {
    let (mut p, mut dp) = horner(coeffs, z);
    for _ in 0..NEWTON_STEPS {
        if dp.norm() == 0.0 {
            break;
        }
        let next = z - p / dp;
        let (np, ndp) = horner(coeffs, next);
        if !(np.norm() < p.norm()) {
            break;
        }
        z = next;
        p = np;
        dp = ndp;
    }
    z
}

/// Radius `n |p(w_i)| / |c_n prod_{j != i} (w_i - w_j)|`, with `|p(w_i)|`
/// floored by the Horner rounding-error bound.
fn inclusion_radii(coeffs: &[f64], w: &[Complex<f64>]) -> Vec<f64> {
    let n = w.len();
    let lead = coeffs[n].abs();
    (0..n)
        .map(|i| {
            let z = w[i];
            let (p, _) = horner(coeffs, z);
            let bound: f64 = coeffs
                .iter()
                .rev()
                .fold(0.0, |acc, c| acc * z.norm() + c.abs());
            let residual = p.norm().max(4.0 * n as f64 * f64::EPSILON * bound);
            let denom: f64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z - w[j]).norm())
                .product();
            if denom == 0.0 {
                f64::INFINITY
            } else {
                n as f64 * residual / (lead * denom)
            }
        })
        .collect()
}

fn connected_groups(w: &[Complex<f64>], radii: &[f64]) -> Vec<Vec<usize>> {
    let n = w.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut root = i;
        while parent[root] != root {
            root = parent[root];
        }
        parent[i] = root;
        root
    }
    for i in 0..n {
        for j in i + 1..n {
            if (w[i] - w[j]).norm() <= radii[i] + radii[j] {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut index_of = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if index_of[root] == usize::MAX {
            index_of[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[index_of[root]].push(i);
    }
    groups
}
