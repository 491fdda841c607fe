//! Small derivative-free optimisers shared by the numeric routes.

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

fn sq(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// Levenberg-Marquardt with central-difference Jacobians. Stops after
/// `budget` residual evaluations or once `‖r‖² < goal`; returns the best
/// point and its squared residual.
pub(crate) fn least_squares(f: &dyn Fn(&[f64]) -> Vec<f64>, mut x: Vec<f64>, budget: usize, goal: f64) -> (Vec<f64>, f64) {
    const STEP: f64 = 1e-6;
    let mut r = f(&x);
    let mut cost = sq(&r);
    let mut evals = 1;
    let mut lambda = 1e-3;
    let n = x.len();
    while cost >= goal && evals + 2 * n <= budget {
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|k| {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[k] += STEP;
                xm[k] -= STEP;
                let (rp, rm) = (f(&xp), f(&xm));
                rp.iter().zip(&rm).map(|(p, m)| (p - m) / (2.0 * STEP)).collect()
            })
            .collect();
        evals += 2 * n;
        let jtj: Vec<Vec<f64>> =
            (0..n).map(|i| (0..n).map(|j| cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum()).collect()).collect();
        let jtr: Vec<f64> = (0..n).map(|i| cols[i].iter().zip(&r).map(|(a, b)| a * b).sum()).collect();
        let mut improved = false;
        while evals < budget && lambda < 1e12 {
            let mut m = jtj.clone();
            for (i, row) in m.iter_mut().enumerate() {
                row[i] += lambda * (1.0 + jtj[i][i]);
            }
            let Some(dx) = solve(m, jtr.iter().map(|v| -v).collect()) else {
                lambda *= 10.0;
                continue;
            };
            let xn: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
            let rn = f(&xn);
            evals += 1;
            let cn = sq(&rn);
            if cn < cost {
                (x, r, cost) = (xn, rn, cn);
                lambda = (lambda * 0.3).max(1e-15);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    (x, cost)
}

/// Nelder-Mead simplex descent, restarted around the incumbent whenever the
/// simplex collapses. Returns `(x, f(x), evaluations)`.
pub(crate) fn nelder_mead(f: &dyn Fn(&[f64]) -> f64, x0: Vec<f64>, step: f64, budget: usize, goal: f64) -> (Vec<f64>, f64, usize) {
    let n = x0.len();
    let mut evals = 0;
    let mut best = (x0.clone(), f(&x0));
    evals += 1;
    let mut scale = step;
    while evals + n + 1 <= budget && best.1 >= goal {
        let mut simplex: Vec<(Vec<f64>, f64)> = vec![best.clone()];
        for i in 0..n {
            let mut x = best.0.clone();
            x[i] += scale;
            let v = f(&x);
            simplex.push((x, v));
        }
        evals += n;
        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let spread = simplex[n].1 - simplex[0].1;
            if evals + 2 > budget || simplex[0].1 < goal || spread <= 1e-16 * simplex[0].1.abs().max(1e-300) {
                break;
            }
            let centroid: Vec<f64> = (0..n).map(|k| simplex[..n].iter().map(|p| p.0[k]).sum::<f64>() / n as f64).collect();
            let toward = |t: f64| -> Vec<f64> {
                centroid.iter().zip(&simplex[n].0).map(|(c, w)| c + t * (w - c)).collect()
            };
            let xr = toward(-1.0);
            let fr = f(&xr);
            evals += 1;
            if fr < simplex[0].1 {
                let xe = toward(-2.0);
                let fe = f(&xe);
                evals += 1;
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
            } else {
                let xc = if fr < simplex[n].1 { toward(-0.5) } else { toward(0.5) };
                let fc = f(&xc);
                evals += 1;
                if fc < fr.min(simplex[n].1) {
                    simplex[n] = (xc, fc);
                } else {
                    let x_best = simplex[0].0.clone();
                    for p in simplex.iter_mut().skip(1) {
                        p.0 = x_best.iter().zip(&p.0).map(|(b, x)| b + 0.5 * (x - b)).collect();
                        p.1 = f(&p.0);
                    }
                    evals += n;
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[0].1 < best.1 {
            best = simplex[0].clone();
        } else {
            scale *= 0.1;
            if scale < 1e-10 {
                break;
            }
        }
    }
    (best.0, best.1, evals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_finds_quadratic_minimum() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 2.0).powi(2) + (x[2] - 0.5).powi(2);
        let (x, v, _) = nelder_mead(&f, vec![0.0; 3], 0.5, 5000, 1e-20);
        assert!(v < 1e-14, "{v}");
        assert!((x[0] - 1.0).abs() < 1e-6 && (x[1] + 2.0).abs() < 1e-6);
    }

    #[test]
    fn least_squares_fits_rosenbrock() {
        let f = |x: &[f64]| vec![10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0]];
        let (x, c) = least_squares(&f, vec![-1.2, 1.0], 10_000, 1e-28);
        assert!(c < 1e-20 && (x[0] - 1.0).abs() < 1e-9);
    }
}
