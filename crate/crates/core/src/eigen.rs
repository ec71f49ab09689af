//! Eigenvalues of general complex matrices.
//!
//! X + iY is embedded as the real matrix [[X, −Y], [Y, X]], whose spectrum is
//! the union of the spectrum of X + iY and its complex conjugate. The real
//! Schur form of the embedding gives that union; conjugate pairs are then
//! matched and one member of each is kept, chosen by the residual of an
//! inverse-iteration probe on the complex matrix.

use nalgebra::{DMatrix, DVector, Hessenberg};
use num_complex::Complex64;

use crate::error::{Error, Result};

type CMat = DMatrix<Complex64>;

fn norm1(m: &CMat) -> f64 {
    (0..m.ncols())
        .map(|c| m.column(c).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Diagonal similarity by powers of two that equalizes row and column norms.
/// Returns the balanced matrix; eigenvalues are unchanged.
pub fn balance(m: &CMat) -> CMat {
    let n = m.nrows();
    let mut a = m.clone();
    let radix = 2.0_f64;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].norm();
                    r += a[(i, j)].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut cc = c;
            while cc < r / radix {
                cc *= radix;
                f *= radix;
            }
            while cc >= r * radix {
                cc /= radix;
                f /= radix;
            }
            if (cc + r / f) < 0.95 * s {
                done = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
    }
    a
}

/// Residual ‖(M − λI)x‖/(‖M‖‖x‖) after a few steps of inverse iteration.
pub fn inverse_iteration_residual(m: &CMat, lambda: Complex64) -> f64 {
    eigenvector(m, lambda).1
}

/// Approximate eigenvector for λ by inverse iteration, with its relative
/// residual.
pub fn eigenvector(m: &CMat, lambda: Complex64) -> (DVector<Complex64>, f64) {
    let n = m.nrows();
    let scale = norm1(m).max(f64::MIN_POSITIVE);
    // A tiny shift keeps the factorization finite at an exact eigenvalue.
    let shift = lambda + Complex64::new(scale * 1e-13, scale * 1e-13);
    let shifted = m - CMat::identity(n, n) * shift;
    let lu = shifted.lu();
    let mut x = DVector::from_fn(n, |i, _| Complex64::new(1.0 + 0.1 * i as f64, 0.3));
    x /= Complex64::new(x.norm(), 0.0);
    for _ in 0..4 {
        match lu.solve(&x) {
            Some(y) if y.iter().all(|z| z.re.is_finite() && z.im.is_finite()) => {
                let nrm = y.norm();
                if nrm == 0.0 {
                    break;
                }
                x = y / Complex64::new(nrm, 0.0);
            }
            _ => break,
        }
    }
    let r = (m * &x - &x * lambda).norm() / scale;
    (x, r)
}

/// All eigenvalues of a complex square matrix.
pub fn complex_eigenvalues(m: &CMat) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "matrix must be square");
    if n == 0 {
        return Ok(vec![]);
    }
    if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Domain("non-finite matrix entry".into()));
    }
    let b = balance(m);
    let mut big = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            let z = b[(r, c)];
            big[(r, c)] = z.re;
            big[(r + n, c + n)] = z.re;
            big[(r, c + n)] = -z.im;
            big[(r + n, c)] = z.im;
        }
    }
    let scale = norm1(&b).max(f64::MIN_POSITIVE);
    let mu = real_schur_eigenvalues(&big, scale)?;

    // Greedy conjugate matching: each μ pairs with the μ' closest to μ̄.
    let mut cand: Vec<(f64, usize, usize)> = Vec::with_capacity(mu.len() * mu.len() / 2);
    for a in 0..mu.len() {
        for c in (a + 1)..mu.len() {
            cand.push(((mu[a] - mu[c].conj()).norm(), a, c));
        }
    }
    cand.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut used = vec![false; mu.len()];
    let mut pairs = Vec::with_capacity(n);
    for (_, a, c) in cand {
        if !used[a] && !used[c] {
            used[a] = true;
            used[c] = true;
            pairs.push((mu[a], mu[c]));
            if pairs.len() == n {
                break;
            }
        }
    }
    if pairs.len() != n {
        return Err(Error::EigenNoConvergence { residual: f64::NAN });
    }

    let mut out = Vec::with_capacity(n);
    let mut tie_flip = false;
    for (p, q) in pairs {
        // Representative with Im ≥ 0 and its conjugate.
        let avg = (p + q.conj()) * 0.5;
        let up = Complex64::new(avg.re, avg.im.abs());
        let down = up.conj();
        if up.im <= 1e-12 * scale {
            out.push(up);
            continue;
        }
        let ru = inverse_iteration_residual(&b, up);
        let rd = inverse_iteration_residual(&b, down);
        let tie = ru < 1e-8 && rd < 1e-8;
        let pick = if tie {
            // Both are eigenvalues (e.g. a real matrix); alternate.
            tie_flip = !tie_flip;
            if tie_flip {
                up
            } else {
                down
            }
        } else if ru <= rd {
            up
        } else {
            down
        };
        out.push(pick);
    }
    Ok(out)
}

/// Eigenvalues of a real matrix: Householder reduction to Hessenberg form,
/// then Francis double-shift QR with exceptional shifts.
fn real_schur_eigenvalues(big: &DMatrix<f64>, _scale: f64) -> Result<Vec<Complex64>> {
    let mut h = Hessenberg::new(big.clone()).unpack_h();
    hessenberg_qr(&mut h)
}

/// Eigenvalue-only QR iteration on an upper Hessenberg matrix (destroyed).
///
/// Deflation uses the classical neighbour test and, in addition, an
/// absolute test |h_{l,l-1}| ≤ ε‖H‖, which is needed when clusters of zero
/// eigenvalues make the neighbour test unreachable. Exceptional shifts are
/// applied every tenth iteration on a stalled block.
pub fn hessenberg_qr(a: &mut DMatrix<f64>) -> Result<Vec<Complex64>> {
    let n = a.nrows();
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }
    let small = f64::EPSILON * anorm;
    let sign = |x: f64, y: f64| if y >= 0.0 { x.abs() } else { -x.abs() };
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    while nn >= 0 {
        let nu = nn as usize;
        let mut its = 0;
        loop {
            let mut l = nu;
            while l >= 1 {
                let mut s = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                let sub = a[(l, l - 1)].abs();
                if sub + s == s || sub <= small {
                    a[(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[(nu, nu)];
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a[(nu - 1, nu - 1)];
            let mut w = a[(nu, nu - 1)] * a[(nu - 1, nu)];
            if l == nu - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[nu - 1] = x + z;
                    wr[nu] = if z != 0.0 { x - w / z } else { x + z };
                    wi[nu - 1] = 0.0;
                    wi[nu] = 0.0;
                } else {
                    wr[nu - 1] = x + p;
                    wr[nu] = x + p;
                    wi[nu - 1] = -z;
                    wi[nu] = z;
                }
                nn -= 2;
                break;
            }
            if its == 60 {
                return Err(Error::EigenNoConvergence {
                    residual: a[(nu, nu - 1)].abs() / anorm,
                });
            }
            if its > 0 && its % 10 == 0 {
                t += x;
                for i in 0..=nu {
                    a[(i, i)] -= x;
                }
                let s = a[(nu, nu - 1)].abs() + a[(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            let (mut p, mut q, mut r);
            let mut m = nu - 2;
            loop {
                let z = a[(m, m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[(m + 1, m)] + a[(m, m + 1)];
                q = a[(m + 1, m + 1)] - z - rr - ss;
                r = a[(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nu {
                a[(i, i - 2)] = 0.0;
                if i != m + 2 {
                    a[(i, i - 3)] = 0.0;
                }
            }
            let mut k = m;
            while k < nu {
                let mut xk = 0.0;
                if k != m {
                    p = a[(k, k - 1)];
                    q = a[(k + 1, k - 1)];
                    r = if k != nu - 1 { a[(k + 2, k - 1)] } else { 0.0 };
                    xk = p.abs() + q.abs() + r.abs();
                    if xk != 0.0 {
                        p /= xk;
                        q /= xk;
                        r /= xk;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[(k, k - 1)] = -a[(k, k - 1)];
                        }
                    } else {
                        a[(k, k - 1)] = -s * xk;
                    }
                    p += s;
                    let xx = p / s;
                    let yy = q / s;
                    let zz = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = a[(k, j)] + q * a[(k + 1, j)];
                        if k != nu - 1 {
                            pp += r * a[(k + 2, j)];
                            a[(k + 2, j)] -= pp * zz;
                        }
                        a[(k + 1, j)] -= pp * yy;
                        a[(k, j)] -= pp * xx;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for i in l..=mmin {
                        let mut pp = xx * a[(i, k)] + yy * a[(i, k + 1)];
                        if k != nu - 1 {
                            pp += zz * a[(i, k + 2)];
                            a[(i, k + 2)] -= pp * r;
                        }
                        a[(i, k + 1)] -= pp * q;
                        a[(i, k)] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(wr.into_iter().zip(wi).map(|(re, im)| Complex64::new(re, im)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn diagonal() {
        let d = [c(1.0, 2.0), c(-3.0, 0.5), c(0.0, -1.0), c(2.0, 0.0)];
        let m = CMat::from_diagonal(&DVector::from_row_slice(&d));
        let ev = sorted(complex_eigenvalues(&m).unwrap());
        let ex = sorted(d.to_vec());
        for (a, b) in ev.iter().zip(&ex) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn rotation_generator() {
        let m = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]);
        let ev = sorted(complex_eigenvalues(&m).unwrap());
        assert!((ev[0] - c(0.0, -1.0)).norm() < 1e-12);
        assert!((ev[1] - c(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn balancing_preserves_trace() {
        let m = CMat::from_fn(5, 5, |r, col| c((r * 7 + col) as f64 * 1e3f64.powi(r as i32 - 2), 0.1 * col as f64));
        let b = balance(&m);
        assert!((b.trace() - m.trace()).norm() < 1e-9 * m.trace().norm());
    }
}
