//! Reference computations that share nothing with the library: direct
//! summation, adaptive Simpson, Faddeev-LeVerrier with Durand-Kerner, and
//! complex Jacobi rotations.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use sptri::spcore::DenseMatrix;
use sptri::trigpoly::TrigPoly;

/// `sum_j c_j e^{ijt}` by plain summation; `coeffs` sorted by frequency.
pub fn direct_eval(coeffs: &[(i64, Complex64)], t: f64) -> Complex64 {
    let Some(&(lo, _)) = coeffs.first() else {
        return Complex64::new(0.0, 0.0);
    };
    let z = Complex64::new(t.cos(), t.sin());
    let mut power = Complex64::new((lo as f64 * t).cos(), (lo as f64 * t).sin());
    let mut at = lo;
    let mut sum = Complex64::new(0.0, 0.0);
    for &(j, c) in coeffs {
        while at < j {
            power *= z;
            at += 1;
        }
        sum += c * power;
    }
    sum
}

pub fn coeff_list(f: &TrigPoly) -> Vec<(i64, Complex64)> {
    f.iter().collect()
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson on `[a, b]` with absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// `(1/2pi int_0^{2pi} |f|^p)^{1/p}` with `f` summed directly. The circle
/// is cut into `panels` equal pieces (plus any `breaks`) before adapting.
pub fn simpson_lp(coeffs: &[(i64, Complex64)], p: f64, panels: usize, breaks: &[f64], tol: f64) -> f64 {
    let g = |t: f64| direct_eval(coeffs, t).norm().powf(p);
    let mut cuts: Vec<f64> = (0..=panels).map(|i| 2.0 * PI * i as f64 / panels as f64).collect();
    cuts.extend(breaks.iter().copied().filter(|&b| b > 0.0 && b < 2.0 * PI));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let total: f64 = cuts
        .windows(2)
        .map(|w| adaptive_simpson(&g, w[0], w[1], tol / panels as f64))
        .sum();
    (total / (2.0 * PI)).powf(1.0 / p)
}

/// Simpson oracle for a polynomial with no known zeros.
pub fn simpson_lp_poly(f: &TrigPoly, p: f64) -> f64 {
    let coeffs = coeff_list(f);
    let l2: f64 = coeffs.iter().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt();
    let panels = 8 * (f.span() + 1);
    simpson_lp(&coeffs, p, panels, &[], 1e-10 * l2.powf(p).max(1e-300))
}

/// `A^H A` as a dense row-major complex array.
pub fn gram(a: &DenseMatrix) -> Vec<Vec<Complex64>> {
    let (rows, cols) = a.dims();
    (0..cols)
        .map(|i| {
            (0..cols)
                .map(|j| (0..rows).map(|r| a.get(r, i).conj() * a.get(r, j)).sum())
                .collect()
        })
        .collect()
}

/// Characteristic polynomial `det(xI - H)` coefficients, highest degree
/// first, by Faddeev-LeVerrier.
pub fn char_poly(h: &[Vec<Complex64>]) -> Vec<Complex64> {
    let n = h.len();
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut c = vec![one];
    let mut m = vec![vec![zero; n]; n];
    for k in 1..=n {
        // M_k = H M_{k-1} + c_{k-1} I, c_k = -tr(H M_k) / k
        let mut next = vec![vec![zero; n]; n];
        for i in 0..n {
            for j in 0..n {
                next[i][j] = (0..n).map(|l| h[i][l] * m[l][j]).sum::<Complex64>();
            }
            next[i][i] += c[k - 1];
        }
        m = next;
        let tr: Complex64 = (0..n)
            .map(|i| (0..n).map(|l| h[i][l] * m[l][i]).sum::<Complex64>())
            .sum();
        c.push(-tr / k as f64);
    }
    c
}

/// All roots of a monic polynomial (highest degree first) by Durand-Kerner.
pub fn durand_kerner(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let bound = 1.0 + c[1..].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|i| seed.powu(i as u32) * bound).collect();
    let eval = |x: Complex64| c.iter().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a);
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let denom: Complex64 = (0..n).filter(|&j| j != i).map(|j| z[i] - z[j]).product();
            let step = eval(z[i]) / denom;
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 * bound {
            break;
        }
    }
    // Newton polish on each root.
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (mut v, mut d) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            for &a in c {
                d = d * *zi + v;
                v = v * *zi + a;
            }
            if d.norm() > 0.0 {
                *zi -= v / d;
            }
        }
    }
    z
}

/// Singular values from the roots of the characteristic polynomial of
/// `A^H A`, largest first.
pub fn charpoly_singular_values(a: &DenseMatrix) -> Vec<f64> {
    let (rows, cols) = a.dims();
    let roots = durand_kerner(&char_poly(&gram(a)));
    let mut ev: Vec<f64> = roots.iter().map(|z| z.re.max(0.0)).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev.into_iter().take(rows.min(cols)).map(f64::sqrt).collect()
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
pub fn hermitian_eigenvalues(h: &[Vec<Complex64>]) -> Vec<f64> {
    let n = h.len();
    let mut a: Vec<Vec<Complex64>> = h.to_vec();
    let scale: f64 = a.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().max(1e-300);
    for _ in 0..60 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j].norm_sqr())
            .sum();
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let g = a[p][q];
                let r = g.norm();
                // Tiny entries would give a phase off the unit circle.
                if r <= 1e-20 * scale.sqrt() {
                    continue;
                }
                // Rotate with U = D R: D scales column q by conj(phase) so
                // the (p, q) entry becomes real, R is the real rotation.
                let ph = g / r;
                let (app, aqq) = (a[p][p].re, a[q][q].re);
                let theta = 0.5 * (2.0 * r).atan2(aqq - app);
                let (s, c) = theta.sin_cos();
                let upp = Complex64::new(c, 0.0);
                let upq = Complex64::new(s, 0.0);
                let uqp = -ph.conj() * s;
                let uqq = ph.conj() * c;
                // A <- A U
                for row in a.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = x * upp + y * uqp;
                    row[q] = x * upq + y * uqq;
                }
                // A <- U^H A
                #[allow(clippy::needless_range_loop)]
                for k in 0..n {
                    let (x, y) = (a[p][k], a[q][k]);
                    a[p][k] = upp.conj() * x + uqp.conj() * y;
                    a[q][k] = upq.conj() * x + uqq.conj() * y;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i].re).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// Singular values as square roots of the Jacobi eigenvalues of `A^H A`.
pub fn jacobi_singular_values(a: &DenseMatrix) -> Vec<f64> {
    let (rows, cols) = a.dims();
    hermitian_eigenvalues(&gram(a))
        .into_iter()
        .take(rows.min(cols))
        .map(|e| e.max(0.0).sqrt())
        .collect()
}

/// Largest absolute difference between two spectra, relative to the
/// largest value (or 1 for tiny spectra).
pub fn spectrum_gap(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let scale = a.first().copied().unwrap_or(0.0).max(1.0);
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

pub fn quasinorm_of(values: &[f64], p: f64) -> f64 {
    values.iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p)
}
