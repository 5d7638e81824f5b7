//! Eigenvalues of small Hermitian matrices by cyclic Jacobi rotations.
//!
//! A Hermitian `n×n` matrix `H = A + iB` is embedded as the real symmetric
//! `2n×2n` matrix `[[A, −B], [B, A]]`, whose spectrum is that of `H` with
//! every eigenvalue doubled. Sorting and taking every other value recovers
//! the spectrum of `H`.

use super::Operator;
use crate::tolerance::JACOBI_TOL;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a real symmetric matrix (row-major), ascending.
pub fn symmetric_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    debug_assert_eq!(a.len(), n * n);
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() < f64::MIN_POSITIVE {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(|x, y| x.total_cmp(y));
    eig
}

/// Eigenvalues of a Hermitian operator, ascending. The anti-Hermitian part,
/// if any, is ignored.
pub fn hermitian_eigenvalues(h: &Operator) -> Vec<f64> {
    let n = h.dim();
    let m = 2 * n;
    let mut a = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = (h.get(i, j) + h.get(j, i).conj()) * 0.5;
            a[i * m + j] = z.re;
            a[(i + n) * m + j + n] = z.re;
            a[i * m + j + n] = -z.im;
            a[(i + n) * m + j] = z.im;
        }
    }
    symmetric_eigenvalues(a, m).into_iter().step_by(2).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    #[test]
    fn diagonal_matrix() {
        let h = Operator::diagonal(&[C64::new(3.0, 0.0), C64::new(-1.0, 0.0), C64::new(2.0, 0.0)]);
        let e = hermitian_eigenvalues(&h);
        assert_eq!(e.len(), 3);
        for (got, want) in e.iter().zip([-1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-13);
        }
    }

    #[test]
    fn pauli_y_spectrum() {
        let i = C64::new(0.0, 1.0);
        let y =
            Operator::from_entries(vec![C64::new(0.0, 0.0), -i, i, C64::new(0.0, 0.0)]).unwrap();
        let e = hermitian_eigenvalues(&y);
        assert!((e[0] + 1.0).abs() < 1e-13 && (e[1] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn real_symmetric_two_by_two() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let e = symmetric_eigenvalues(vec![2.0, 1.0, 1.0, 2.0], 2);
        assert!((e[0] - 1.0).abs() < 1e-14 && (e[1] - 3.0).abs() < 1e-14);
    }
}
