//! Dense symmetric positive-definite solves for the small restricted Gram systems.

use crate::Real;

const NORM_ESTIMATE_STEPS: usize = 5;

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&p, &q)| acc + p * q)
}

/// In-place lower Cholesky factor of a row-major `n × n` SPD matrix.
/// Returns `false` when a pivot is not strictly positive.
pub(crate) fn cholesky_in_place<T: Real>(a: &mut [T], n: usize) -> bool {
    debug_assert_eq!(a.len(), n * n);
    for j in 0..n {
        let row_j = &mut a[j * n..(j + 1) * n];
        let d = row_j[j] - dot(&row_j[..j], &row_j[..j]);
        if !(d > T::zero()) || !d.is_finite() {
            return false;
        }
        let d = d.sqrt();
        row_j[j] = d;
        for i in j + 1..n {
            let (upper, lower) = a.split_at_mut(i * n);
            let row_j = &upper[j * n..j * n + j];
            let row_i = &mut lower[..n];
            row_i[j] = (row_i[j] - dot(&row_i[..j], row_j)) / d;
        }
    }
    for i in 0..n {
        a[i * n + i + 1..(i + 1) * n].iter_mut().for_each(|v| *v = T::zero());
    }
    true
}

/// Solves `L Lᵀ x = b` in place given the factor from [`cholesky_in_place`].
pub(crate) fn cholesky_solve<T: Real>(l: &[T], n: usize, b: &mut [T]) {
    for i in 0..n {
        let row = &l[i * n..i * n + i];
        b[i] = (b[i] - dot(row, &b[..i])) / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s = s - l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

fn norm1<T: Real>(x: &[T]) -> T {
    x.iter().map(|&v| num_traits::Float::abs(v)).sum()
}

/// 1-norm condition estimate `‖A‖₁ · est(‖A⁻¹‖₁)` of an SPD matrix, with the
/// inverse norm from Hager's estimator (Higham's refinement) through the
/// Cholesky factor `l`. The estimate never exceeds the true value.
pub(crate) fn condition_estimate<T: Real>(a: &[T], l: &[T], n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let a_norm = (0..n)
        .map(|j| (0..n).map(|i| num_traits::Float::abs(a[i * n + j])).sum::<T>())
        .fold(T::zero(), T::max);
    let mut x = vec![T::one() / T::of_usize(n); n];
    let mut inv_norm = T::zero();
    let mut last_j = usize::MAX;
    for _ in 0..NORM_ESTIMATE_STEPS {
        let mut y = x.clone();
        cholesky_solve(l, n, &mut y);
        inv_norm = inv_norm.max(norm1(&y));
        let mut z: Vec<T> = y.iter().map(|&v| if v >= T::zero() { T::one() } else { -T::one() }).collect();
        cholesky_solve(l, n, &mut z);
        let (j, zmax) = z
            .iter()
            .enumerate()
            .map(|(i, &v)| (i, num_traits::Float::abs(v)))
            .fold((0, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if zmax <= dot(&z, &x) || j == last_j {
            break;
        }
        last_j = j;
        x.iter_mut().for_each(|v| *v = T::zero());
        x[j] = T::one();
    }
    // Alternating-sign probe guards against the estimator stalling.
    let mut probe: Vec<T> = (0..n)
        .map(|i| {
            let mag = T::one() + T::of_usize(i) / T::of_usize(n.max(2) - 1);
            if i % 2 == 0 { mag } else { -mag }
        })
        .collect();
    cholesky_solve(l, n, &mut probe);
    let alt = T::lit(2.0) * norm1(&probe) / T::lit(3.0 * n as f64);
    inv_norm = inv_norm.max(alt);
    (a_norm * inv_norm).as_f64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat_vec(a: &[f64], n: usize, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(&a[i * n..(i + 1) * n], x);
        }
    }

    #[test]
    fn solves_small_spd_system() {
        let a: [f64; 9] = [4.0, 2.0, 0.6, 2.0, 5.0, 1.0, 0.6, 1.0, 3.0];
        let mut l = a;
        assert!(cholesky_in_place(&mut l, 3));
        let x_true = [1.0, -2.0, 0.5];
        let mut b = [0.0; 3];
        mat_vec(&a, 3, &x_true, &mut b);
        cholesky_solve(&l, 3, &mut b);
        for (x, t) in b.iter().zip(&x_true) {
            assert!((x - t).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_indefinite() {
        let mut a = [1.0, 2.0, 2.0, 1.0];
        assert!(!cholesky_in_place(&mut a, 2));
        let mut z = [0.0; 4];
        assert!(!cholesky_in_place(&mut z, 2));
    }

    #[test]
    fn condition_of_diagonal_matrix() {
        let a = [100.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.01];
        let mut l = a;
        assert!(cholesky_in_place(&mut l, 3));
        let c = condition_estimate(&a, &l, 3);
        assert!((c / 1e4 - 1.0).abs() < 1e-6, "{c}");
    }

    #[test]
    fn condition_of_hilbert_matrices() {
        // Exact 1-norm condition numbers: n=4 → 28375, n=8 → 3.387e10.
        for (n, want) in [(4usize, 28375.0), (8, 3.387_279e10)] {
            let a: Vec<f64> = (0..n * n).map(|k| 1.0 / ((k / n + k % n + 1) as f64)).collect();
            let mut l = a.clone();
            assert!(cholesky_in_place(&mut l, n));
            let c = condition_estimate(&a, &l, n);
            assert!(c <= want * 1.001 && c >= want / 3.0, "n={n}: {c}");
        }
    }
}
