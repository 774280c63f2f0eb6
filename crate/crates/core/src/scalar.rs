//! Scalar abstraction so the kinematics can run on plain floats and on
//! forward-mode dual numbers (for exact shape derivatives).

use num_dual::DualNum;

pub trait Scalar: DualNum<Primitive = f64> + Copy + Send + Sync {}

impl<T: DualNum<Primitive = f64> + Copy + Send + Sync> Scalar for T {}

pub(crate) fn cst<T: Scalar>(v: f64) -> T {
    T::from(v)
}

/// Solve `m x = rhs` for a 3x3 system with two right-hand sides by Gaussian
/// elimination with partial pivoting (pivots chosen on the real part).
pub(crate) fn solve3x2<T: Scalar>(mut m: [[T; 3]; 3], mut rhs: [[T; 2]; 3]) -> [[T; 2]; 3] {
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&a, &b| {
                m[a][col]
                    .re()
                    .abs()
                    .partial_cmp(&m[b][col].re().abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        m.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                let t = m[col][k];
                m[row][k] -= f * t;
            }
            for k in 0..2 {
                let t = rhs[col][k];
                rhs[row][k] -= f * t;
            }
        }
    }
    let mut x = [[T::zero(); 2]; 3];
    for k in 0..2 {
        for row in (0..3).rev() {
            let mut acc = rhs[row][k];
            for j in row + 1..3 {
                acc -= m[row][j] * x[j][k];
            }
            x[row][k] = acc / m[row][row];
        }
    }
    x
}

/// 1-norm condition number of a real 3x3 matrix, via the adjugate inverse.
pub(crate) fn cond3(m: &[[f64; 3]; 3]) -> f64 {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if det == 0.0 || !det.is_finite() {
        return f64::INFINITY;
    }
    let mut inv = [[0.0; 3]; 3];
    for (i, row) in inv.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            // cofactor of (j, i)
            let (r0, r1) = match j {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let (c0, c1) = match i {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let minor = m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            *v = sign * minor / det;
        }
    }
    let norm1 = |a: &[[f64; 3]; 3]| {
        (0..3)
            .map(|j| (0..3).map(|i| a[i][j].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    norm1(m) * norm1(&inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_recovers_known_solution() {
        let m: [[f64; 3]; 3] = [[0.0, 2.0, 1.0], [1.0, -1.0, 0.5], [3.0, 0.2, -2.0]];
        let x = [[1.0, -2.0], [0.5, 0.0], [-1.5, 3.0]];
        let mut rhs = [[0.0; 2]; 3];
        for i in 0..3 {
            for k in 0..2 {
                rhs[i][k] = (0..3).map(|j| m[i][j] * x[j][k]).sum();
            }
        }
        let got = solve3x2(m, rhs);
        for i in 0..3 {
            for k in 0..2 {
                assert!((got[i][k] - x[i][k]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn condition_of_identity_and_singular() {
        let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert!((cond3(&id) - 1.0).abs() < 1e-15);
        let sing = [[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 0.0, 1.0]];
        assert!(cond3(&sing).is_infinite());
    }
}
