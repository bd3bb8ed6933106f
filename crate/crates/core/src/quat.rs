//! Unit quaternions and the four-patch atlas of `S³/±1 = SO(3)`.
//!
//! Chart `k` uses the three components other than `q_k` as coordinates and
//! recovers `q_k = +√(1 − |v|²)`.

use nalgebra::DMatrix;
use rand::RngCore;

use crate::manifold::uniform;

pub type Quat = [f64; 4];

/// Smallest `q_k` a point of chart `k` may have.
pub const CHART_FLOOR: f64 = 0.1;

pub const ONE: Quat = [1.0, 0.0, 0.0, 0.0];

pub fn mul(a: &Quat, b: &Quat) -> Quat {
    let [a0, a1, a2, a3] = *a;
    let [b0, b1, b2, b3] = *b;
    [
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    ]
}

pub fn conj(q: &Quat) -> Quat {
    [q[0], -q[1], -q[2], -q[3]]
}

pub fn neg(q: &Quat) -> Quat {
    [-q[0], -q[1], -q[2], -q[3]]
}

pub fn norm(q: &Quat) -> f64 {
    q.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Matrix of `b ↦ a·b`.
pub fn left_matrix(a: &Quat) -> DMatrix<f64> {
    let [w, x, y, z] = *a;
    DMatrix::from_row_slice(4, 4, &[w, -x, -y, -z, x, w, -z, y, y, z, w, -x, z, -y, x, w])
}

/// Matrix of `a ↦ a·b`.
pub fn right_matrix(b: &Quat) -> DMatrix<f64> {
    let [w, x, y, z] = *b;
    DMatrix::from_row_slice(4, 4, &[w, -x, -y, -z, x, w, z, -y, y, -z, w, x, z, y, -x, w])
}

/// Indices other than `k`, increasing.
pub fn others(k: usize) -> [usize; 3] {
    let mut out = [0; 3];
    let mut n = 0;
    for i in 0..4 {
        if i != k {
            out[n] = i;
            n += 1;
        }
    }
    out
}

/// Index of the largest component in absolute value.
pub fn best_chart(q: &Quat) -> usize {
    (0..4)
        .max_by(|&i, &j| q[i].abs().total_cmp(&q[j].abs()).then(j.cmp(&i)))
        .unwrap_or(0)
}

pub fn from_chart(k: usize, v: &[f64]) -> Quat {
    let r2: f64 = v.iter().map(|x| x * x).sum();
    let mut q = [0.0; 4];
    for (slot, &i) in others(k).iter().enumerate() {
        q[i] = v[slot];
    }
    q[k] = (1.0 - r2).max(0.0).sqrt();
    q
}

/// Coordinates of `±q` in chart `k` and whether the sign was flipped;
/// `None` when `|q_k|` is below the chart floor.
pub fn to_chart(k: usize, q: &Quat) -> Option<(Vec<f64>, bool)> {
    if q[k].abs() <= CHART_FLOOR {
        return None;
    }
    let flip = q[k] < 0.0;
    let s = if flip { -1.0 } else { 1.0 };
    Some((others(k).iter().map(|&i| s * q[i]).collect(), flip))
}

/// Whether ball coordinates respect the chart floor.
pub fn in_chart(v: &[f64]) -> bool {
    v.iter().map(|x| x * x).sum::<f64>() < 1.0 - CHART_FLOOR * CHART_FLOOR
}

/// `dq/dv` in chart `k`, a 4×3 matrix.
pub fn chart_jacobian(k: usize, v: &[f64]) -> DMatrix<f64> {
    let q = from_chart(k, v);
    let mut j = DMatrix::zeros(4, 3);
    for (slot, &i) in others(k).iter().enumerate() {
        j[(i, slot)] = 1.0;
        j[(k, slot)] = -v[slot] / q[k];
    }
    j
}

/// `dv/dq` for a chart-`k` representative with sign `s`: the 3×4 selection
/// of the non-`k` rows, scaled by `s`.
pub fn chart_projection(k: usize, s: f64) -> DMatrix<f64> {
    let mut p = DMatrix::zeros(3, 4);
    for (slot, &i) in others(k).iter().enumerate() {
        p[(slot, i)] = s;
    }
    p
}

/// Rotation matrix of `q`, written as homogeneous quadratics so that the
/// entries are even in `q`.
pub fn rotation(q: &Quat) -> [[f64; 3]; 3] {
    let [w, x, y, z] = *q;
    [
        [w * w + x * x - y * y - z * z, 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), w * w - x * x + y * y - z * z, 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), w * w - x * x - y * y + z * z],
    ]
}

/// Gradient of `rotation(q)[i][j]` with respect to `q`.
pub fn rotation_gradient(q: &Quat, i: usize, j: usize) -> Quat {
    let [w, x, y, z] = *q;
    let t = 2.0;
    match (i, j) {
        (0, 0) => [t * w, t * x, -t * y, -t * z],
        (0, 1) => [-t * z, t * y, t * x, -t * w],
        (0, 2) => [t * y, t * z, t * w, t * x],
        (1, 0) => [t * z, t * y, t * x, t * w],
        (1, 1) => [t * w, -t * x, t * y, -t * z],
        (1, 2) => [-t * x, -t * w, t * z, t * y],
        (2, 0) => [-t * y, t * z, -t * w, t * x],
        (2, 1) => [t * x, t * w, t * z, t * y],
        (2, 2) => [t * w, -t * x, -t * y, t * z],
        _ => panic!("rotation index out of range"),
    }
}

/// Uniform random unit quaternion.
pub fn random_unit(rng: &mut dyn RngCore) -> Quat {
    loop {
        let q = [
            uniform(rng, -1.0, 1.0),
            uniform(rng, -1.0, 1.0),
            uniform(rng, -1.0, 1.0),
            uniform(rng, -1.0, 1.0),
        ];
        let n = norm(&q);
        if n > 0.1 && n <= 1.0 {
            return q.map(|c| c / n);
        }
    }
}

/// Rotation by `angle` about a unit `axis`.
pub fn axis_angle(axis: [f64; 3], angle: f64) -> Quat {
    let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let (s, c) = (0.5 * angle).sin_cos();
    [c, s * axis[0] / n, s * axis[1] / n, s * axis[2] / n]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mat3_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        out
    }

    #[test]
    fn left_and_right_matrices_reproduce_the_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let (a, b) = (random_unit(&mut rng), random_unit(&mut rng));
            let ab = mul(&a, &b);
            let via_l = &left_matrix(&a) * DMatrix::from_column_slice(4, 1, &b);
            let via_r = &right_matrix(&b) * DMatrix::from_column_slice(4, 1, &a);
            for i in 0..4 {
                assert!((via_l[i] - ab[i]).abs() < 1e-14);
                assert!((via_r[i] - ab[i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rotation_is_a_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let (a, b) = (random_unit(&mut rng), random_unit(&mut rng));
            let lhs = rotation(&mul(&a, &b));
            let rhs = mat3_mul(&rotation(&a), &rotation(&b));
            for i in 0..3 {
                for j in 0..3 {
                    assert!((lhs[i][j] - rhs[i][j]).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn rotation_gradient_matches_differences() {
        let q = [0.3, -0.5, 0.7, 0.2];
        let h = 1e-6;
        for i in 0..3 {
            for j in 0..3 {
                let g = rotation_gradient(&q, i, j);
                for c in 0..4 {
                    let (mut qp, mut qm) = (q, q);
                    qp[c] += h;
                    qm[c] -= h;
                    let fd = (rotation(&qp)[i][j] - rotation(&qm)[i][j]) / (2.0 * h);
                    assert!((fd - g[c]).abs() < 1e-8, "R{i}{j} d{c}");
                }
            }
        }
    }

    #[test]
    fn chart_roundtrip_and_jacobian() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let q = random_unit(&mut rng);
            let k = best_chart(&q);
            let (v, flip) = to_chart(k, &q).unwrap();
            let back = from_chart(k, &v);
            let s = if flip { -1.0 } else { 1.0 };
            for i in 0..4 {
                assert!((back[i] - s * q[i]).abs() < 1e-14);
            }
            let j = chart_jacobian(k, &v);
            let h = 1e-6;
            for c in 0..3 {
                let (mut vp, mut vm) = (v.clone(), v.clone());
                vp[c] += h;
                vm[c] -= h;
                let (qp, qm) = (from_chart(k, &vp), from_chart(k, &vm));
                for r in 0..4 {
                    assert!(((qp[r] - qm[r]) / (2.0 * h) - j[(r, c)]).abs() < 1e-8);
                }
            }
        }
    }
}
