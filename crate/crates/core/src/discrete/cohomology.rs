//! Inhomogeneous group cochains with trivial coefficients, the coboundary
//! test over `ℤ_n`, and the averaging homotopy over `ℚ`.

use std::ops::{Add, Sub};

use num_rational::Rational64;

use crate::error::{Error, Result};

use super::table::FiniteGroupTable;

/// Orders up to this size are decided by exhaustive search.
pub const EXHAUSTIVE_LIMIT: usize = 8;

/// A `ℤ_n`-valued `k`-cochain on a group of order `N`, stored row-major
/// over `G^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModCochain {
    arity: usize,
    order: usize,
    modulus: u64,
    values: Vec<u64>,
}

impl ModCochain {
    pub fn new(arity: usize, order: usize, modulus: u64, values: Vec<u64>) -> Self {
        assert_eq!(values.len(), order.pow(arity as u32), "cochain has the wrong number of values");
        let values = values.into_iter().map(|v| v % modulus).collect();
        ModCochain {
            arity,
            order,
            modulus,
            values,
        }
    }

    pub fn zero(arity: usize, order: usize, modulus: u64) -> Self {
        Self::new(arity, order, modulus, vec![0; order.pow(arity as u32)])
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn get(&self, args: &[usize]) -> u64 {
        self.values[flat_index(args, self.order)]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    /// Zero whenever an argument is the identity.
    pub fn is_normalized(&self, g: &FiniteGroupTable) -> bool {
        let e = g.identity();
        (0..self.values.len()).all(|i| {
            let args = unflatten(i, self.arity, self.order);
            !args.contains(&e) || self.values[i] == 0
        })
    }

    pub fn coboundary(&self, g: &FiniteGroupTable) -> ModCochain {
        let lifted: Vec<i64> = self.values.iter().map(|&v| v as i64).collect();
        let n = self.modulus as i64;
        let values = coboundary_values(&lifted, self.arity, g, 0)
            .into_iter()
            .map(|v| v.rem_euclid(n) as u64)
            .collect();
        ModCochain::new(self.arity + 1, self.order, self.modulus, values)
    }

    /// Representatives in `0..n` as integers.
    pub fn lift(&self) -> Vec<i64> {
        self.values.iter().map(|&v| v as i64).collect()
    }
}

pub(crate) fn flat_index(args: &[usize], order: usize) -> usize {
    args.iter().fold(0, |acc, &a| acc * order + a)
}

pub(crate) fn unflatten(mut index: usize, arity: usize, order: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = index % order;
        index /= order;
    }
    out
}

/// `(δf)(g₁,…,g_{k+1}) = f(g₂,…) + Σ_{i=1}^{k} (−1)^i f(…, g_i g_{i+1}, …)
/// + (−1)^{k+1} f(g₁,…,g_k)` for a `k`-cochain given by its values.
pub fn coboundary_values<T>(values: &[T], arity: usize, g: &FiniteGroupTable, zero: T) -> Vec<T>
where
    T: Copy + Add<Output = T> + Sub<Output = T>,
{
    let n = g.order();
    let total = n.pow(arity as u32 + 1);
    (0..total)
        .map(|idx| {
            let args = unflatten(idx, arity + 1, n);
            let mut acc = zero;
            for i in 0..=arity + 1 {
                let face: Vec<usize> = if i == 0 {
                    args[1..].to_vec()
                } else if i == arity + 1 {
                    args[..arity].to_vec()
                } else {
                    let mut f = args[..i - 1].to_vec();
                    f.push(g.mul(args[i - 1], args[i]));
                    f.extend_from_slice(&args[i + 1..]);
                    f
                };
                let v = values[flat_index(&face, n)];
                acc = if i % 2 == 0 { acc + v } else { acc - v };
            }
            acc
        })
        .collect()
}

/// `(Hf)(g₂,…,g_k) = (1/|G|) Σ_h f(h, g₂,…,g_k)`.
pub fn averaging_homotopy(values: &[Rational64], arity: usize, g: &FiniteGroupTable) -> Vec<Rational64> {
    assert!(arity >= 1);
    let n = g.order();
    let inner = n.pow(arity as u32 - 1);
    let scale = Rational64::new(1, n as i64);
    (0..inner)
        .map(|j| (0..n).map(|h| values[h * inner + j]).fold(Rational64::from_integer(0), |a, b| a + b) * scale)
        .collect()
}

/// Outcome of [`is_coboundary`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoboundaryVerdict {
    /// `c = δb` with this `b`.
    Trivial(ModCochain),
    Nontrivial,
}

impl CoboundaryVerdict {
    pub fn is_trivial(&self) -> bool {
        matches!(self, CoboundaryVerdict::Trivial(_))
    }
}

fn check_cocycle(c: &ModCochain, g: &FiniteGroupTable) -> Result<()> {
    if c.arity != 2 || c.order != g.order() {
        return Err(Error::Precondition(format!(
            "expected a 2-cochain on a group of order {}, got arity {} on order {}",
            g.order(),
            c.arity,
            c.order
        )));
    }
    let dc = c.coboundary(g);
    if let Some(i) = dc.values.iter().position(|&v| v != 0) {
        let a = unflatten(i, 3, g.order());
        return Err(Error::Precondition(format!(
            "not a cocycle: (δc)({},{},{}) = {}",
            a[0], a[1], a[2], dc.values[i]
        )));
    }
    Ok(())
}

/// Decides whether the 2-cocycle `c` is `δb` for a `ℤ_n`-valued `b`.
pub fn is_coboundary(c: &ModCochain, g: &FiniteGroupTable) -> Result<CoboundaryVerdict> {
    check_cocycle(c, g)?;
    if g.order() <= EXHAUSTIVE_LIMIT {
        Ok(solve_exhaustive(c, g))
    } else {
        solve_elimination(c, g)
    }
}

/// Tries every `b` with `b(e) = c(e,e)`, in lexicographic order.
pub fn solve_exhaustive(c: &ModCochain, g: &FiniteGroupTable) -> CoboundaryVerdict {
    let (n, m) = (g.order(), c.modulus);
    let e = g.identity();
    let free: Vec<usize> = (0..n).filter(|&x| x != e).collect();
    let mut b = vec![0u64; n];
    b[e] = c.get(&[e, e]);
    let combos = m.checked_pow(free.len() as u32).expect("search space fits in u64");
    for code in 0..combos {
        let mut rest = code;
        for &x in free.iter().rev() {
            b[x] = rest % m;
            rest /= m;
        }
        let candidate = ModCochain::new(1, n, m, b.clone());
        if candidate.coboundary(g) == *c {
            return CoboundaryVerdict::Trivial(candidate);
        }
    }
    CoboundaryVerdict::Nontrivial
}

/// Solves `b(g₂) − b(g₁g₂) + b(g₁) ≡ c(g₁,g₂)` by elimination over `ℤ_n`.
pub fn solve_elimination(c: &ModCochain, g: &FiniteGroupTable) -> Result<CoboundaryVerdict> {
    let (n, m) = (g.order(), c.modulus as i128);
    let mut rows = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let mut row = vec![0i128; n + 1];
            row[b] += 1;
            row[g.mul(a, b)] -= 1;
            row[a] += 1;
            row[n] = c.get(&[a, b]) as i128;
            rows.push(row);
        }
    }
    match solve_mod(rows, n, m) {
        None => Ok(CoboundaryVerdict::Nontrivial),
        Some(x) => {
            let witness = ModCochain::new(1, n, c.modulus, x);
            if witness.coboundary(g) != *c {
                return Err(Error::Contract(format!(
                    "elimination over ℤ_{m} produced a witness that does not reproduce the cocycle"
                )));
            }
            Ok(CoboundaryVerdict::Trivial(witness))
        }
    }
}

fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, s, t) = egcd(b, a % b);
        (g, t, s - (a / b) * t)
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    egcd(a, b).0
}

/// Solves `A x ≡ y (mod m)` for an augmented matrix with `k` unknowns.
///
/// Rows are brought to echelon form with unimodular 2×2 operations built from
/// extended gcds; each non-unit pivot row also contributes its annihilator
/// multiple, which keeps every consequence of the system visible to
/// back-substitution. Free unknowns are set to zero.
pub fn solve_mod(mut rows: Vec<Vec<i128>>, k: usize, m: i128) -> Option<Vec<u64>> {
    let reduce = |row: &mut Vec<i128>| row.iter_mut().for_each(|x| *x = x.rem_euclid(m));
    rows.iter_mut().for_each(|r| reduce(r));
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..k {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][col] != 0) else { continue };
        rows.swap(r, p);
        let mut i = r + 1;
        while i < rows.len() {
            if rows[i][col] != 0 {
                let (a, b) = (rows[r][col], rows[i][col]);
                let (g, s, t) = egcd(a, b);
                let (x, y) = (a / g, b / g);
                let (top, bottom): (Vec<i128>, Vec<i128>) = rows[r]
                    .iter()
                    .zip(&rows[i])
                    .map(|(&u, &v)| ((s * u + t * v).rem_euclid(m), (y * u - x * v).rem_euclid(m)))
                    .unzip();
                rows[r] = top;
                rows[i] = bottom;
            }
            i += 1;
        }
        let pivot = rows[r][col];
        let g = gcd(pivot, m);
        if g > 1 {
            let ann = m / g;
            let mut extra: Vec<i128> = rows[r].iter().map(|&v| v * ann).collect();
            reduce(&mut extra);
            if extra.iter().any(|&v| v != 0) {
                rows.push(extra);
            }
        }
        pivots.push((r, col));
        r += 1;
    }
    if rows[r..].iter().any(|row| row[k] != 0) {
        return None;
    }
    let mut x = vec![0i128; k];
    for &(row, col) in pivots.iter().rev() {
        let rhs = (rows[row][k] - (col + 1..k).map(|j| rows[row][j] * x[j]).sum::<i128>()).rem_euclid(m);
        let a = rows[row][col];
        let g = gcd(a, m);
        if rhs % g != 0 {
            return None;
        }
        let (mg, ag) = (m / g, a / g);
        let inv = egcd(ag.rem_euclid(mg), mg).1.rem_euclid(mg);
        x[col] = ((rhs / g) * inv).rem_euclid(mg);
    }
    Some(x.into_iter().map(|v| v as u64).collect())
}
