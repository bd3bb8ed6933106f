use std::fmt;
use std::sync::Arc;

use rand::RngCore;

use crate::error::{Error, Result};

use super::map::SmoothMap;
use super::space::{mat_vec, richardson, richardson_vec, uniform, ChartedSpace, Point};
use super::DEFAULT_STEP;

pub type FormEvalFn = Arc<dyn Fn(&Point, &[Vec<f64>]) -> Result<f64> + Send + Sync>;

/// A real-valued differential form of fixed degree, given as an alternating
/// multilinear evaluator on tangent vectors in the chart of the query point.
#[derive(Clone)]
pub struct FormField {
    degree: usize,
    base: Arc<ChartedSpace>,
    label: String,
    eval: FormEvalFn,
    exterior: Option<Arc<FormField>>,
}

impl fmt::Debug for FormField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FormField({}, degree {} on {})", self.label, self.degree, self.base.name())
    }
}

impl FormField {
    pub fn new(
        label: impl Into<String>,
        degree: usize,
        base: &Arc<ChartedSpace>,
        eval: impl Fn(&Point, &[Vec<f64>]) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        FormField {
            degree,
            base: base.clone(),
            label: label.into(),
            eval: Arc::new(eval),
            exterior: None,
        }
    }

    /// Attaches an analytic exterior derivative.
    pub fn with_exterior(mut self, d: FormField) -> Self {
        assert_eq!(d.degree, self.degree + 1, "exterior derivative has wrong degree");
        self.exterior = Some(Arc::new(d));
        self
    }

    pub fn zero(degree: usize, base: &Arc<ChartedSpace>) -> Self {
        FormField::new("0", degree, base, |_, _| Ok(0.0))
    }

    /// The 0-form with constant value `c`.
    pub fn constant(c: f64, base: &Arc<ChartedSpace>) -> Self {
        FormField::new(format!("{c}"), 0, base, move |_, _| Ok(c))
            .with_exterior(FormField::zero(1, base))
    }

    /// `dx_i` for the `i`-th coordinate, read in the chart of the query point.
    pub fn coordinate_differential(base: &Arc<ChartedSpace>, i: usize) -> Self {
        assert!(i < base.dim());
        FormField::new(format!("dx{i}"), 1, base, move |_, v| Ok(v[0][i]))
            .with_exterior(FormField::zero(2, base))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> &Arc<ChartedSpace> {
        &self.base
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn has_exterior(&self) -> bool {
        self.exterior.is_some()
    }

    pub fn evaluate(&self, p: &Point, vectors: &[Vec<f64>]) -> Result<f64> {
        if vectors.len() != self.degree {
            return Err(Error::contract(format!(
                "{}: expected {} tangent vectors, got {}",
                self.label,
                self.degree,
                vectors.len()
            )));
        }
        if vectors.iter().any(|v| v.len() != self.base.dim()) {
            return Err(Error::contract(format!(
                "{}: tangent vector dimension ≠ {}",
                self.label,
                self.base.dim()
            )));
        }
        if self.degree > self.base.dim() {
            return Ok(0.0);
        }
        (self.eval)(p, vectors)
    }
}

/// Directional derivative of `f` at `p` along `v` with constant coordinate
/// fields, by Richardson-extrapolated central differences.
pub(crate) fn directional_derivative(
    space: &ChartedSpace,
    p: &Point,
    v: &[f64],
    h: f64,
    f: impl Fn(&Point) -> Result<f64>,
) -> Result<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let step = h / norm;
    richardson(step, |s| {
        let plus = f(&space.shifted(p, v, s)?)?;
        let minus = f(&space.shifted(p, v, -s)?)?;
        Ok((plus - minus) / (2.0 * s))
    })
}

/// `dω`. Uses the analytic derivative when attached; otherwise
/// `dω(v_0,…,v_q) = Σ_i (−1)^i ∂_{v_i} ω(v_0,…,v̂_i,…,v_q)` by differencing.
pub fn ext_derivative(omega: &FormField) -> FormField {
    ext_derivative_with_step(omega, DEFAULT_STEP)
}

pub fn ext_derivative_with_step(omega: &FormField, h: f64) -> FormField {
    let q = omega.degree;
    let base = omega.base.clone();
    if q + 1 > base.dim() {
        return FormField::zero(q + 1, &base);
    }
    if let Some(d) = &omega.exterior {
        return (**d).clone();
    }
    let inner = omega.clone();
    let space = base.clone();
    FormField::new(format!("d({})", omega.label), q + 1, &base, move |p, vs| {
        let mut total = 0.0;
        for i in 0..=q {
            let rest: Vec<Vec<f64>> = vs
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, v)| v.clone())
                .collect();
            let deriv = directional_derivative(&space, p, &vs[i], h, |x| inner.evaluate(x, &rest))?;
            total += if i % 2 == 0 { deriv } else { -deriv };
        }
        Ok(total)
    })
}

/// `d(arg c)` for a circle-valued `c = e^{i·angle}`, evaluated as
/// `Im(c̄·∂_v c)` so that no branch of `arg` is ever chosen.
pub fn angle_differential(
    label: impl Into<String>,
    base: &Arc<ChartedSpace>,
    angle: impl Fn(&Point) -> Result<f64> + Send + Sync + 'static,
) -> FormField {
    let space = base.clone();
    FormField::new(label, 1, base, move |p, vs| {
        let v = &vs[0];
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(0.0);
        }
        let a0 = angle(p)?;
        let dc = richardson_vec(DEFAULT_STEP / norm, |s| {
            let a = angle(&space.shifted(p, v, s)?)?;
            let b = angle(&space.shifted(p, v, -s)?)?;
            Ok(vec![(a.cos() - b.cos()) / (2.0 * s), (a.sin() - b.sin()) / (2.0 * s)])
        })?;
        Ok(a0.cos() * dc[1] - a0.sin() * dc[0])
    })
}

/// `F*ω`, `(F*ω)(p; v_1,…,v_q) = ω(F(p); J v_1, …, J v_q)`.
pub fn pullback(f: &SmoothMap, omega: &FormField) -> Result<FormField> {
    if !f.target().same_as(&omega.base) {
        return Err(Error::contract(format!(
            "pullback: map {} lands in {}, form {} lives on {}",
            f.name(),
            f.target().name(),
            omega.label,
            omega.base.name()
        )));
    }
    Ok(pullback_unchecked(f, omega))
}

fn pullback_unchecked(f: &SmoothMap, omega: &FormField) -> FormField {
    let map = f.clone();
    let inner = omega.clone();
    let degree = omega.degree;
    let mut out = FormField::new(
        format!("{}*({})", f.name(), omega.label),
        degree,
        f.source(),
        move |p, vs| {
            let image = map.eval(p)?;
            if degree == 0 {
                return inner.evaluate(&image, &[]);
            }
            let jac = map.jacobian(p)?;
            let pushed: Vec<Vec<f64>> = vs.iter().map(|v| mat_vec(&jac, v)).collect();
            inner.evaluate(&image, &pushed)
        },
    );
    if let Some(d) = &omega.exterior {
        out = out.with_exterior(pullback_unchecked(f, d));
    }
    out
}

/// Pointwise `Σ c_i ω_i`.
pub fn linear_combine(coeffs: &[f64], forms: &[FormField]) -> Result<FormField> {
    if coeffs.len() != forms.len() || forms.is_empty() {
        return Err(Error::contract("linear_combine: need matching, nonempty coefficient and form lists"));
    }
    let first = &forms[0];
    for f in forms {
        if f.degree != first.degree || !f.base.same_as(&first.base) {
            return Err(Error::contract(format!(
                "linear_combine: {} (degree {} on {}) does not match {} (degree {} on {})",
                f.label,
                f.degree,
                f.base.name(),
                first.label,
                first.degree,
                first.base.name()
            )));
        }
    }
    Ok(combine_unchecked(coeffs, forms))
}

fn combine_unchecked(coeffs: &[f64], forms: &[FormField]) -> FormField {
    let label = coeffs
        .iter()
        .zip(forms)
        .map(|(c, f)| format!("{c}·{}", f.label))
        .collect::<Vec<_>>()
        .join(" + ");
    let cs = coeffs.to_vec();
    let fs = forms.to_vec();
    let mut out = FormField::new(label, forms[0].degree, &forms[0].base, move |p, vs| {
        let mut total = 0.0;
        for (c, f) in cs.iter().zip(&fs) {
            if *c != 0.0 {
                total += c * f.evaluate(p, vs)?;
            }
        }
        Ok(total)
    });
    if forms.iter().all(|f| f.exterior.is_some()) {
        let ds: Vec<FormField> = forms.iter().map(|f| (**f.exterior.as_ref().unwrap()).clone()).collect();
        out = out.with_exterior(combine_unchecked(coeffs, &ds));
    }
    out
}

/// `c·ω`.
pub fn scale(c: f64, omega: &FormField) -> FormField {
    combine_unchecked(&[c], std::slice::from_ref(omega))
}

pub type SelectFn = Arc<dyn Fn(&Point) -> Result<usize> + Send + Sync>;

/// A form glued from local pieces. `select` picks the piece at the query
/// point; derivatives differentiate that piece only, so a stencil straddling
/// a patch boundary never mixes two local expressions.
pub fn patchwise(
    label: impl Into<String>,
    degree: usize,
    base: &Arc<ChartedSpace>,
    select: SelectFn,
    pieces: Vec<FormField>,
) -> Result<FormField> {
    let label = label.into();
    if pieces.is_empty() {
        return Err(Error::contract(format!("{label}: no pieces")));
    }
    if let Some(bad) = pieces.iter().find(|f| f.degree != degree || !f.base.same_as(base)) {
        return Err(Error::contract(format!(
            "{label}: piece {} is not a {degree}-form on {}",
            bad.label,
            base.name()
        )));
    }
    Ok(patchwise_unchecked(label, degree, base, select, Arc::new(pieces)))
}

fn patchwise_unchecked(
    label: String,
    degree: usize,
    base: &Arc<ChartedSpace>,
    select: SelectFn,
    pieces: Arc<Vec<FormField>>,
) -> FormField {
    let (sel, ps) = (select.clone(), pieces.clone());
    let mut out = FormField::new(label.clone(), degree, base, move |p, vs| {
        let i = sel(p)?;
        ps.get(i)
            .ok_or_else(|| Error::contract(format!("piece index {i} out of range")))?
            .evaluate(p, vs)
    });
    if degree + 1 <= base.dim() {
        let d: Vec<FormField> = pieces.iter().map(ext_derivative).collect();
        out = out.with_exterior(patchwise_unchecked(format!("d({label})"), degree + 1, base, select, Arc::new(d)));
    }
    out
}

/// Alternating shuffle-sum wedge product.
pub fn wedge(alpha: &FormField, beta: &FormField) -> Result<FormField> {
    if !alpha.base.same_as(&beta.base) {
        return Err(Error::contract("wedge: forms live on different spaces"));
    }
    let (p, q) = (alpha.degree, beta.degree);
    let base = alpha.base.clone();
    if p + q > base.dim() {
        return Ok(FormField::zero(p + q, &base));
    }
    let shuffles = shuffles(p, q);
    let (a, b) = (alpha.clone(), beta.clone());
    let mut out = FormField::new(format!("({})∧({})", alpha.label, beta.label), p + q, &base, move |pt, vs| {
        let mut total = 0.0;
        for (sign, left, right) in &shuffles {
            let lv: Vec<Vec<f64>> = left.iter().map(|&i| vs[i].clone()).collect();
            let rv: Vec<Vec<f64>> = right.iter().map(|&i| vs[i].clone()).collect();
            total += sign * a.evaluate(pt, &lv)? * b.evaluate(pt, &rv)?;
        }
        Ok(total)
    });
    if let (Some(da), Some(db)) = (&alpha.exterior, &beta.exterior) {
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        let d = linear_combine(&[1.0, sign], &[wedge(da, beta)?, wedge(alpha, db)?])?;
        out = out.with_exterior(d);
    }
    Ok(out)
}

/// All (p, q)-shuffles with their permutation signs.
fn shuffles(p: usize, q: usize) -> Vec<(f64, Vec<usize>, Vec<usize>)> {
    let n = p + q;
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(p);
    fn rec(
        start: usize,
        n: usize,
        p: usize,
        chosen: &mut Vec<usize>,
        out: &mut Vec<(f64, Vec<usize>, Vec<usize>)>,
    ) {
        if chosen.len() == p {
            let right: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            // inversions: pairs (left i, right j) with j < i
            let inversions: usize = chosen
                .iter()
                .map(|&i| right.iter().filter(|&&j| j < i).count())
                .sum();
            let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
            out.push((sign, chosen.clone(), right));
            return;
        }
        for i in start..n {
            chosen.push(i);
            rec(i + 1, n, p, chosen, out);
            chosen.pop();
        }
    }
    rec(0, n, p, &mut chosen, &mut out);
    out
}

/// Random tangent frame with entries uniform in `[-1, 1]`.
pub fn random_frame(dim: usize, count: usize, rng: &mut dyn RngCore) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| (0..dim).map(|_| uniform(rng, -1.0, 1.0)).collect())
        .collect()
}

/// Largest `|ω(…,v_i,…,v_j,…) + ω(…,v_j,…,v_i,…)|` over sampled frames and
/// adjacent transpositions.
pub fn antisymmetry_residual(omega: &FormField, samples: usize, rng: &mut dyn RngCore) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let q = omega.degree;
    if q < 2 {
        return Ok(0.0);
    }
    for _ in 0..samples {
        let p = omega.base.sample(rng);
        let vs = random_frame(omega.base.dim(), q, rng);
        let base = omega.evaluate(&p, &vs)?;
        for i in 0..q - 1 {
            let mut swapped = vs.clone();
            swapped.swap(i, i + 1);
            worst = worst.max((base + omega.evaluate(&p, &swapped)?).abs());
        }
    }
    Ok(worst)
}

/// Largest deviation from linearity in each slot, `ω(a·u + b·w) − a·ω(u) − b·ω(w)`.
pub fn multilinearity_residual(omega: &FormField, samples: usize, rng: &mut dyn RngCore) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let q = omega.degree;
    let dim = omega.base.dim();
    for _ in 0..samples {
        let p = omega.base.sample(rng);
        let vs = random_frame(dim, q, rng);
        let extra = random_frame(dim, 1, rng).remove(0);
        let (a, b) = (uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0));
        for slot in 0..q {
            let mut mixed = vs.clone();
            mixed[slot] = vs[slot].iter().zip(&extra).map(|(u, w)| a * u + b * w).collect();
            let mut other = vs.clone();
            other[slot] = extra.clone();
            let lhs = omega.evaluate(&p, &mixed)?;
            let rhs = a * omega.evaluate(&p, &vs)? + b * omega.evaluate(&p, &other)?;
            worst = worst.max((lhs - rhs).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn plane() -> Arc<ChartedSpace> {
        ChartedSpace::euclidean("R2", 2, 100.0, 2.0)
    }

    /// `f(x, y) dy`, numeric derivative only.
    fn fdy(base: &Arc<ChartedSpace>, f: fn(f64, f64) -> f64) -> FormField {
        FormField::new("f dy", 1, base, move |p, v| Ok(f(p.coords[0], p.coords[1]) * v[0][1]))
    }

    #[test]
    fn d_of_constant_is_zero() {
        let s = plane();
        let d = ext_derivative(&FormField::new("1", 0, &s, |_, _| Ok(1.0)));
        let p = Point::new(0, vec![0.4, 0.1]);
        assert_eq!(d.evaluate(&p, &[vec![0.3, -2.0]]).unwrap(), 0.0);
    }

    #[test]
    fn d_of_x_dy_is_area_form() {
        let s = plane();
        let d = ext_derivative(&fdy(&s, |x, _| x));
        let p = Point::new(0, vec![0.3, 0.7]);
        let v = d.evaluate(&p, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!((v - 1.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn d_squared_vanishes_numerically() {
        let s = plane();
        let dd = ext_derivative(&ext_derivative(&fdy(&s, |x, _| x.sin())));
        // degree 3 on a surface: identically zero by degree
        assert_eq!(dd.degree(), 3);
        let s3 = ChartedSpace::euclidean("R3", 3, 100.0, 2.0);
        let w = FormField::new("sin(x) dy", 1, &s3, |p, v| Ok(p.coords[0].sin() * p.coords[2].cos() * v[0][1]));
        let ddw = ext_derivative(&ext_derivative(&w));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let p = s3.sample(&mut rng);
            let vs = random_frame(3, 3, &mut rng);
            worst = worst.max(ddw.evaluate(&p, &vs).unwrap().abs());
        }
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn degree_overflow_gives_zero_form() {
        let s = plane();
        let two = wedge(
            &FormField::coordinate_differential(&s, 0),
            &FormField::coordinate_differential(&s, 1),
        )
        .unwrap();
        let d = ext_derivative(&two);
        assert_eq!(d.degree(), 3);
        assert_eq!(d.evaluate(&Point::new(0, vec![0.0, 0.0]), &random_frame(2, 3, &mut ChaCha8Rng::seed_from_u64(1))).unwrap(), 0.0);
    }

    #[test]
    fn wedge_basics() {
        let s = plane();
        let dx = FormField::coordinate_differential(&s, 0);
        let dy = FormField::coordinate_differential(&s, 1);
        let p = Point::new(0, vec![0.0, 0.0]);
        let dxdx = wedge(&dx, &dx).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let vs = random_frame(2, 2, &mut rng);
            assert!(dxdx.evaluate(&p, &vs).unwrap().abs() < 1e-15);
        }
        let area = wedge(&dx, &dy).unwrap();
        assert_eq!(area.evaluate(&p, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(), 1.0);
        assert_eq!(area.evaluate(&p, &[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(), -1.0);
    }

    #[test]
    fn shuffle_count_and_signs() {
        let sh = shuffles(1, 2);
        assert_eq!(sh.len(), 3);
        let signs: Vec<f64> = sh.iter().map(|s| s.0).collect();
        assert_eq!(signs, vec![1.0, -1.0, 1.0]);
        assert_eq!(shuffles(2, 2).len(), 6);
    }

    #[test]
    fn pullback_through_identity_is_unchanged() {
        let s = plane();
        let w = fdy(&s, |x, y| x * y + 1.0);
        let pulled = pullback(&SmoothMap::identity(&s), &w).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let p = s.sample(&mut rng);
            let vs = random_frame(2, 1, &mut rng);
            assert_eq!(pulled.evaluate(&p, &vs).unwrap(), w.evaluate(&p, &vs).unwrap());
        }
    }

    #[test]
    fn pullback_dimension_mismatch_is_contract_error() {
        let s = plane();
        let r = ChartedSpace::euclidean("R1", 1, 10.0, 1.0);
        let w = FormField::coordinate_differential(&r, 0);
        assert!(matches!(pullback(&SmoothMap::identity(&s), &w), Err(Error::Contract(_))));
    }

    #[test]
    fn linear_combinations() {
        let s = plane();
        let w = fdy(&s, |x, _| x.exp());
        let eta = FormField::coordinate_differential(&s, 0);
        let p = Point::new(0, vec![0.2, 0.5]);
        let v = vec![vec![0.3, 0.9]];
        let same = linear_combine(&[1.0, 0.0], &[w.clone(), eta.clone()]).unwrap();
        assert_eq!(same.evaluate(&p, &v).unwrap(), w.evaluate(&p, &v).unwrap());
        let zero = linear_combine(&[1.0, -1.0], &[w.clone(), w.clone()]).unwrap();
        assert_eq!(zero.evaluate(&p, &v).unwrap(), 0.0);
        let twice = scale(2.0, &w);
        assert_eq!(twice.evaluate(&p, &v).unwrap(), 2.0 * w.evaluate(&p, &v).unwrap());
        let area = wedge(&eta, &eta).unwrap();
        assert!(linear_combine(&[1.0, 1.0], &[w, area]).is_err());
    }

    #[test]
    fn evaluator_checks_arity() {
        let s = plane();
        let dx = FormField::coordinate_differential(&s, 0);
        assert!(dx.evaluate(&Point::new(0, vec![0.0, 0.0]), &[]).is_err());
    }
}
