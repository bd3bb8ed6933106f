use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

use super::space::{mat_vec, richardson_vec, ChartedSpace, Point};
use super::DEFAULT_STEP;

pub type EvalFn = Arc<dyn Fn(&Point) -> Result<Point> + Send + Sync>;
pub type JacobianFn = Arc<dyn Fn(&Point) -> Result<DMatrix<f64>> + Send + Sync>;

/// A smooth map between charted spaces.
///
/// The Jacobian at `p` maps tangent vectors in the chart of `p` to tangent
/// vectors in the chart the image `F(p)` is returned in. When no analytic
/// Jacobian is supplied it is produced by Richardson-extrapolated central
/// differences, with perturbed images re-expressed in the chart of `F(p)`.
#[derive(Clone)]
pub struct SmoothMap {
    name: String,
    source: Arc<ChartedSpace>,
    target: Arc<ChartedSpace>,
    eval: EvalFn,
    jacobian: Option<JacobianFn>,
}

impl fmt::Debug for SmoothMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SmoothMap({}: {} → {})", self.name, self.source.name(), self.target.name())
    }
}

impl SmoothMap {
    pub fn new(
        name: impl Into<String>,
        source: Arc<ChartedSpace>,
        target: Arc<ChartedSpace>,
        eval: impl Fn(&Point) -> Result<Point> + Send + Sync + 'static,
    ) -> Self {
        SmoothMap {
            name: name.into(),
            source,
            target,
            eval: Arc::new(eval),
            jacobian: None,
        }
    }

    pub fn with_jacobian(mut self, jac: impl Fn(&Point) -> Result<DMatrix<f64>> + Send + Sync + 'static) -> Self {
        self.jacobian = Some(Arc::new(jac));
        self
    }

    pub fn identity(space: &Arc<ChartedSpace>) -> Self {
        let dim = space.dim();
        SmoothMap::new("id", space.clone(), space.clone(), |p| Ok(p.clone()))
            .with_jacobian(move |_| Ok(DMatrix::identity(dim, dim)))
    }

    pub fn constant(source: &Arc<ChartedSpace>, target: &Arc<ChartedSpace>, value: Point) -> Self {
        let (m, n) = (target.dim(), source.dim());
        SmoothMap::new("const", source.clone(), target.clone(), move |_| Ok(value.clone()))
            .with_jacobian(move |_| Ok(DMatrix::zeros(m, n)))
    }

    /// Projection of a product space onto its `index`-th factor.
    pub fn projection(product: &Arc<ChartedSpace>, index: usize) -> Result<Self> {
        let factors = product
            .factors()
            .ok_or_else(|| Error::contract(format!("{} is not a product", product.name())))?
            .to_vec();
        let target = factors
            .get(index)
            .cloned()
            .ok_or_else(|| Error::contract("projection index out of range"))?;
        let offset: usize = factors[..index].iter().map(|f| f.dim()).sum();
        let (m, n) = (target.dim(), product.dim());
        let space = product.clone();
        Ok(SmoothMap::new(format!("pr{index}"), product.clone(), target, move |p| {
            Ok(space.split(p).swap_remove(index))
        })
        .with_jacobian(move |_| {
            let mut j = DMatrix::zeros(m, n);
            for i in 0..m {
                j[(i, offset + i)] = 1.0;
            }
            Ok(j)
        }))
    }

    /// `(a, b)`: `S → A × B`; `target` must be the product of the two targets.
    pub fn pair(a: &SmoothMap, b: &SmoothMap, target: &Arc<ChartedSpace>) -> Result<Self> {
        if !a.source.same_as(&b.source) {
            return Err(Error::contract("pair: sources differ"));
        }
        match target.factors() {
            Some([fa, fb]) if fa.same_as(&a.target) && fb.same_as(&b.target) => {}
            _ => return Err(Error::contract("pair: target is not the product of the two targets")),
        }
        let (a1, b1, a2, b2) = (a.clone(), b.clone(), a.clone(), b.clone());
        let space = target.clone();
        Ok(SmoothMap::new(
            format!("({}, {})", a.name, b.name),
            a.source.clone(),
            target.clone(),
            move |p| Ok(space.join(&[a1.eval(p)?, b1.eval(p)?])),
        )
        .with_jacobian(move |p| {
            let ja = a2.jacobian(p)?;
            let jb = b2.jacobian(p)?;
            let mut j = DMatrix::zeros(ja.nrows() + jb.nrows(), ja.ncols());
            j.view_mut((0, 0), (ja.nrows(), ja.ncols())).copy_from(&ja);
            j.view_mut((ja.nrows(), 0), (jb.nrows(), jb.ncols())).copy_from(&jb);
            Ok(j)
        }))
    }

    /// `self ∘ inner`, Jacobian by the chain rule.
    pub fn compose(&self, inner: &SmoothMap) -> Result<Self> {
        if !inner.target.same_as(&self.source) {
            return Err(Error::contract(format!(
                "cannot compose {} after {}: {} ≠ {}",
                self.name,
                inner.name,
                inner.target.name(),
                self.source.name()
            )));
        }
        let (o1, i1, o2, i2) = (self.clone(), inner.clone(), self.clone(), inner.clone());
        Ok(SmoothMap::new(
            format!("{}∘{}", self.name, inner.name),
            inner.source.clone(),
            self.target.clone(),
            move |p| o1.eval(&i1.eval(p)?),
        )
        .with_jacobian(move |p| {
            let mid = i2.eval(p)?;
            Ok(o2.jacobian(&mid)? * i2.jacobian(p)?)
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &Arc<ChartedSpace> {
        &self.source
    }

    pub fn target(&self) -> &Arc<ChartedSpace> {
        &self.target
    }

    pub fn has_analytic_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    pub fn eval(&self, p: &Point) -> Result<Point> {
        (self.eval)(p)
    }

    pub fn jacobian(&self, p: &Point) -> Result<DMatrix<f64>> {
        match &self.jacobian {
            Some(j) => j(p),
            None => self.numeric_jacobian(p),
        }
    }

    /// Central-difference Jacobian, ignoring any analytic one.
    pub fn numeric_jacobian(&self, p: &Point) -> Result<DMatrix<f64>> {
        let (m, n) = (self.target.dim(), self.source.dim());
        let image = self.eval(p)?;
        let mut out = DMatrix::zeros(m, n);
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let col = richardson_vec(DEFAULT_STEP, |s| {
                let plus = self.image_in(&self.source.shifted(p, &e, s)?, image.chart)?;
                let minus = self.image_in(&self.source.shifted(p, &e, -s)?, image.chart)?;
                Ok((0..m)
                    .map(|i| self.target.coord_delta(i, plus.coords[i], minus.coords[i]) / (2.0 * s))
                    .collect())
            })?;
            for i in 0..m {
                out[(i, j)] = col[i];
            }
        }
        Ok(out)
    }

    fn image_in(&self, p: &Point, chart: usize) -> Result<Point> {
        let q = self.eval(p)?;
        self.target
            .express(&q, chart)
            .ok_or_else(|| self.target.boundary(chart))
    }

    /// Pushforward `J_F(p)·v`.
    pub fn push(&self, p: &Point, v: &[f64]) -> Result<Vec<f64>> {
        Ok(mat_vec(&self.jacobian(p)?, v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn plane() -> Arc<ChartedSpace> {
        ChartedSpace::euclidean("R2", 2, 100.0, 2.0)
    }

    fn twist(space: &Arc<ChartedSpace>) -> SmoothMap {
        SmoothMap::new("twist", space.clone(), space.clone(), |p| {
            let (x, y) = (p.coords[0], p.coords[1]);
            Ok(Point::new(0, vec![x * y + x.sin(), y * y - x]))
        })
    }

    #[test]
    fn identity_jacobian_is_identity() {
        let s = plane();
        let id = SmoothMap::identity(&s);
        let p = Point::new(0, vec![0.3, -1.2]);
        assert_eq!(id.jacobian(&p).unwrap(), DMatrix::identity(2, 2));
        let numeric = id.numeric_jacobian(&p).unwrap();
        assert!((numeric - DMatrix::identity(2, 2)).amax() < 1e-10);
    }

    #[test]
    fn numeric_jacobian_matches_hand_derivative() {
        let s = plane();
        let f = twist(&s);
        let p = Point::new(0, vec![0.7, -0.4]);
        let j = f.jacobian(&p).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[-0.4 + 0.7f64.cos(), 0.7, -1.0, -0.8]);
        assert!((j - expected).amax() < 1e-9);
    }

    #[test]
    fn chain_rule_residual_is_small() {
        let s = plane();
        let f = twist(&s);
        let ff = f.compose(&f).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let p = s.sample(&mut rng);
            let chained = ff.jacobian(&p).unwrap();
            let direct = ff.numeric_jacobian(&p).unwrap();
            assert!((chained - direct).amax() < 1e-7);
        }
    }

    #[test]
    fn pair_and_projection_invert() {
        let s = plane();
        let sq = ChartedSpace::power(&s, 2);
        let f = twist(&s);
        let id = SmoothMap::identity(&s);
        let pair = SmoothMap::pair(&f, &id, &sq).unwrap();
        let back = SmoothMap::projection(&sq, 1).unwrap().compose(&pair).unwrap();
        let p = Point::new(0, vec![0.1, 0.2]);
        assert_eq!(back.eval(&p).unwrap(), p);
        assert!((back.jacobian(&p).unwrap() - DMatrix::identity(2, 2)).amax() < 1e-12);
    }

    #[test]
    fn compose_rejects_mismatched_spaces() {
        let s = plane();
        let r = ChartedSpace::euclidean("R1", 1, 10.0, 1.0);
        let f = twist(&s);
        let g = SmoothMap::identity(&r);
        assert!(matches!(f.compose(&g), Err(Error::Contract(_))));
    }
}
