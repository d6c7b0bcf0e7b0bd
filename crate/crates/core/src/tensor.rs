//! Separable fields `f_1(x_1) ... f_d(x_d)` kept as their one-dimensional
//! factors. Products, sup norms and the cross-norms factorize, so these fields
//! reach resolutions a dense grid cannot hold.

use crate::error::{invalid, Error, Result};
use crate::grid::{GridBox, GridFunction, MAX_DIM};
use crate::sobolev::Space;

#[derive(Clone, Debug, PartialEq)]
pub struct TensorField {
    factors: Vec<GridFunction>,
}

impl TensorField {
    pub fn new(factors: Vec<GridFunction>) -> Result<Self> {
        if factors.is_empty() || factors.len() > MAX_DIM {
            return Err(Error::DimensionOverflow(factors.len()));
        }
        if factors.iter().any(|f| f.dim() != 1) {
            return Err(invalid("factors", "every factor must be one-dimensional"));
        }
        Ok(TensorField { factors })
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[GridFunction] {
        &self.factors
    }

    pub fn domain(&self) -> Result<GridBox> {
        self.factors[1..]
            .iter()
            .try_fold(self.factors[0].domain().clone(), |b, f| b.product(f.domain()))
    }

    pub fn product(&self, other: &TensorField) -> Result<TensorField> {
        if self.dim() != other.dim() {
            return Err(Error::GridMismatch { field: "dimension" });
        }
        let factors = self
            .factors
            .iter()
            .zip(&other.factors)
            .map(|(a, b)| a.pointwise_multiply(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(TensorField { factors })
    }

    pub fn sup_norm(&self) -> f64 {
        self.factors.iter().map(GridFunction::sup_norm).product()
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        self.factors.iter().map(|f| f.lp_norm(p)).product()
    }

    /// Norm in `space`, as the product of the factor norms.
    pub fn space_norm(&self, space: Space) -> Result<f64> {
        self.factors.iter().map(|f| space.norm(f)).product()
    }

    /// Dense samples of the full field.
    pub fn to_dense(&self) -> Result<GridFunction> {
        self.factors[1..]
            .iter()
            .try_fold(self.factors[0].clone(), |acc, f| acc.tensor_product(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::differences::besov_norm_diff;
    use crate::grid::Extension;

    fn bump_on(n: usize, c: f64) -> GridFunction {
        GridFunction::sample(
            |x| crate::profile::smoothed_indicator(x[0] - c, 0.5, 1.5),
            GridBox::cube(1, -3.0, 3.0).unwrap(),
            vec![n],
            Extension::Zero,
        )
        .unwrap()
    }

    #[test]
    fn factored_norm_matches_dense() {
        let t = TensorField::new(vec![bump_on(64, 0.2), bump_on(64, -0.3)]).unwrap();
        let dense = t.to_dense().unwrap();
        let space = Space::Besov { r: 1.0, p: 2.0, m_diff: 2 };
        let a = t.space_norm(space).unwrap();
        let b = besov_norm_diff(&dense, 1.0, 2.0, 2).unwrap();
        assert!((a - b).abs() < 1e-10 * b);
        assert!((t.sup_norm() - dense.sup_norm()).abs() < 1e-15);
        assert!((t.lp_norm(2.0).unwrap() - dense.lp_norm(2.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn product_is_factorwise() {
        let a = TensorField::new(vec![bump_on(32, 0.0), bump_on(32, 0.5)]).unwrap();
        let b = TensorField::new(vec![bump_on(32, 0.4), bump_on(32, -0.1)]).unwrap();
        let dense = a.product(&b).unwrap().to_dense().unwrap();
        let want = a.to_dense().unwrap().pointwise_multiply(&b.to_dense().unwrap()).unwrap();
        for (x, y) in dense.values().iter().zip(want.values()) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_multidimensional_factors() {
        let f = GridFunction::zeros(GridBox::cube(2, 0.0, 1.0).unwrap(), vec![4, 4], Extension::Zero).unwrap();
        assert!(TensorField::new(vec![f]).is_err());
        assert!(TensorField::new(vec![]).is_err());
    }
}
