//! Small-dimension complex linear algebra for the coin (4), polarization/OAM
//! factors (2) and the extended fibre space (6).
//!
//! Everything here is dense, row-major and immutable after construction.
//! The coin basis ordering is fixed once for the whole crate:
//!
//! ```text
//! index 0: |H,+>  <->  |00>
//! index 1: |H,->  <->  |01>
//! index 2: |V,+>  <->  |10>
//! index 3: |V,->  <->  |11>
//! ```
//!
//! with polarization as the first qubit and OAM as the second.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Per-position coin state: 4 amplitudes over [H+, H-, V+, V-].
pub type CoinVec = [C64; 4];

/// Coin basis indices under the fixed convention.
pub mod basis {
    pub const H_PLUS: usize = 0;
    pub const H_MINUS: usize = 1;
    pub const V_PLUS: usize = 2;
    pub const V_MINUS: usize = 3;

    pub const COIN_DIM: usize = 4;

    pub const COIN_LABELS: [&str; 4] = ["H+", "H-", "V+", "V-"];

    /// Index into the 6-dimensional extended space {H,V} x {m=-1,0,+1}.
    /// `pol` is 0 for H, 1 for V.
    pub fn ext_index(pol: usize, m: i32) -> usize {
        debug_assert!(pol < 2 && (-1..=1).contains(&m));
        pol * 3 + (m + 1) as usize
    }

    pub const EXT_DIM: usize = 6;
}

/// Default tolerance for algebraic identities (products of exact matrices).
pub const TOL_ALGEBRAIC: f64 = 1e-12;
/// Looser tolerance for multi-gate circuit equivalence up to global phase.
pub const TOL_CIRCUIT: f64 = 1e-8;

/// Dense square complex matrix of dimension 2, 4 or 6, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        if !matches!(dim, 2 | 4 | 6) {
            return Err(Error::UnsupportedDimension(dim));
        }
        Ok(Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        Ok(m)
    }

    /// Builds a matrix entry by entry; rejects NaN/Inf.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for r in 0..dim {
            for c in 0..dim {
                let v = f(r, c);
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::NonFinite);
                }
                m.set(r, c, v);
            }
        }
        Ok(m)
    }

    /// Builds a real matrix from rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        Self::from_fn(dim, |r, c| C64::new(rows[r][c], 0.0))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.dim + c] = v;
    }

    /// Standard complex matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Self::from_fn(self.dim, |r, c| {
            (0..self.dim).map(|k| self.at(r, k) * other.at(k, c)).sum()
        })
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.at(c, r).conj()).expect("entries already finite")
    }

    pub fn scale(&self, s: C64) -> Result<Self> {
        Self::from_fn(self.dim, |r, c| self.at(r, c) * s)
    }

    /// Applies the matrix to a column vector.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.at(r, c) * v[c]).sum())
            .collect()
    }

    pub fn apply_coin(&self, v: &CoinVec) -> CoinVec {
        assert_eq!(self.dim, 4);
        let out = self.apply(v);
        [out[0], out[1], out[2], out[3]]
    }

    /// Max-norm of the entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// True iff the max-norm of `self† self - I` is within `tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        assert!(tol > 0.0);
        let prod = self.dagger().mul(self).expect("same dim");
        let id = Self::identity(self.dim).expect("valid dim");
        prod.max_abs_diff(&id) <= tol
    }

    pub fn max_entry_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Kronecker product of two 2x2 matrices, polarization factor first.
pub fn tensor2x2(p: &SquareMatrix, q: &SquareMatrix) -> Result<SquareMatrix> {
    if p.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: p.dim(),
        });
    }
    if q.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: q.dim(),
        });
    }
    SquareMatrix::from_fn(4, |r, c| p.at(r / 2, c / 2) * q.at(r % 2, c % 2))
}

/// True iff `a == lambda * b` for some unit-modulus `lambda`, entrywise within
/// `tol`. The phase is read off the largest-modulus entry of `b` so the
/// division is well-conditioned.
pub fn equal_up_to_global_phase(a: &SquareMatrix, b: &SquareMatrix, tol: f64) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    assert!(tol > 0.0);
    let mut best = (0usize, 0usize, 0.0f64);
    for r in 0..b.dim() {
        for c in 0..b.dim() {
            let n = b.at(r, c).norm();
            if n > best.2 {
                best = (r, c, n);
            }
        }
    }
    if best.2 == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let lambda = a.at(best.0, best.1) / b.at(best.0, best.1);
    if (lambda.norm() - 1.0).abs() > tol.max(1e-9) {
        return Ok(false);
    }
    let lambda = lambda / lambda.norm();
    Ok(a.max_abs_diff(&b.scale(lambda)?) <= tol)
}

/// Same comparison for state vectors.
pub fn states_equal_up_to_global_phase(a: &[C64], b: &[C64], tol: f64) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let (idx, max) = b
        .iter()
        .enumerate()
        .map(|(i, z)| (i, z.norm()))
        .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    if max == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let lambda = a[idx] / b[idx];
    if (lambda.norm() - 1.0).abs() > tol.max(1e-9) {
        return Ok(false);
    }
    let lambda = lambda / lambda.norm();
    let diff = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - lambda * y).norm())
        .fold(0.0, f64::max);
    Ok(diff <= tol)
}

pub fn coin_norm_sq(v: &CoinVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn h2() -> SquareMatrix {
        let s = 1.0 / 2.0_f64.sqrt();
        SquareMatrix::from_real_rows(&[&[s, s], &[s, -s]]).unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let h4 = tensor2x2(&h2(), &h2()).unwrap();
        let id = SquareMatrix::identity(4).unwrap();
        assert_eq!(id.mul(&h4).unwrap().max_abs_diff(&h4), 0.0);
    }

    #[test]
    fn h4_squared_is_identity() {
        let h4 = tensor2x2(&h2(), &h2()).unwrap();
        let prod = h4.mul(&h4).unwrap();
        let id = SquareMatrix::identity(4).unwrap();
        assert!(prod.max_abs_diff(&id) <= TOL_ALGEBRAIC);
    }

    #[test]
    fn tensor_of_identities() {
        let i2 = SquareMatrix::identity(2).unwrap();
        let i4 = SquareMatrix::identity(4).unwrap();
        assert_eq!(tensor2x2(&i2, &i2).unwrap().max_abs_diff(&i4), 0.0);
    }

    #[test]
    fn tensor_x_with_identity_swaps_blocks() {
        // X on polarization exchanges the H and V blocks.
        let x = SquareMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let i2 = SquareMatrix::identity(2).unwrap();
        let m = tensor2x2(&x, &i2).unwrap();
        let expected = SquareMatrix::from_real_rows(&[
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
        ])
        .unwrap();
        assert_eq!(m.max_abs_diff(&expected), 0.0);
    }

    #[test]
    fn unitarity_checks() {
        let i4 = SquareMatrix::identity(4).unwrap();
        assert!(i4.is_unitary(TOL_ALGEBRAIC));
        let doubled = i4.scale(C64::new(2.0, 0.0)).unwrap();
        assert!(!doubled.is_unitary(TOL_ALGEBRAIC));
    }

    #[test]
    fn global_phase_equivalence() {
        let h4 = tensor2x2(&h2(), &h2()).unwrap();
        let phased = h4.scale(C64::from_polar(1.0, std::f64::consts::PI / 3.0)).unwrap();
        assert!(equal_up_to_global_phase(&h4, &phased, TOL_ALGEBRAIC).unwrap());
        assert!(equal_up_to_global_phase(&h4, &h4, TOL_ALGEBRAIC).unwrap());
        let zero = SquareMatrix::zeros(4).unwrap();
        assert!(matches!(
            equal_up_to_global_phase(&h4, &zero, TOL_ALGEBRAIC),
            Err(Error::ZeroMatrix)
        ));
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(matches!(SquareMatrix::zeros(3), Err(Error::UnsupportedDimension(3))));
        let i2 = SquareMatrix::identity(2).unwrap();
        let i4 = SquareMatrix::identity(4).unwrap();
        assert!(i2.mul(&i4).is_err());
        assert!(tensor2x2(&i4, &i2).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(
            SquareMatrix::from_fn(2, |_, _| C64::new(f64::NAN, 0.0)),
            Err(Error::NonFinite)
        ));
    }

    fn arb_unitary2() -> impl Strategy<Value = SquareMatrix> {
        // U(2) from three angles: phase * Rz(a) Ry(b) Rz(c) style composition.
        (0.0..std::f64::consts::TAU, 0.0..std::f64::consts::TAU, 0.0..std::f64::consts::TAU)
            .prop_map(|(a, b, c)| {
                let (cb, sb) = ((b / 2.0).cos(), (b / 2.0).sin());
                let e = |t: f64| C64::from_polar(1.0, t);
                SquareMatrix::from_fn(2, |r, col| match (r, col) {
                    (0, 0) => e(a) * cb,
                    (0, 1) => e(c) * sb,
                    (1, 0) => -e(-c) * sb,
                    _ => e(-a) * cb,
                })
                .unwrap()
            })
    }

    proptest! {
        #[test]
        fn product_of_unitaries_is_unitary(p in arb_unitary2(), q in arb_unitary2(), r in arb_unitary2(), s in arb_unitary2()) {
            let a = tensor2x2(&p, &q).unwrap();
            let b = tensor2x2(&r, &s).unwrap();
            prop_assert!(a.mul(&b).unwrap().is_unitary(TOL_ALGEBRAIC));
        }

        #[test]
        fn tensor_is_bilinear(p in arb_unitary2(), q in arb_unitary2(), re in -2.0..2.0f64, im in -2.0..2.0f64) {
            let alpha = C64::new(re, im);
            let left = tensor2x2(&p.scale(alpha).unwrap(), &q).unwrap();
            let right = tensor2x2(&p, &q).unwrap().scale(alpha).unwrap();
            prop_assert!(left.max_abs_diff(&right) <= 1e-15);
        }

        #[test]
        fn phase_equality_is_an_equivalence(p in arb_unitary2(), q in arb_unitary2(), t in 0.0..std::f64::consts::TAU) {
            let a = tensor2x2(&p, &q).unwrap();
            let b = a.scale(C64::from_polar(1.0, t)).unwrap();
            let c = b.scale(C64::from_polar(1.0, t / 2.0)).unwrap();
            // reflexive, symmetric, transitive
            prop_assert!(equal_up_to_global_phase(&a, &a, TOL_ALGEBRAIC).unwrap());
            prop_assert!(equal_up_to_global_phase(&a, &b, TOL_ALGEBRAIC).unwrap());
            prop_assert!(equal_up_to_global_phase(&b, &a, TOL_ALGEBRAIC).unwrap());
            prop_assert!(equal_up_to_global_phase(&b, &c, TOL_ALGEBRAIC).unwrap());
            prop_assert!(equal_up_to_global_phase(&a, &c, 2.0 * TOL_ALGEBRAIC).unwrap());
        }
    }
}
