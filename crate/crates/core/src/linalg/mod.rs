//! Dense complex matrix arithmetic, decompositions, and the primitives
//! every other module consumes: inverse with a condition cap, resolvent,
//! matrix exponential, spectrum, and the quarantined eigendecomposition
//! oracle (test-side only; main-path matrix functions live in `funcalc`).

mod exp;
mod spectrum;

pub use exp::operator_exp;
pub use spectrum::{eigen_oracle, spectrum, OracleFunction, SpectrumInfo};

use crate::error::{Error, Result};
use crate::scalar::{fl, rf, Cx, RealScalar};
use nalgebra::{ComplexField, DMatrix, DVector};
use std::ops::{Add, Mul, Neg, Sub};

/// Default tolerances for the dense kernel, chosen for `f64` headroom.
pub mod defaults {
    /// Condition-number cap above which inversions are refused.
    pub const COND_CAP: f64 = 1e12;
    /// Inverse residual bound factor: `|m * inv(m) - I| <= INV_TOL * cond(m)`.
    pub const INV_TOL: f64 = 1e-13;
    /// Relative accuracy target of the matrix exponential.
    pub const EXP_TOL: f64 = 1e-12;
    /// Hausdorff accuracy target of the eigenvalue solver on
    /// well-conditioned problems.
    pub const EIG_TOL: f64 = 1e-9;
    /// Spectral clearance required of a resolvent shift, scaled by
    /// `1 + |zeta|`.
    pub const RESOLVENT_MARGIN: f64 = 1e-8;
}

/// Complex column vector acting as the state space element.
pub type CVector<R> = DVector<Cx<R>>;

/// Dense square complex matrix: the realization of every operator symbol
/// in the library (generators, evolution operators, shifted logarithms).
#[derive(Debug, Clone, PartialEq)]
pub struct Operator<R: RealScalar> {
    m: DMatrix<Cx<R>>,
}

impl<R: RealScalar> Operator<R> {
    /// Wrap a dense matrix, enforcing squareness, positive dimension and
    /// finite entries.
    pub fn from_matrix(m: DMatrix<Cx<R>>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                left: m.nrows(),
                right: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidInput("operator dimension must be >= 1".into()));
        }
        let op = Self { m };
        if !op.is_finite() {
            return Err(Error::InvalidInput(
                "operator entries must be finite (no NaN/Inf)".into(),
            ));
        }
        Ok(op)
    }

    /// Internal constructor for matrices already known square and finite.
    pub(crate) fn from_matrix_unchecked(m: DMatrix<Cx<R>>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        Self { m }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "operator dimension must be >= 1");
        Self {
            m: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 1, "operator dimension must be >= 1");
        Self {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_diagonal(diag: &[Cx<R>]) -> Self {
        assert!(!diag.is_empty(), "operator dimension must be >= 1");
        let d = diag.len();
        let mut m = DMatrix::zeros(d, d);
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        Self { m }
    }

    /// Build from a row-major entry slice of length `dim * dim`.
    pub fn from_rows(dim: usize, entries: &[Cx<R>]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {dim}x{dim} operator, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Self::from_matrix(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Cx<R>) -> Self {
        assert!(dim >= 1, "operator dimension must be >= 1");
        Self {
            m: DMatrix::from_fn(dim, dim, f),
        }
    }

    /// Real diagonal shortcut used heavily in tests and fixtures.
    pub fn diag_re(values: &[f64]) -> Self {
        let diag: Vec<Cx<R>> = values.iter().map(|&v| Cx::new(rf(v), R::zero())).collect();
        Self::from_diagonal(&diag)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Cx<R>> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<Cx<R>> {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> Cx<R> {
        self.m[(i, j)]
    }

    pub fn is_finite(&self) -> bool {
        self.m
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            m: &self.m + &other.m,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            m: &self.m - &other.m,
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            m: &self.m * &other.m,
        })
    }

    pub fn scale(&self, c: Cx<R>) -> Self {
        Self {
            m: self.m.map(|z| z * c),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            m: self.m.adjoint(),
        }
    }

    /// `self + c * I`.
    pub fn shift(&self, c: Cx<R>) -> Self {
        let mut m = self.m.clone();
        for i in 0..self.dim() {
            m[(i, i)] += c;
        }
        Self { m }
    }

    /// `k`-th power by left-multiplication chain; `power(0)` is the identity.
    pub fn power(&self, k: usize) -> Self {
        let mut acc = Self::identity(self.dim());
        for _ in 0..k {
            acc = Self {
                m: &self.m * &acc.m,
            };
        }
        acc
    }

    pub fn apply(&self, v: &CVector<R>) -> Result<CVector<R>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: v.len(),
            });
        }
        Ok(&self.m * v)
    }

    pub fn norm_fro(&self) -> R {
        self.m.norm()
    }

    /// Maximum absolute column sum; cheap norm used by the exponential.
    pub fn norm_1(&self) -> R {
        let mut best = R::zero();
        for j in 0..self.dim() {
            let mut s = R::zero();
            for i in 0..self.dim() {
                s += self.m[(i, j)].modulus();
            }
            if s > best {
                best = s;
            }
        }
        best
    }

    /// Spectral norm (largest singular value).
    pub fn norm_2(&self) -> R {
        let sv = self.m.clone().svd(false, false).singular_values;
        sv.iter().fold(R::zero(), |a, &b| if b > a { b } else { a })
    }

    /// Two-norm condition estimate; `None` when numerically singular.
    pub fn cond_2(&self) -> Option<R> {
        let sv = self.m.clone().svd(false, false).singular_values;
        let (mut lo, mut hi) = (R::max_value().unwrap(), R::zero());
        for &s in sv.iter() {
            if s < lo {
                lo = s;
            }
            if s > hi {
                hi = s;
            }
        }
        if lo <= R::zero() {
            None
        } else {
            Some(hi / lo)
        }
    }

    /// Inverse guarded by a condition-number cap.
    pub fn inverse(&self, cond_cap: R) -> Result<Self> {
        let cond = self.cond_2();
        match cond {
            Some(c) if c <= cond_cap => {}
            Some(c) => {
                return Err(Error::SingularOperator {
                    cond: fl(c),
                    cap: fl(cond_cap),
                })
            }
            None => {
                return Err(Error::SingularOperator {
                    cond: f64::INFINITY,
                    cap: fl(cond_cap),
                })
            }
        }
        match self.m.clone().lu().try_inverse() {
            Some(inv) => Ok(Self { m: inv }),
            None => Err(Error::SingularOperator {
                cond: f64::INFINITY,
                cap: fl(cond_cap),
            }),
        }
    }

    /// Inverse with the default condition cap.
    pub fn inverse_default(&self) -> Result<Self> {
        self.inverse(rf(defaults::COND_CAP))
    }

    /// LU solve `self * X = rhs` without a condition estimate; callers are
    /// expected to have established conditioning (e.g. contour clearance).
    pub(crate) fn solve_matrix(&self, rhs: &DMatrix<Cx<R>>) -> Result<DMatrix<Cx<R>>> {
        self.m.clone().lu().solve(rhs).ok_or(Error::SingularOperator {
            cond: f64::INFINITY,
            cap: f64::NAN,
        })
    }

    pub(crate) fn solve_vector(&self, rhs: &CVector<R>) -> Result<CVector<R>> {
        self.m.clone().lu().solve(rhs).ok_or(Error::SingularOperator {
            cond: f64::INFINITY,
            cap: f64::NAN,
        })
    }
}

/// `(zeta I - m)^{-1}`, refusing shifts within the spectral margin
/// `RESOLVENT_MARGIN * (1 + |zeta|)`.
pub fn resolvent<R: RealScalar>(m: &Operator<R>, zeta: Cx<R>) -> Result<Operator<R>> {
    let margin = rf::<R>(defaults::RESOLVENT_MARGIN) * (R::one() + zeta.modulus());
    let info = spectrum(m)?;
    let mut dist = R::max_value().unwrap();
    for &ev in &info.eigenvalues {
        let d = (zeta - ev).modulus();
        if d < dist {
            dist = d;
        }
    }
    if dist < margin {
        return Err(Error::SpectralProximity {
            re: fl(zeta.re),
            im: fl(zeta.im),
            dist: fl(dist),
            margin: fl(margin),
        });
    }
    let shifted = m.scale(-Cx::new(R::one(), R::zero())).shift(zeta);
    let id = DMatrix::identity(m.dim(), m.dim());
    Ok(Operator::from_matrix_unchecked(shifted.solve_matrix(&id)?))
}

impl<R: RealScalar> Add for &Operator<R> {
    type Output = Operator<R>;
    fn add(self, rhs: Self) -> Operator<R> {
        self.try_add(rhs).expect("operator addition: dimension mismatch")
    }
}

impl<R: RealScalar> Sub for &Operator<R> {
    type Output = Operator<R>;
    fn sub(self, rhs: Self) -> Operator<R> {
        self.try_sub(rhs).expect("operator subtraction: dimension mismatch")
    }
}

impl<R: RealScalar> Mul for &Operator<R> {
    type Output = Operator<R>;
    fn mul(self, rhs: Self) -> Operator<R> {
        self.try_mul(rhs).expect("operator product: dimension mismatch")
    }
}

impl<R: RealScalar> Neg for &Operator<R> {
    type Output = Operator<R>;
    fn neg(self) -> Operator<R> {
        Operator {
            m: -self.m.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    type Op = Operator<f64>;

    fn c(re: f64, im: f64) -> Cx<f64> {
        cx(re, im)
    }

    #[test]
    fn identity_multiplication_is_neutral() {
        let m = Op::from_rows(2, &[c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 1.0), c(3.0, -1.0)]).unwrap();
        let id = Op::identity(2);
        assert!(((&id * &m).try_sub(&m).unwrap()).norm_fro() == 0.0);
        assert!(((&m * &id).try_sub(&m).unwrap()).norm_fro() == 0.0);
    }

    #[test]
    fn additive_inverse_cancels() {
        let m = Op::from_rows(2, &[c(1.0, 2.0), c(-0.5, 0.3), c(0.1, 1.0), c(3.0, -1.0)]).unwrap();
        let z = m.try_add(&m.scale(c(-1.0, 0.0))).unwrap();
        assert_eq!(z.norm_fro(), 0.0);
    }

    #[test]
    fn nilpotent_square_vanishes() {
        let n = Op::from_rows(2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(n.try_mul(&n).unwrap().norm_fro(), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_typed() {
        let a = Op::identity(2);
        let b = Op::identity(3);
        assert!(matches!(
            a.try_mul(&b),
            Err(Error::DimensionMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn nan_entries_rejected() {
        let m = DMatrix::from_row_slice(1, 1, &[c(f64::NAN, 0.0)]);
        assert!(Op::from_matrix(m).is_err());
    }

    #[test]
    fn inverse_identity_and_diagonal() {
        let id = Op::identity(3);
        let inv = id.inverse_default().unwrap();
        assert!(inv.try_sub(&id).unwrap().norm_fro() < 1e-15);

        let d = Op::diag_re(&[2.0, 4.0]);
        let inv = d.inverse_default().unwrap();
        let expected = Op::diag_re(&[0.5, 0.25]);
        assert!(inv.try_sub(&expected).unwrap().norm_fro() < 1e-15);
    }

    #[test]
    fn inverse_refuses_singular() {
        let s = Op::from_rows(2, &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(matches!(
            s.inverse_default(),
            Err(Error::SingularOperator { .. })
        ));
    }

    #[test]
    fn inverse_residual_on_random_well_conditioned() {
        // deterministic pseudo-random 6x6, diagonally dominant
        let m = Op::from_fn(6, |i, j| {
            let v = ((i * 7 + j * 13 + 1) as f64 * 0.37).sin() * 0.2;
            let w = ((i * 3 + j * 5) as f64 * 0.61).cos() * 0.2;
            if i == j {
                c(2.0 + v, w)
            } else {
                c(v, w)
            }
        });
        let inv = m.inverse_default().unwrap();
        let resid = m.try_mul(&inv).unwrap().try_sub(&Op::identity(6)).unwrap();
        assert!(resid.norm_fro() < 1e-12, "residual {}", resid.norm_fro());
    }

    #[test]
    fn resolvent_identity_cases() {
        // (2 - 1)^{-1} = 1 for m = I
        let r = resolvent(&Op::identity(2), c(2.0, 0.0)).unwrap();
        assert!(r.try_sub(&Op::identity(2)).unwrap().norm_fro() < 1e-12);

        // diag(1,3) at zeta = 0 -> diag(-1, -1/3)
        let r = resolvent(&Op::diag_re(&[1.0, 3.0]), c(0.0, 0.0)).unwrap();
        let expected = Op::diag_re(&[-1.0, -1.0 / 3.0]);
        assert!(r.try_sub(&expected).unwrap().norm_fro() < 1e-12);
    }

    #[test]
    fn resolvent_refuses_near_spectrum() {
        let m = Op::diag_re(&[1.0, 3.0]);
        assert!(matches!(
            resolvent(&m, c(1.0 + 1e-12, 0.0)),
            Err(Error::SpectralProximity { .. })
        ));
    }

    #[test]
    fn first_resolvent_identity() {
        // R(z1) - R(z2) = (z2 - z1) R(z1) R(z2) on a fixed 5x5
        let m = Op::from_fn(5, |i, j| {
            let v = ((i * 11 + j * 17 + 3) as f64).sin() * 0.3;
            let w = ((i + 2 * j) as f64).cos() * 0.1;
            if i == j {
                c(0.5 + v, w)
            } else {
                c(v, w)
            }
        });
        let z1 = c(4.0, 1.0);
        let z2 = c(-3.0, 2.0);
        let r1 = resolvent(&m, z1).unwrap();
        let r2 = resolvent(&m, z2).unwrap();
        let lhs = r1.try_sub(&r2).unwrap();
        let rhs = r1.try_mul(&r2).unwrap().scale(z2 - z1);
        assert!(lhs.try_sub(&rhs).unwrap().norm_fro() < 1e-10);
    }

    #[test]
    fn power_zero_is_identity() {
        let m = Op::diag_re(&[2.0, 3.0]);
        assert!(m.power(0).try_sub(&Op::identity(2)).unwrap().norm_fro() == 0.0);
        let p3 = m.power(3);
        let expected = Op::diag_re(&[8.0, 27.0]);
        assert!(p3.try_sub(&expected).unwrap().norm_fro() < 1e-12);
    }

    #[test]
    fn norms_are_consistent() {
        let m = Op::identity(4);
        assert!((m.norm_2() - 1.0).abs() < 1e-12);
        assert!((m.norm_fro() - 2.0).abs() < 1e-12);
        assert!((m.norm_1() - 1.0).abs() < 1e-12);
    }
}
