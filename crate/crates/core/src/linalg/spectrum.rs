//! Eigenvalue extraction via the complex Schur form, and the
//! eigendecomposition oracle `V f(Lambda) V^{-1}`.
//!
//! The oracle is quarantined: nothing on the computational path of the
//! other modules calls it. It exists so tests and verification campaigns
//! can cross-check the contour-quadrature functional calculus against an
//! independent construction.

use super::{defaults, Operator};
use crate::error::{Error, Result};
use crate::scalar::{fl, rf, Cx, RealScalar};
use nalgebra::{ComplexField, DMatrix};

/// Eigenvalue summary of an operator.
#[derive(Debug, Clone)]
pub struct SpectrumInfo<R: RealScalar> {
    pub eigenvalues: Vec<Cx<R>>,
    pub spectral_radius: R,
    /// Whether an eigenbasis with condition below the cap was found.
    pub diagonalizable_hint: bool,
    /// Two-norm condition estimate of the computed eigenbasis.
    pub eigenbasis_cond: R,
}

const SCHUR_MAX_ITER: usize = 100_000;

fn schur_parts<R: RealScalar>(m: &Operator<R>) -> Result<(DMatrix<Cx<R>>, DMatrix<Cx<R>>)> {
    let eps = R::default_epsilon() * rf::<R>(64.0);
    let schur = m
        .matrix()
        .clone()
        .try_schur(eps, SCHUR_MAX_ITER)
        .ok_or(Error::ConvergenceFailure)?;
    let (q, t) = schur.unpack();
    Ok((q, t))
}

/// Eigenvectors of an upper-triangular matrix by back-substitution.
/// Near-zero denominators (clustered eigenvalues) are nudged to a floor;
/// the resulting basis condition number exposes defectiveness.
fn triangular_eigenvectors<R: RealScalar>(t: &DMatrix<Cx<R>>) -> DMatrix<Cx<R>> {
    let d = t.nrows();
    let floor = R::default_epsilon() * (R::one() + t.norm());
    let mut y = DMatrix::<Cx<R>>::zeros(d, d);
    for i in 0..d {
        y[(i, i)] = Cx::new(R::one(), R::zero());
        for j in (0..i).rev() {
            let mut s = Cx::new(R::zero(), R::zero());
            for k in (j + 1)..=i {
                s += t[(j, k)] * y[(k, i)];
            }
            let mut den = t[(j, j)] - t[(i, i)];
            if den.modulus() < floor {
                den = Cx::new(floor, R::zero());
            }
            y[(j, i)] = -s / den;
        }
        let norm = y.column(i).norm();
        if norm > R::zero() {
            for j in 0..=i {
                y[(j, i)] /= Cx::new(norm, R::zero());
            }
        }
    }
    y
}

fn eigen_decomposition<R: RealScalar>(
    m: &Operator<R>,
) -> Result<(Vec<Cx<R>>, DMatrix<Cx<R>>, R)> {
    let (q, t) = schur_parts(m)?;
    let eigenvalues: Vec<Cx<R>> = (0..t.nrows()).map(|i| t[(i, i)]).collect();
    let y = triangular_eigenvectors(&t);
    let v = q * y;
    let sv = v.clone().svd(false, false).singular_values;
    let (mut lo, mut hi) = (R::max_value().unwrap(), R::zero());
    for &s in sv.iter() {
        if s < lo {
            lo = s;
        }
        if s > hi {
            hi = s;
        }
    }
    let cond = if lo > R::zero() {
        hi / lo
    } else {
        R::max_value().unwrap()
    };
    Ok((eigenvalues, v, cond))
}

/// Eigenvalues, spectral radius and a diagonalizability estimate.
pub fn spectrum<R: RealScalar>(m: &Operator<R>) -> Result<SpectrumInfo<R>> {
    let (eigenvalues, _v, cond) = eigen_decomposition(m)?;
    let mut radius = R::zero();
    for ev in &eigenvalues {
        let a = ev.modulus();
        if a > radius {
            radius = a;
        }
    }
    Ok(SpectrumInfo {
        eigenvalues,
        spectral_radius: radius,
        diagonalizable_hint: cond < rf(defaults::COND_CAP),
        eigenbasis_cond: cond,
    })
}

/// Scalar functions the eigendecomposition oracle can apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleFunction {
    /// Principal logarithm; undefined on `(-inf, 0]`.
    Log,
    /// Principal n-th root `exp(Log(z)/n)`; undefined on `(-inf, 0]`.
    Root(u32),
    /// Entire exponential.
    Exp,
}

impl OracleFunction {
    pub fn eval<R: RealScalar>(&self, z: Cx<R>) -> Result<Cx<R>> {
        let on_cut = z.im == R::zero() && z.re <= R::zero();
        match self {
            OracleFunction::Log => {
                if on_cut {
                    return Err(Error::DomainViolation {
                        re: fl(z.re),
                        im: fl(z.im),
                    });
                }
                Ok(ComplexField::ln(z))
            }
            OracleFunction::Root(n) => {
                if *n == 0 {
                    return Err(Error::InvalidInput("root order must be >= 1".into()));
                }
                if on_cut {
                    return Err(Error::DomainViolation {
                        re: fl(z.re),
                        im: fl(z.im),
                    });
                }
                let ln = ComplexField::ln(z);
                Ok(ComplexField::exp(ln / Cx::new(rf(*n as f64), R::zero())))
            }
            OracleFunction::Exp => Ok(ComplexField::exp(z)),
        }
    }
}

/// `V diag(f(lambda_i)) V^{-1}` for diagonalizable `m`.
///
/// Refuses defective matrices (eigenbasis condition above the cap) and
/// spectra meeting the function's domain boundary.
pub fn eigen_oracle<R: RealScalar>(f: OracleFunction, m: &Operator<R>) -> Result<Operator<R>> {
    let (eigenvalues, v, cond) = eigen_decomposition(m)?;
    let cap = rf::<R>(defaults::COND_CAP);
    if !(cond < cap) {
        return Err(Error::DefectiveMatrix {
            cond: fl(cond),
            cap: fl(cap),
        });
    }
    let d = m.dim();
    let mut fd = DMatrix::<Cx<R>>::zeros(d, d);
    for (i, &ev) in eigenvalues.iter().enumerate() {
        fd[(i, i)] = f.eval(ev)?;
    }
    let v_inv = v
        .clone()
        .lu()
        .try_inverse()
        .ok_or(Error::DefectiveMatrix {
            cond: fl(cond),
            cap: fl(cap),
        })?;
    Ok(Operator::from_matrix_unchecked(v * fd * v_inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    type Op = Operator<f64>;

    fn sorted_by_re(mut evs: Vec<Cx<f64>>) -> Vec<Cx<f64>> {
        evs.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        evs
    }

    #[test]
    fn spectrum_of_diagonal() {
        let info = spectrum(&Op::diag_re(&[1.0, 2.0, 3.0])).unwrap();
        let evs = sorted_by_re(info.eigenvalues);
        for (ev, want) in evs.iter().zip([1.0, 2.0, 3.0]) {
            assert!((ev - cx::<f64>(want, 0.0)).norm() < 1e-10);
        }
        assert!((info.spectral_radius - 3.0).abs() < 1e-10);
        assert!(info.diagonalizable_hint);
    }

    #[test]
    fn spectrum_of_rotation_is_imaginary_pair() {
        let m = Op::from_rows(
            2,
            &[cx(0.0, 0.0), cx(1.0, 0.0), cx(-1.0, 0.0), cx(0.0, 0.0)],
        )
        .unwrap();
        let info = spectrum(&m).unwrap();
        let evs = sorted_by_re(info.eigenvalues);
        assert!((evs[0] - cx::<f64>(0.0, -1.0)).norm() < 1e-9 || (evs[0] - cx::<f64>(0.0, 1.0)).norm() < 1e-9);
        assert!((info.spectral_radius - 1.0).abs() < 1e-9);
    }

    #[test]
    fn spectrum_of_identity_has_unit_radius() {
        let info = spectrum(&Op::identity(5)).unwrap();
        assert_eq!(info.eigenvalues.len(), 5);
        for ev in &info.eigenvalues {
            assert!((ev - cx::<f64>(1.0, 0.0)).norm() < 1e-12);
        }
        assert!((info.spectral_radius - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oracle_log_on_diagonal() {
        let r = eigen_oracle(OracleFunction::Log, &Op::diag_re(&[2.0, 3.0])).unwrap();
        let expected = Op::diag_re(&[2.0f64.ln(), 3.0f64.ln()]);
        assert!(r.try_sub(&expected).unwrap().norm_fro() < 1e-12);
    }

    #[test]
    fn oracle_sqrt_on_diagonal() {
        let r = eigen_oracle(OracleFunction::Root(2), &Op::diag_re(&[4.0])).unwrap();
        assert!((r.entry(0, 0) - cx::<f64>(2.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn oracle_refuses_branch_point() {
        assert!(matches!(
            eigen_oracle(OracleFunction::Log, &Op::diag_re(&[-1.0])),
            Err(Error::DomainViolation { .. })
        ));
    }

    #[test]
    fn oracle_refuses_defective_jordan_block() {
        let j = Op::from_rows(2, &[cx(1.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)])
            .unwrap();
        assert!(matches!(
            eigen_oracle(OracleFunction::Log, &j),
            Err(Error::DefectiveMatrix { .. })
        ));
    }

    #[test]
    fn oracle_reconstructs_nondiagonal_matrix_function() {
        // m = V diag(1, 4) V^{-1}; sqrt(m) should square back to m
        let v = Op::from_rows(2, &[cx(1.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)])
            .unwrap();
        let vinv = v.inverse_default().unwrap();
        let m = v
            .try_mul(&Op::diag_re(&[1.0, 4.0]))
            .unwrap()
            .try_mul(&vinv)
            .unwrap();
        let root = eigen_oracle(OracleFunction::Root(2), &m).unwrap();
        let sq = root.try_mul(&root).unwrap();
        assert!(sq.try_sub(&m).unwrap().norm_fro() < 1e-11);
    }

    #[test]
    fn spectral_mapping_under_exponential() {
        let m = Op::from_fn(4, |i, j| {
            cx(
                ((i * 3 + j + 1) as f64).sin() * 0.6,
                ((i + j * 2) as f64).cos() * 0.4,
            )
        });
        let em = super::super::operator_exp(&m);
        let evs_m = spectrum(&m).unwrap().eigenvalues;
        let evs_em = spectrum(&em).unwrap().eigenvalues;
        // multiset match: every exp(lambda) appears among eigenvalues of exp(m)
        for ev in &evs_m {
            let target = ev.exp();
            let best = evs_em
                .iter()
                .map(|w| (w - target).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-8, "spectral mapping violated: gap {best}");
        }
    }
}
