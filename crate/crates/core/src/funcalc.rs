//! Holomorphic functional calculus by contour quadrature.
//!
//! `f(M) = (1/2 pi i) \oint f(zeta) (zeta I - M)^{-1} dzeta` over a circle
//! enclosing the spectrum, evaluated with the trapezoidal rule and node
//! doubling. Supported functions are the principal logarithm and principal
//! n-th roots, both cut along `(-inf, 0]`; contours refuse spectra that
//! cannot be enclosed clear of the cut.
//!
//! This is the computational path for every operator logarithm in the
//! library. The eigendecomposition oracle in `linalg` is kept independent
//! of it so the two can cross-check each other.

use crate::error::{Error, Result};
use crate::linalg::Operator;
use crate::scalar::{branch_cut_distance, fl, rf, Cx, RealScalar};
use nalgebra::{ComplexField, DMatrix};

/// Closed circular quadrature contour for Riesz-Dunford integrals.
#[derive(Debug, Clone, Copy)]
pub struct Contour<R: RealScalar> {
    pub center: Cx<R>,
    pub radius: R,
    pub nodes: usize,
}

/// Configuration of contour construction and quadrature refinement.
#[derive(Debug, Clone, Copy)]
pub struct CalcConfig<R: RealScalar> {
    /// Required spectral clearance as a fraction of the contour radius.
    pub spectral_margin: R,
    /// Required absolute distance between the closed disk and the branch
    /// cut `(-inf, 0]`.
    pub branch_margin: R,
    /// Nodes of the first trapezoidal pass (a power of two).
    pub initial_nodes: usize,
    /// Node-doubling ceiling.
    pub max_nodes: usize,
    /// Operator-norm Cauchy criterion for successive node doublings.
    pub quad_tol: R,
}

impl<R: RealScalar> Default for CalcConfig<R> {
    fn default() -> Self {
        Self {
            spectral_margin: rf(0.1),
            branch_margin: rf(1e-3),
            initial_nodes: 64,
            max_nodes: 4096,
            quad_tol: rf(1e-11),
        }
    }
}

impl<R: RealScalar> CalcConfig<R> {
    pub fn validate(&self) -> Result<()> {
        if !(self.spectral_margin > R::zero() && self.spectral_margin < R::one()) {
            return Err(Error::InvalidInput(
                "spectral_margin must lie in (0, 1)".into(),
            ));
        }
        if self.branch_margin <= R::zero() || self.quad_tol <= R::zero() {
            return Err(Error::InvalidInput(
                "branch_margin and quad_tol must be positive".into(),
            ));
        }
        if self.initial_nodes < 2
            || self.initial_nodes > self.max_nodes
            || !self.initial_nodes.is_power_of_two()
            || !self.max_nodes.is_power_of_two()
        {
            return Err(Error::InvalidInput(
                "node counts must be powers of two with initial_nodes <= max_nodes".into(),
            ));
        }
        Ok(())
    }
}

/// Functions admitted by the contour calculus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HoloFunction {
    PrincipalLog,
    PrincipalRoot(u32),
}

impl HoloFunction {
    fn eval<R: RealScalar>(&self, z: Cx<R>) -> Cx<R> {
        match self {
            HoloFunction::PrincipalLog => ComplexField::ln(z),
            // principal root defined through the principal log so the two
            // share one branch convention
            HoloFunction::PrincipalRoot(n) => {
                ComplexField::exp(ComplexField::ln(z) / Cx::new(rf(*n as f64), R::zero()))
            }
        }
    }
}

/// Radius growth factor over the farthest eigenvalue.
const RADIUS_FACTOR: f64 = 1.2;
/// Relative floor for the radius when the spectrum is (nearly) a point.
const MIN_RADIUS_FACTOR: f64 = 0.05;

/// Build a circular contour enclosing `spectrum(m)` with the configured
/// clearances: center at the eigenvalue centroid, radius `1.2x` the
/// farthest eigenvalue (with a floor for point spectra), then grown to
/// meet the spectral margin and validated against the branch cut.
pub fn build_contour<R: RealScalar>(m: &Operator<R>, cfg: &CalcConfig<R>) -> Result<Contour<R>> {
    cfg.validate()?;
    let info = crate::linalg::spectrum(m)?;

    // every eigenvalue must individually clear the cut
    let mut worst = info.eigenvalues[0];
    let mut worst_dist = R::max_value().unwrap();
    for &ev in &info.eigenvalues {
        let d = branch_cut_distance(ev);
        if d < worst_dist {
            worst_dist = d;
            worst = ev;
        }
    }
    if worst_dist < cfg.branch_margin {
        return Err(Error::BranchCutViolation {
            re: fl(worst.re),
            im: fl(worst.im),
            dist: fl(worst_dist),
        });
    }

    let n = info.eigenvalues.len();
    let mut center = Cx::new(R::zero(), R::zero());
    for &ev in &info.eigenvalues {
        center += ev;
    }
    center /= Cx::new(rf(n as f64), R::zero());

    let mut max_dist = R::zero();
    for &ev in &info.eigenvalues {
        let d = (ev - center).modulus();
        if d > max_dist {
            max_dist = d;
        }
    }

    let floor = rf::<R>(MIN_RADIUS_FACTOR) * (R::one() + info.spectral_radius);
    let mut radius = rf::<R>(RADIUS_FACTOR) * max_dist;
    if radius < floor {
        radius = floor;
    }
    // grow until the relative spectral clearance holds
    let needed = max_dist / (R::one() - cfg.spectral_margin);
    if radius < needed {
        radius = needed;
    }

    let cut_clearance = branch_cut_distance(center) - radius;
    if cut_clearance < cfg.branch_margin {
        return Err(Error::BranchCutViolation {
            re: fl(worst.re),
            im: fl(worst.im),
            dist: fl(cut_clearance.max(R::zero())),
        });
    }

    Ok(Contour {
        center,
        radius,
        nodes: cfg.initial_nodes,
    })
}

/// One trapezoidal pass with `nodes` points. With `zeta(theta) = c + r
/// e^{i theta}` the integral becomes `(1/n) sum_j f(zeta_j) r e^{i theta_j}
/// (zeta_j I - M)^{-1}`; terms are accumulated in index order so results
/// are reproducible for a fixed node count.
fn trapezoid_pass<R: RealScalar>(
    f: HoloFunction,
    m: &Operator<R>,
    contour: &Contour<R>,
    nodes: usize,
) -> Result<Operator<R>> {
    let d = m.dim();
    let id = DMatrix::<Cx<R>>::identity(d, d);
    let mut acc = DMatrix::<Cx<R>>::zeros(d, d);
    let two_pi = R::two_pi();
    let n_r = rf::<R>(nodes as f64);
    for j in 0..nodes {
        let theta = two_pi * rf::<R>(j as f64) / n_r;
        let dir = Cx::new(theta.cos(), theta.sin());
        let zeta = contour.center + dir * Cx::new(contour.radius, R::zero());
        // (zeta I - M)^{-1}
        let shifted = m.scale(Cx::new(-R::one(), R::zero())).shift(zeta);
        let resolvent = shifted.solve_matrix(&id)?;
        let weight = f.eval(zeta) * dir * Cx::new(contour.radius / n_r, R::zero());
        acc += resolvent * weight;
    }
    Ok(Operator::from_matrix_unchecked(acc))
}

/// Riesz-Dunford integral of `f` over a freshly built contour, with node
/// doubling until two successive passes agree to `quad_tol` in the
/// Frobenius norm.
pub fn riesz_dunford<R: RealScalar>(
    f: HoloFunction,
    m: &Operator<R>,
    cfg: &CalcConfig<R>,
) -> Result<Operator<R>> {
    if let HoloFunction::PrincipalRoot(0) = f {
        return Err(Error::InvalidInput("root order must be >= 1".into()));
    }
    let contour = build_contour(m, cfg)?;
    let mut nodes = contour.nodes;
    let mut prev = trapezoid_pass(f, m, &contour, nodes)?;
    let mut delta = R::max_value().unwrap();
    while nodes < cfg.max_nodes {
        nodes *= 2;
        let cur = trapezoid_pass(f, m, &contour, nodes)?;
        delta = cur.try_sub(&prev)?.norm_fro();
        prev = cur;
        if delta <= cfg.quad_tol {
            return Ok(prev);
        }
    }
    Err(Error::QuadratureNonconvergence {
        nodes,
        delta: fl(delta),
    })
}

/// Principal operator logarithm with an exponential round-trip guard:
/// the result must satisfy `|exp(Log m) - m| <= 1e-9 (1 + |m|)`.
pub fn principal_log<R: RealScalar>(m: &Operator<R>, cfg: &CalcConfig<R>) -> Result<Operator<R>> {
    let log = riesz_dunford(HoloFunction::PrincipalLog, m, cfg)?;
    let roundtrip = crate::linalg::operator_exp(&log);
    let resid = roundtrip.try_sub(m)?.norm_fro();
    let bound = rf::<R>(1e-9) * (R::one() + m.norm_fro());
    if resid > bound {
        return Err(Error::QuadratureNonconvergence {
            nodes: cfg.max_nodes,
            delta: fl(resid),
        });
    }
    Ok(log)
}

/// Principal n-th root with a power round-trip guard:
/// `|root^n - m| <= 1e-8 (1 + |m|)`.
pub fn principal_root<R: RealScalar>(
    m: &Operator<R>,
    n: u32,
    cfg: &CalcConfig<R>,
) -> Result<Operator<R>> {
    if n == 0 {
        return Err(Error::InvalidInput("root order must be >= 1".into()));
    }
    let root = riesz_dunford(HoloFunction::PrincipalRoot(n), m, cfg)?;
    let resid = root.power(n as usize).try_sub(m)?.norm_fro();
    let bound = rf::<R>(1e-8) * (R::one() + m.norm_fro());
    if resid > bound {
        return Err(Error::QuadratureNonconvergence {
            nodes: cfg.max_nodes,
            delta: fl(resid),
        });
    }
    Ok(root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigen_oracle, operator_exp, OracleFunction};
    use crate::scalar::cx;

    type Op = Operator<f64>;
    type Cfg = CalcConfig<f64>;

    #[test]
    fn contour_from_two_point_spectrum() {
        let c = build_contour(&Op::diag_re(&[2.0, 3.0]), &Cfg::default()).unwrap();
        assert!((c.center - cx::<f64>(2.5, 0.0)).norm() < 1e-9);
        assert!((c.radius - 0.6).abs() < 1e-9);
        // disk [1.9, 3.1] clear of the cut
        assert!(c.center.re - c.radius > 0.0);
    }

    #[test]
    fn contour_refuses_eigenvalue_on_cut() {
        assert!(matches!(
            build_contour(&Op::diag_re(&[-1.0, 1.0]), &Cfg::default()),
            Err(Error::BranchCutViolation { .. })
        ));
    }

    #[test]
    fn contour_for_identity_has_floor_radius() {
        let c = build_contour(&Op::identity(3), &Cfg::default()).unwrap();
        assert!((c.center - cx::<f64>(1.0, 0.0)).norm() < 1e-9);
        assert!(c.radius >= 0.05 && c.radius < 1.0 - 1e-3);
    }

    #[test]
    fn log_of_diagonal_matches_eigen_oracle() {
        let m = Op::diag_re(&[2.0, 3.0]);
        let log = riesz_dunford(HoloFunction::PrincipalLog, &m, &Cfg::default()).unwrap();
        let expected = Op::diag_re(&[2.0f64.ln(), 3.0f64.ln()]);
        assert!(
            log.try_sub(&expected).unwrap().norm_fro() < 1e-10,
            "delta {}",
            log.try_sub(&expected).unwrap().norm_fro()
        );
        let oracle = eigen_oracle(OracleFunction::Log, &m).unwrap();
        assert!(log.try_sub(&oracle).unwrap().norm_fro() < 1e-10);
    }

    #[test]
    fn log_of_identity_is_zero() {
        let log =
            riesz_dunford(HoloFunction::PrincipalLog, &Op::identity(2), &Cfg::default()).unwrap();
        assert!(log.norm_fro() < 1e-11);
    }

    #[test]
    fn sqrt_of_scalar_four_is_two() {
        let r = riesz_dunford(HoloFunction::PrincipalRoot(2), &Op::diag_re(&[4.0]), &Cfg::default())
            .unwrap();
        assert!((r.entry(0, 0) - cx::<f64>(2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn log_of_unipotent_jordan_block() {
        let m = Op::from_rows(2, &[cx(1.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)])
            .unwrap();
        let log = principal_log(&m, &Cfg::default()).unwrap();
        let expected =
            Op::from_rows(2, &[cx(0.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0)]).unwrap();
        assert!(
            log.try_sub(&expected).unwrap().norm_fro() < 1e-9,
            "delta {}",
            log.try_sub(&expected).unwrap().norm_fro()
        );
    }

    #[test]
    fn log_inverts_exponential_on_diagonal() {
        let m = Op::diag_re(&[1.0f64.exp(), 2.0f64.exp()]);
        let log = principal_log(&m, &Cfg::default()).unwrap();
        let expected = Op::diag_re(&[1.0, 2.0]);
        assert!(log.try_sub(&expected).unwrap().norm_fro() < 1e-9);
    }

    #[test]
    fn exp_log_roundtrip_on_shifted_random() {
        // spectrum pushed into the right half-plane by a real shift
        let base = Op::from_fn(5, |i, j| {
            cx(
                ((i * 5 + j * 7 + 1) as f64).sin() * 0.3,
                ((i as f64) - (j as f64)) * 0.08,
            )
        });
        let m = base.shift(cx(2.5, 0.0));
        let log = principal_log(&m, &Cfg::default()).unwrap();
        let back = operator_exp(&log);
        let rel = back.try_sub(&m).unwrap().norm_fro() / m.norm_fro();
        assert!(rel < 1e-9, "roundtrip relative error {rel}");
    }

    #[test]
    fn root_of_identity_is_identity() {
        for n in [1u32, 2, 3, 5] {
            let r = principal_root(&Op::identity(3), n, &Cfg::default()).unwrap();
            assert!(r.try_sub(&Op::identity(3)).unwrap().norm_fro() < 1e-10);
        }
    }

    #[test]
    fn cube_root_of_scalar_eight() {
        let r = principal_root(&Op::diag_re(&[8.0]), 3, &Cfg::default()).unwrap();
        assert!((r.entry(0, 0) - cx::<f64>(2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn square_root_squares_back_on_positive_spectrum() {
        let v = Op::from_fn(4, |i, j| {
            if i == j {
                cx(1.0, 0.0)
            } else {
                cx(((i * 3 + j) as f64).sin() * 0.2, 0.0)
            }
        });
        let vinv = v.inverse_default().unwrap();
        let m = v
            .try_mul(&Op::diag_re(&[0.8, 1.0, 1.5, 2.0]))
            .unwrap()
            .try_mul(&vinv)
            .unwrap();
        let r = principal_root(&m, 2, &Cfg::default()).unwrap();
        let resid = r.try_mul(&r).unwrap().try_sub(&m).unwrap().norm_fro();
        assert!(resid < 1e-9, "residual {resid}");
    }

    #[test]
    fn quadrature_agrees_with_oracle_on_rotated_spectrum() {
        // complex eigenvalues off the real axis
        let v = Op::from_fn(3, |i, j| {
            cx(
                if i == j { 1.0 } else { 0.15 * ((i + 2 * j) as f64).sin() },
                0.1 * ((i * j) as f64).cos(),
            )
        });
        let vinv = v.inverse_default().unwrap();
        let diag = Op::from_diagonal(&[cx(2.0, 0.7), cx(1.5, -0.5), cx(3.0, 0.2)]);
        let m = v.try_mul(&diag).unwrap().try_mul(&vinv).unwrap();
        let quad = riesz_dunford(HoloFunction::PrincipalLog, &m, &Cfg::default()).unwrap();
        let oracle = eigen_oracle(OracleFunction::Log, &m).unwrap();
        let gap = quad.try_sub(&oracle).unwrap().norm_fro();
        assert!(gap < 1e-10, "oracle gap {gap}");
    }

    #[test]
    fn node_doubling_converges_monotonically_once_resolved() {
        let m = Op::diag_re(&[1.0, 2.0, 3.0]);
        let cfg = Cfg::default();
        let contour = build_contour(&m, &cfg).unwrap();
        let oracle = eigen_oracle(OracleFunction::Log, &m).unwrap();
        let mut last_err = f64::INFINITY;
        let mut nodes = 64;
        while nodes <= 1024 {
            let pass = trapezoid_pass(HoloFunction::PrincipalLog, &m, &contour, nodes).unwrap();
            let err = pass.try_sub(&oracle).unwrap().norm_fro();
            assert!(
                err <= last_err * 1.0000001 || err < 1e-13,
                "error grew from {last_err} to {err} at {nodes} nodes"
            );
            last_err = err;
            nodes *= 2;
        }
    }
}
