//! Matrix exponential by Pade approximation with scaling and squaring.
//!
//! Order selection follows the usual theta thresholds on the 1-norm; the
//! degree-13 approximant with repeated squaring covers large norms. The
//! eigendecomposition oracle validates accuracy in the test suite.

use super::Operator;
use crate::scalar::{rf, Cx, RealScalar};

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA3: f64 = 1.495585217958292e-2;
const THETA5: f64 = 2.539398330063230e-1;
const THETA7: f64 = 9.504178996162932e-1;
const THETA9: f64 = 2.097847961257068;
const THETA13: f64 = 5.371920351148152;

/// `exp(m)`; always defined.
pub fn operator_exp<R: RealScalar>(m: &Operator<R>) -> Operator<R> {
    let norm = m.norm_1();
    if norm <= rf(THETA3) {
        return pade_low(m, &PADE3);
    }
    if norm <= rf(THETA5) {
        return pade_low(m, &PADE5);
    }
    if norm <= rf(THETA7) {
        return pade_low(m, &PADE7);
    }
    if norm <= rf(THETA9) {
        return pade_low(m, &PADE9);
    }
    // scale so the 1-norm drops below theta_13, then square back
    let mut squarings = 0u32;
    let mut scaled = m.clone();
    let norm_f = crate::scalar::fl(norm);
    if norm_f > THETA13 {
        squarings = (norm_f / THETA13).log2().ceil().max(1.0) as u32;
        let factor = rf::<R>(0.5).powi(squarings as i32);
        scaled = m.scale(Cx::new(factor, R::zero()));
    }
    let mut result = pade13(&scaled);
    for _ in 0..squarings {
        result = result.try_mul(&result).expect("square of square matrix");
    }
    result
}

/// Evaluate an odd/even split Pade approximant of degree 3..=9.
fn pade_low<R: RealScalar>(m: &Operator<R>, b: &[f64]) -> Operator<R> {
    let d = m.dim();
    let m2 = m.try_mul(m).expect("square");
    // powers of m^2: I, m^2, m^4, ...
    let mut even_pows = vec![Operator::identity(d)];
    let degree = b.len() - 1;
    for _ in 0..degree / 2 {
        let next = even_pows.last().unwrap().try_mul(&m2).expect("square");
        even_pows.push(next);
    }
    let mut u_acc = Operator::zeros(d);
    let mut v_acc = Operator::zeros(d);
    for (k, pw) in even_pows.iter().enumerate() {
        if 2 * k + 1 <= degree {
            u_acc = u_acc
                .try_add(&pw.scale(Cx::new(rf(b[2 * k + 1]), R::zero())))
                .unwrap();
        }
        v_acc = v_acc
            .try_add(&pw.scale(Cx::new(rf(b[2 * k]), R::zero())))
            .unwrap();
    }
    let u = m.try_mul(&u_acc).expect("square");
    pade_solve(&v_acc, &u)
}

fn pade13<R: RealScalar>(m: &Operator<R>) -> Operator<R> {
    let d = m.dim();
    let b = &PADE13;
    let m2 = m.try_mul(m).unwrap();
    let m4 = m2.try_mul(&m2).unwrap();
    let m6 = m4.try_mul(&m2).unwrap();
    let cr = |x: f64| Cx::new(rf::<R>(x), R::zero());

    let u_hi = m6
        .scale(cr(b[13]))
        .try_add(&m4.scale(cr(b[11])))
        .unwrap()
        .try_add(&m2.scale(cr(b[9])))
        .unwrap();
    let u_lo = m6
        .scale(cr(b[7]))
        .try_add(&m4.scale(cr(b[5])))
        .unwrap()
        .try_add(&m2.scale(cr(b[3])))
        .unwrap()
        .try_add(&Operator::identity(d).scale(cr(b[1])))
        .unwrap();
    let u = m
        .try_mul(&m6.try_mul(&u_hi).unwrap().try_add(&u_lo).unwrap())
        .unwrap();

    let v_hi = m6
        .scale(cr(b[12]))
        .try_add(&m4.scale(cr(b[10])))
        .unwrap()
        .try_add(&m2.scale(cr(b[8])))
        .unwrap();
    let v = m6
        .try_mul(&v_hi)
        .unwrap()
        .try_add(&m6.scale(cr(b[6])))
        .unwrap()
        .try_add(&m4.scale(cr(b[4])))
        .unwrap()
        .try_add(&m2.scale(cr(b[2])))
        .unwrap()
        .try_add(&Operator::identity(d).scale(cr(b[0])))
        .unwrap();

    pade_solve(&v, &u)
}

/// `(V - U)^{-1} (V + U)`.
fn pade_solve<R: RealScalar>(v: &Operator<R>, u: &Operator<R>) -> Operator<R> {
    let denom = v.try_sub(u).unwrap();
    let numer = v.try_add(u).unwrap();
    let solved = denom
        .solve_matrix(numer.matrix())
        .expect("Pade denominator of the exponential is nonsingular");
    Operator::from_matrix_unchecked(solved)
}
