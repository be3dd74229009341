//! Matrix exponential and logarithm for real and complex square matrices.

use nalgebra::{ComplexField, DMatrix};

use crate::error::{GeomError, Result};

pub type Complex = nalgebra::Complex<f64>;
pub type CMatrix = DMatrix<Complex>;

const EXP_TAYLOR_DEGREE: usize = 18;
const LOG_SERIES_MAX_TERMS: usize = 200;

fn ensure_square<T>(m: &DMatrix<T>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(GeomError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

/// `e^X` by scaling and squaring around a degree-18 Taylor core.
pub fn matrix_exp<T>(x: &DMatrix<T>) -> Result<DMatrix<T>>
where
    T: ComplexField<RealField = f64> + Copy,
{
    ensure_square(x)?;
    let n = x.nrows();
    let norm = x.norm();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = x.scale(0.5f64.powi(squarings));

    // Horner evaluation of sum_{k<=18} Y^k / k!.
    let id = DMatrix::<T>::identity(n, n);
    let mut acc = id.clone();
    for k in (1..=EXP_TAYLOR_DEGREE).rev() {
        acc = &id + (&scaled * acc).unscale(k as f64);
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    Ok(acc)
}

/// Gelfand estimate `||M^(2^p)||^(1/2^p)` of the spectral radius.
fn spectral_radius_estimate<T>(m: &DMatrix<T>) -> f64
where
    T: ComplexField<RealField = f64> + Copy,
{
    let mut p = m.clone();
    let mut log_scale = 0.0f64;
    let mut exponent = 1.0f64;
    for _ in 0..7 {
        let nrm = p.norm();
        if nrm == 0.0 {
            return 0.0;
        }
        // renormalise to avoid overflow while tracking the scale
        p = p.unscale(nrm);
        log_scale += nrm.ln() / exponent;
        p = &p * &p;
        exponent *= 2.0;
    }
    let nrm = p.norm();
    if nrm == 0.0 {
        return 0.0;
    }
    (log_scale + nrm.ln() / exponent).exp()
}

fn sqrt_denman_beavers<T>(a: &DMatrix<T>) -> Result<DMatrix<T>>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = DMatrix::<T>::identity(n, n);
    for _ in 0..60 {
        let y_inv = y.clone().try_inverse().ok_or(GeomError::Singular {
            what: "square-root iterate",
            det: 0.0,
        })?;
        let z_inv = z.clone().try_inverse().ok_or(GeomError::Singular {
            what: "square-root iterate",
            det: 0.0,
        })?;
        let y_next = (&y + z_inv).scale(0.5);
        let z_next = (&z + y_inv).scale(0.5);
        let delta = (&y_next - &y).norm();
        y = y_next;
        z = z_next;
        if delta <= 1e-15 * y.norm() {
            break;
        }
    }
    Ok(y)
}

/// Principal logarithm, restricted to matrices whose distance to the identity
/// has spectral radius below one.
pub fn matrix_log<T>(x: &DMatrix<T>) -> Result<DMatrix<T>>
where
    T: ComplexField<RealField = f64> + Copy,
{
    ensure_square(x)?;
    let n = x.nrows();
    let id = DMatrix::<T>::identity(n, n);
    let radius = spectral_radius_estimate(&(x - &id));
    if radius >= 1.0 {
        return Err(GeomError::LogOutOfRange { radius });
    }

    let mut m = x.clone();
    let mut roots = 0;
    while (&m - &id).norm() > 0.25 && roots < 16 {
        m = sqrt_denman_beavers(&m)?;
        roots += 1;
    }
    let y = &m - &id;
    let mut power = y.clone();
    let mut acc = y.clone();
    for k in 2..=LOG_SERIES_MAX_TERMS {
        power = &power * &y;
        let term = power.unscale(k as f64);
        if k % 2 == 0 {
            acc -= &term;
        } else {
            acc += &term;
        }
        if term.norm() < 1e-18 {
            break;
        }
    }
    Ok(acc.scale(2f64.powi(roots)))
}

/// Real matrix embedded as a complex one.
pub fn complexify(m: &DMatrix<f64>) -> CMatrix {
    m.map(|v| Complex::new(v, 0.0))
}

/// Real and imaginary parts stacked into one vector of length `2 * rows * cols`.
pub fn realify(m: &CMatrix) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * m.len());
    out.extend(m.iter().map(|z| z.re));
    out.extend(m.iter().map(|z| z.im));
    out
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_zero_is_identity() {
        let z = DMatrix::<f64>::zeros(4, 4);
        assert_eq!(matrix_exp(&z).unwrap(), DMatrix::identity(4, 4));
    }

    #[test]
    fn exp_of_diagonal() {
        let t = 1.7;
        let x = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![t, -t]));
        let e = matrix_exp(&x).unwrap();
        assert!((e[(0, 0)] - t.exp()).abs() < 1e-12 * t.exp());
        assert!((e[(1, 1)] - (-t).exp()).abs() < 1e-12);
        assert_eq!(e[(0, 1)], 0.0);
    }

    #[test]
    fn exp_rejects_non_square() {
        let x = DMatrix::<f64>::zeros(2, 3);
        assert!(matches!(matrix_exp(&x), Err(GeomError::NotSquare { .. })));
    }

    #[test]
    fn log_inverts_exp_near_identity() {
        let x = DMatrix::from_row_slice(3, 3, &[0.0, -0.4, 0.2, 0.4, 0.0, -0.3, -0.2, 0.3, 0.0]);
        let back = matrix_log(&matrix_exp(&x).unwrap()).unwrap();
        assert!((back - x).amax() < 1e-12);
    }

    #[test]
    fn log_of_complex_unitary() {
        let x = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex::new(0.0, 0.3),
                Complex::new(0.1, 0.2),
                Complex::new(-0.1, 0.2),
                Complex::new(0.0, -0.3),
            ],
        );
        let back = matrix_log(&matrix_exp(&x).unwrap()).unwrap();
        assert!((back - x).norm() < 1e-12);
    }

    #[test]
    fn log_refuses_far_from_identity() {
        // rotation by 2.5 rad: eigenvalues e^{+-2.5i}, |e^{2.5i} - 1| > 1
        let (s, c) = 2.5f64.sin_cos();
        let r = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        assert!(matches!(matrix_log(&r), Err(GeomError::LogOutOfRange { .. })));
    }
}
