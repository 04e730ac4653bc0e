use crate::error::{Error, Precondition, Result};
use crate::matrix::{FieldElem, Matrix, RingElem, SigmaScalar};
use crate::padic::{complex_root_magnitudes, newton_polygon, IntPolynomial, NewtonPolygon, PadicNumber};

/// Frobenius at a closed point of degree `deg`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointFrobenius<T> {
    pub q: u64,
    pub deg: u32,
    pub matrix: Matrix<T>,
}

impl<T: SigmaScalar> PointFrobenius<T> {
    pub fn new(q: u64, deg: u32, matrix: Matrix<T>) -> Result<Self> {
        if !matrix.is_square() || deg == 0 {
            return Err(Error::InvalidInput("point Frobenius needs a square matrix and positive degree".into()));
        }
        Ok(PointFrobenius { q, deg, matrix })
    }

    /// The Frobenius of the point: `F^[deg]`.
    pub fn frob(&self) -> Result<Matrix<T>> {
        frob_iterate(&self.matrix, self.deg as i64)
    }
}

/// `F^[n] = F sigma(F) ... sigma^{n-1}(F)` for `n > 0`, the identity for
/// `n = 0` and `sigma^{n}(F^[-n])^{-1}` for `n < 0`.
pub fn frob_iterate<T: SigmaScalar>(f: &Matrix<T>, n: i64) -> Result<Matrix<T>> {
    if !f.is_square() || f.rows() == 0 {
        return Err(Error::DimensionMismatch("Frobenius must be a nonempty square matrix".into()));
    }
    let sample = f.get(0, 0);
    if n == 0 {
        return Ok(Matrix::identity_like(f.rows(), sample));
    }
    if n < 0 {
        let pos = frob_iterate(f, -n)?;
        return pos.sigma_pow(n).inverse().map_err(|_| Error::SingularFrobenius);
    }
    let mut acc = f.clone();
    let mut twist = f.clone();
    for _ in 1..n {
        twist = twist.sigma();
        acc = acc.mul(&twist)?;
    }
    Ok(acc)
}

fn inverse_or_singular<T: FieldElem>(m: &Matrix<T>) -> Result<Matrix<T>> {
    m.inverse().map_err(|_| Error::SingularFrobenius)
}

fn agree<T: RingElem>(a: &Matrix<T>, b: &Matrix<T>) -> Result<bool> {
    a.agrees_with(b)
}

fn divide_by<T: FieldElem>(m: &Matrix<T>, k: usize) -> Result<Matrix<T>> {
    let inv = m.get(0, 0).from_int_like(k as i64).inv_r()?;
    m.scale(&inv)
}

/// Averages `pi` over the Frobenius orbit:
/// `(1/n) sum_{i<n} F^[i] sigma^i(pi) (F^[i])^{-1}`.
pub fn average_projector<T: SigmaScalar>(pi: &Matrix<T>, f: &Matrix<T>, n: usize) -> Result<Matrix<T>> {
    if n == 0 {
        return Err(Error::InvalidInput("orbit length must be positive".into()));
    }
    if pi.rows() != f.rows() || !pi.is_square() {
        return Err(Error::DimensionMismatch("projector and Frobenius sizes differ".into()));
    }
    if !agree(&pi.mul(pi)?, pi)? {
        return Err(Error::PreconditionFailed(Precondition::NotIdempotent));
    }
    let fnn = frob_iterate(f, n as i64)?;
    if !agree(&fnn.mul(&pi.sigma_pow(n as i64))?, &pi.mul(&fnn)?)? {
        return Err(Error::PreconditionFailed(Precondition::NotCommutingWithIterate));
    }
    let mut terms = vec![];
    for i in 0..n {
        let fi = frob_iterate(f, i as i64)?;
        let moved = fi.mul(&pi.sigma_pow(i as i64))?;
        if !agree(&pi.mul(&moved)?, &moved)? {
            return Err(Error::PreconditionFailed(Precondition::ImageNotStable));
        }
        terms.push(moved.mul(&inverse_or_singular(&fi)?)?);
    }
    let mut sum = terms[0].clone();
    for t in &terms[1..] {
        sum = sum.add(t)?;
    }
    divide_by(&sum, n)
}

/// Averages `pi` over a finite group acting through `iota`:
/// `(1/|G|) sum_g iota_g pi iota_g^{-1}`. `table[h][g]` is the index of `hg`.
pub fn average_projector_group<T: SigmaScalar>(
    pi: &Matrix<T>,
    iota: &[Matrix<T>],
    table: &[Vec<usize>],
) -> Result<Matrix<T>> {
    let g = iota.len();
    if g == 0 || table.len() != g || table.iter().any(|r| r.len() != g || r.iter().any(|&x| x >= g)) {
        return Err(Error::InvalidInput("group table does not match the cocycle".into()));
    }
    for h in 0..g {
        for k in 0..g {
            if !agree(&iota[h].mul(&iota[k])?, &iota[table[h][k]])? {
                return Err(Error::CocycleViolated { g: k, h });
            }
        }
    }
    if !agree(&pi.mul(pi)?, pi)? {
        return Err(Error::PreconditionFailed(Precondition::NotIdempotent));
    }
    let mut sum: Option<Matrix<T>> = None;
    for m in iota {
        let moved = m.mul(pi)?;
        if !agree(&pi.mul(&moved)?, &moved)? {
            return Err(Error::PreconditionFailed(Precondition::ImageNotStable));
        }
        let t = moved.mul(&inverse_or_singular(m)?)?;
        sum = Some(match sum {
            None => t,
            Some(s) => s.add(&t)?,
        });
    }
    divide_by(&sum.unwrap(), g)
}

/// Block matrix with identity blocks on the superdiagonal and `F_G` in the
/// lower-left corner. Its `n`-th iterate is
/// `blockdiag(sigma^{n-1}(F_G), ..., sigma(F_G), F_G)`.
pub fn block_companion<T: SigmaScalar>(fg: &Matrix<T>, n: usize) -> Result<Matrix<T>> {
    if n == 0 || !fg.is_square() || fg.rows() == 0 {
        return Err(Error::InvalidInput("block companion needs n >= 1 and a square block".into()));
    }
    if n == 1 {
        return Ok(fg.clone());
    }
    let r = fg.rows();
    let s = fg.get(0, 0);
    let (zero, one) = (s.zero_like(), s.one_like());
    Ok(Matrix::from_fn(n * r, n * r, |i, j| {
        let (bi, bj, ii, jj) = (i / r, j / r, i % r, j % r);
        if bi == n - 1 && bj == 0 {
            fg.get(ii, jj).clone()
        } else if bj == bi + 1 && ii == jj {
            one.clone()
        } else {
            zero.clone()
        }
    }))
}

/// Coefficients of `det(T I - F)`, leading coefficient first.
pub fn char_coeffs<T: RingElem>(f: &Matrix<T>) -> Result<Vec<T>> {
    f.char_poly()
}

/// Slopes of the Newton polygon of the characteristic polynomial.
pub fn newton_slopes_frob(f: &Matrix<PadicNumber>) -> Result<NewtonPolygon> {
    let mut c = f.char_poly()?;
    c.reverse();
    newton_polygon(&c)
}

pub fn is_unit_root(f: &Matrix<PadicNumber>) -> Result<bool> {
    let np = newton_slopes_frob(f)?;
    Ok(np.zero_roots == 0 && np.slopes.iter().all(|(s, _)| *s == num_rational::Rational64::from(0)))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Purity {
    Pure { magnitudes: Vec<f64> },
    Impure { witness: f64, magnitudes: Vec<f64> },
}

impl Purity {
    pub fn is_pure(&self) -> bool {
        matches!(self, Purity::Pure { .. })
    }
}

/// Checks `|alpha| = q^{w deg / 2}` for the eigenvalues `alpha` of the
/// Frobenius of a point of degree `deg`, given `det(1 - t^deg Frob)`.
/// Magnitudes are reported for the eigenvalues and compared with relative
/// tolerance `tol`.
pub fn purity_check(local: &IntPolynomial, q: u64, deg: u32, w: i64, tol: f64) -> Result<Purity> {
    if local.coeff(0) != num_bigint::BigInt::from(1) {
        return Err(Error::InvalidInput("local factor must have constant term 1".into()));
    }
    let d = deg.max(1) as usize;
    let in_powers = local.coeffs().iter().enumerate().all(|(i, c)| i % d == 0 || *c == num_bigint::BigInt::from(0));
    let (poly, root_power) = if in_powers && d > 1 {
        let c: Vec<_> = local.coeffs().iter().step_by(d).cloned().collect();
        (IntPolynomial::new(c), 1)
    } else {
        (local.clone(), d as i32)
    };
    let magnitudes: Vec<f64> = complex_root_magnitudes(&poly)?.into_iter().map(|m| m.powi(root_power)).collect();
    let target = (q as f64).powf(w as f64 * deg as f64 / 2.0);
    let dev = |m: f64| ((m - target) / target).abs();
    let worst = magnitudes.iter().copied().fold(None, |acc: Option<f64>, m| match acc {
        Some(a) if dev(a) >= dev(m) => Some(a),
        _ => Some(m),
    });
    match worst {
        Some(m) if dev(m) > tol => Ok(Purity::Impure { witness: m, magnitudes }),
        _ => Ok(Purity::Pure { magnitudes }),
    }
}
