//! Dense 2x2 complex matrices and SU(2) helpers.
//!
//! Everything downstream (holonomies, gluing frames, twist factors) is a
//! product of these. The type is `Copy` and all operations are allocation
//! free, so routing a multicurve costs a handful of fused multiplies per
//! step.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Row-major 2x2 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub m: [[Complex64; 2]; 2],
}

pub const I: Complex64 = Complex64::new(0.0, 1.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl Mat2 {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2 { m: [[a, b], [c, d]] }
    }

    pub fn identity() -> Self {
        Mat2::new(ONE, ZERO, ZERO, ONE)
    }

    /// diag(e^{ix}, e^{-ix}).
    pub fn rotation(x: f64) -> Self {
        let e = Complex64::from_polar(1.0, x);
        Mat2::new(e, ZERO, ZERO, e.conj())
    }

    /// Twist factor diag(e^{2*pi*i*theta}, e^{-2*pi*i*theta}) for theta on the unit circle.
    pub fn twist(theta: f64) -> Self {
        Mat2::rotation(2.0 * std::f64::consts::PI * theta)
    }

    /// Eigenline swap [[0,-1],[1,0]]; conjugation by it sends rotation(x) to rotation(-x).
    pub fn eigen_swap() -> Self {
        Mat2::new(ZERO, -ONE, ONE, ZERO)
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let a = &self.m;
        let b = &rhs.m;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Adjugate inverse; requires det != 0.
    pub fn inverse(&self) -> Mat2 {
        let d = self.det();
        Mat2::new(
            self.m[1][1] / d,
            -self.m[0][1] / d,
            -self.m[1][0] / d,
            self.m[0][0] / d,
        )
    }

    pub fn adjoint(&self) -> Mat2 {
        Mat2::new(
            self.m[0][0].conj(),
            self.m[1][0].conj(),
            self.m[0][1].conj(),
            self.m[1][1].conj(),
        )
    }

    /// Integer power; negative exponents go through the inverse.
    pub fn powi(&self, n: i64) -> Mat2 {
        let base = if n < 0 { self.inverse() } else { *self };
        let mut acc = Mat2::identity();
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// max |entry| of self - rhs.
    pub fn distance(&self, rhs: &Mat2) -> f64 {
        let mut d = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                d = d.max((self.m[r][c] - rhs.m[r][c]).norm());
            }
        }
        d
    }

    /// max of |U U* - I| entries and |det - 1|.
    pub fn special_unitary_defect(&self) -> f64 {
        let uu = self.mul(&self.adjoint());
        uu.distance(&Mat2::identity()).max((self.det() - ONE).norm())
    }

    /// Unit quaternion (x0 + x1 i + x2 j + x3 k) as an SU(2) matrix.
    pub fn from_quaternion(x: [f64; 4]) -> Mat2 {
        let [x0, x1, x2, x3] = x;
        Mat2::new(
            Complex64::new(x0, x1),
            Complex64::new(x2, x3),
            Complex64::new(-x2, x3),
            Complex64::new(x0, -x1),
        )
    }
}

/// Haar-ish random SU(2) point: uniform on S^3 by rejection from the 4-cube.
pub fn random_su2<R: rand::Rng>(rng: &mut R) -> Mat2 {
    loop {
        let x: [f64; 4] = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let n2: f64 = x.iter().map(|v| v * v).sum();
        if n2 > 1e-12 && n2 <= 1.0 {
            let n = n2.sqrt();
            return Mat2::from_quaternion([x[0] / n, x[1] / n, x[2] / n, x[3] / n]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rotation_times_inverse_is_identity() {
        let r = Mat2::rotation(0.7);
        assert!(r.mul(&r.inverse()).distance(&Mat2::identity()) < 1e-15);
    }

    #[test]
    fn eigen_swap_conjugates_rotation_to_inverse() {
        let s = Mat2::eigen_swap();
        let r = Mat2::rotation(1.3);
        let conj = s.mul(&r).mul(&s.inverse());
        assert!(conj.distance(&r.inverse()) < 1e-15);
    }

    #[test]
    fn random_su2_is_special_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let u = random_su2(&mut rng);
            assert!(u.special_unitary_defect() < 1e-12);
        }
    }

    #[test]
    fn powi_matches_repeated_multiplication() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_su2(&mut rng);
        let mut acc = Mat2::identity();
        for _ in 0..5 {
            acc = acc.mul(&u);
        }
        assert!(u.powi(5).distance(&acc) < 1e-14);
        assert!(u.powi(-2).distance(&u.inverse().mul(&u.inverse())) < 1e-14);
    }
}
