//! 2x2 unitary algebra on the coin (polarization) space.
//!
//! Every matrix is expressed in the circular basis ordered `(|L>, |R>)`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Tolerance used when a caller asks whether a matrix is unitary.
pub const UNITARY_TOL: f64 = 1e-12;
/// Deviation beyond which `power` refuses its input.
pub const POWER_REJECT_TOL: f64 = 1e-8;
/// Powers above this use phase scaling instead of repeated products.
pub const POWER_PRODUCT_LIMIT: u32 = 32;

/// A 2x2 complex matrix acting on the coin space, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct Su2Matrix {
    m: [[C64; 2]; 2],
}

impl fmt::Debug for Su2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{:.6}, {:.6}], [{:.6}, {:.6}]]",
            self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1]
        )
    }
}

impl Su2Matrix {
    pub const IDENTITY: Su2Matrix = Su2Matrix {
        m: [[ONE, ZERO], [ZERO, ONE]],
    };

    /// Wrap entries without checking unitarity.
    pub const fn new(m: [[C64; 2]; 2]) -> Self {
        Self { m }
    }

    /// Wrap entries, rejecting anything further than [`UNITARY_TOL`] from unitary.
    pub fn try_new(m: [[C64; 2]; 2]) -> Result<Self> {
        let u = Self { m };
        let deviation = u.unitarity_error();
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(u)
    }

    pub fn diag(a: C64, d: C64) -> Self {
        Self::new([[a, ZERO], [ZERO, d]])
    }

    pub fn entries(&self) -> [[C64; 2]; 2] {
        self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.m[row][col]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self::new([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn scale(&self, s: C64) -> Self {
        let m = &self.m;
        Self::new([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// Largest entry of `|U^dagger U - I|`.
    pub fn unitarity_error(&self) -> f64 {
        let p = self.adjoint() * *self;
        p.max_abs_diff(&Self::IDENTITY)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.m[r][c] - other.m[r][c]).norm());
            }
        }
        worst
    }

    /// Split `U = e^{i phi} V` with `det V = 1`, returning `(phi, V)`.
    ///
    /// `phi` is half the determinant argument, so it lies in `(-pi/2, pi/2]`.
    pub fn split_global_phase(&self) -> (f64, Su2Matrix) {
        let phi = self.det().arg() / 2.0;
        (phi, self.scale(C64::from_polar(1.0, -phi)))
    }

    /// `U^tau`.
    ///
    /// Powers up to [`POWER_PRODUCT_LIMIT`] are exact products; larger powers
    /// scale the eigenphases, which keeps the error independent of `tau`.
    pub fn power(&self, tau: u32) -> Result<Self> {
        let deviation = self.unitarity_error();
        if deviation > POWER_REJECT_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        if tau <= POWER_PRODUCT_LIMIT {
            let mut acc = Self::IDENTITY;
            for _ in 0..tau {
                acc = *self * acc;
            }
            return Ok(acc);
        }
        let (phi, v) = self.split_global_phase();
        let c = pauli_decompose(&v);
        // V = cos(a) I - i sin(a) n.sigma, so c_k = -i sin(a) n_k.
        let cos_a = c.c[0].re;
        let sin_a = (c.c[1].norm_sqr() + c.c[2].norm_sqr() + c.c[3].norm_sqr()).sqrt();
        let t = tau as f64;
        let vt = if sin_a == 0.0 {
            let s = if cos_a < 0.0 && tau % 2 == 1 {
                -1.0
            } else {
                1.0
            };
            Self::IDENTITY.scale(C64::new(s, 0.0))
        } else {
            let a = sin_a.atan2(cos_a);
            let ratio = (t * a).sin() / sin_a;
            pauli_compose(&PauliComponents {
                c: [
                    C64::new((t * a).cos(), 0.0),
                    c.c[1] * ratio,
                    c.c[2] * ratio,
                    c.c[3] * ratio,
                ],
            })
        };
        Ok(vt.scale(C64::from_polar(1.0, t * phi)))
    }

    /// Arguments of the two eigenvalues in `(-pi, pi]`, larger first.
    pub fn eigenphases(&self) -> (f64, f64) {
        let (phi, v) = self.split_global_phase();
        let c = pauli_decompose(&v);
        let sin_a = (c.c[1].norm_sqr() + c.c[2].norm_sqr() + c.c[3].norm_sqr()).sqrt();
        let a = sin_a.atan2(c.c[0].re);
        let e1 = wrap_phase(phi + a);
        let e2 = wrap_phase(phi - a);
        if e1 >= e2 {
            (e1, e2)
        } else {
            (e2, e1)
        }
    }

    /// `1 - |Tr(U^dagger V)| / 2`: zero exactly when the two agree up to a
    /// global phase.
    pub fn phase_distance(&self, other: &Self) -> f64 {
        let overlap = (self.adjoint() * *other).trace().norm() / 2.0;
        (1.0 - overlap).clamp(0.0, 1.0)
    }
}

impl Mul for Su2Matrix {
    type Output = Su2Matrix;

    fn mul(self, rhs: Su2Matrix) -> Su2Matrix {
        let a = &self.m;
        let b = &rhs.m;
        Su2Matrix::new([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

/// Map an angle into `(-pi, pi]`.
pub fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Jones matrix of a uniform liquid-crystal retarder with retardation
/// `delta` and optic axis at `theta` from the x axis.
pub fn waveplate(delta: f64, theta: f64) -> Su2Matrix {
    let (s, c) = (delta / 2.0).sin_cos();
    let off = I * s;
    Su2Matrix::new([
        [C64::new(c, 0.0), off * C64::from_polar(1.0, -2.0 * theta)],
        [off * C64::from_polar(1.0, 2.0 * theta), C64::new(c, 0.0)],
    ])
}

/// Coefficients of `U = sum_a c_a sigma_a` (sigma_0 = identity).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliComponents {
    pub c: [C64; 4],
}

pub fn pauli_decompose(u: &Su2Matrix) -> PauliComponents {
    let m = u.entries();
    let half = 0.5;
    PauliComponents {
        c: [
            (m[0][0] + m[1][1]) * half,
            (m[0][1] + m[1][0]) * half,
            I * (m[0][1] - m[1][0]) * half,
            (m[0][0] - m[1][1]) * half,
        ],
    }
}

pub fn pauli_compose(p: &PauliComponents) -> Su2Matrix {
    let [c0, c1, c2, c3] = p.c;
    Su2Matrix::new([[c0 + c3, c1 - I * c2], [c1 + I * c2, c0 - c3]])
}
