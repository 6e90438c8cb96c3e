//! Closed forms for qubit entropy and divergence in Stokes coordinates.
//!
//! A qubit state with Bloch vector `s`, `n = |s|`, has
//! `log2 sigma = A(n) I + (atanh(n) / ln 2) s_hat . sigma_vec` where
//! `A(n) = (log2((1+n)/2) + log2((1-n)/2)) / 2`. Hence
//! `D(r || s) = -S(|r|) - A(|s|) - B(|s|) r . s` with `B(n) = atanh(n) / (n ln 2)`.

use std::f64::consts::LN_2;

use crate::channel::BlochPoint;

/// Lengths are clipped here before atanh so gradients stay finite on the sphere.
const EDGE: f64 = 1.0 - 1e-15;
const SMALL: f64 = 1e-4;

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Entropy (bits) of a qubit whose Bloch vector has length `n`.
pub fn entropy(n: f64) -> f64 {
    let n = n.clamp(0.0, 1.0);
    -(xlog2x(0.5 * (1.0 + n)) + xlog2x(0.5 * (1.0 - n)))
}

/// `A(n)`; `-inf` at `n = 1`.
pub fn a_coef(n: f64) -> f64 {
    0.5 * ((0.5 * (1.0 + n)).log2() + (0.5 * (1.0 - n)).log2())
}

pub fn a_prime(n: f64) -> f64 {
    let n = n.min(EDGE);
    -n / ((1.0 - n * n) * LN_2)
}

/// `B(n) = atanh(n) / (n ln 2)`, with its limit `1 / ln 2` at zero.
pub fn b_coef(n: f64) -> f64 {
    let n = n.min(EDGE);
    if n < SMALL {
        let n2 = n * n;
        (1.0 + n2 / 3.0 + n2 * n2 / 5.0) / LN_2
    } else {
        n.atanh() / (n * LN_2)
    }
}

pub fn b_prime(n: f64) -> f64 {
    let n = n.min(EDGE);
    if n < SMALL {
        (2.0 * n / 3.0 + 4.0 * n * n * n / 5.0) / LN_2
    } else {
        (n / (1.0 - n * n) - n.atanh()) / (n * n * LN_2)
    }
}

/// Divergence coefficients of a fixed reference state `s`.
#[derive(Clone, Copy, Debug)]
pub struct Reference {
    pub s: BlochPoint,
    pub a: f64,
    pub b: f64,
}

impl Reference {
    pub fn new(s: BlochPoint) -> Self {
        let n = s.norm();
        Self {
            s,
            a: a_coef(n),
            b: b_coef(n),
        }
    }

    /// `D(r || s)` given the precomputed entropy of `r`; `+inf` off the support.
    pub fn divergence_with_entropy(&self, r: BlochPoint, entropy_r: f64) -> f64 {
        if self.a.is_finite() {
            return -entropy_r - self.a - self.b * r.dot(self.s);
        }
        // Pure reference: finite only when r equals s.
        if r.sub(self.s).norm() < 1e-12 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn divergence(&self, r: BlochPoint) -> f64 {
        self.divergence_with_entropy(r, entropy(r.norm()))
    }
}

pub fn divergence(r: BlochPoint, s: BlochPoint) -> f64 {
    Reference::new(s).divergence(r)
}

/// `grad_r D(r || s) = B(|r|) r - B(|s|) s`.
pub fn grad_first(r: BlochPoint, s: BlochPoint) -> BlochPoint {
    r.scale(b_coef(r.norm())).sub(s.scale(b_coef(s.norm())))
}

/// `grad_s D(r || s) = -A'(n) s_hat - B'(n) (r . s) s_hat - B(n) r`.
pub fn grad_second(r: BlochPoint, s: BlochPoint) -> BlochPoint {
    let n = s.norm();
    let r_term = r.scale(-b_coef(n));
    if n == 0.0 {
        return r_term;
    }
    let s_hat = s.scale(1.0 / n);
    s_hat.scale(-a_prime(n) - b_prime(n) * r.dot(s)).add(r_term)
}
