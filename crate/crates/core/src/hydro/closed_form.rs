use statrs::distribution::{Continuous, ContinuousCDF, Normal};

/// Closed-form limit law for the constant rate symmetric zero range process.
#[derive(Clone, Debug)]
pub struct SymZrClosedForm {
    rho: f64,
    lambda: f64,
    a: f64,
    normal: Normal,
}

impl SymZrClosedForm {
    pub fn new(rho: f64, lambda: f64) -> Self {
        assert!(rho >= lambda && lambda >= 0.0, "need rho >= lambda >= 0");
        Self {
            rho,
            lambda,
            a: 1.0 / (1.0 + lambda) - 1.0 / (1.0 + rho),
            normal: Normal::standard(),
        }
    }

    pub fn h(&self, y: f64) -> f64 {
        y / (1.0 + self.rho) + self.a * (self.normal.pdf(y) + y * self.normal.cdf(y))
    }

    pub fn h_prime(&self, y: f64) -> f64 {
        1.0 / (1.0 + self.rho) + self.a * self.normal.cdf(y)
    }

    /// Inverse of `h` by bisection.
    pub fn h_inv(&self, v: f64) -> f64 {
        let h0 = self.h(0.0);
        let (b1, b2) = ((v - h0) * (1.0 + self.rho), (v - h0) * (1.0 + self.lambda));
        let (mut lo, mut hi) = (b1.min(b2) - 1e-9, b1.max(b2) + 1e-9);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.h(mid) < v {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Density profile `u(x, t)`.
    pub fn u(&self, x: f64, t: f64) -> f64 {
        1.0 / self.h_prime(self.h_inv(x / t.sqrt())) - 1.0
    }

    pub fn cdf(&self, x: f64, t: f64) -> f64 {
        if self.rho == self.lambda {
            return if x >= 0.0 { 1.0 } else { 0.0 };
        }
        let span = self.rho - self.lambda;
        let z = self.h_inv(x / t.sqrt());
        (self.rho + 1.0) / span - 1.0 / (span * self.h_prime(z))
    }

    pub fn density(&self, x: f64, t: f64) -> f64 {
        if self.rho == self.lambda {
            return 0.0;
        }
        let z = self.h_inv(x / t.sqrt());
        self.normal.pdf(z) / (t.sqrt() * (1.0 + self.rho) * (1.0 + self.lambda) * self.h_prime(z).powi(3))
    }
}

/// `(F_t(x), f_t(x))` for the constant rate symmetric zero range process.
pub fn closed_form_sym_zr(rho: f64, lambda: f64, x: f64, t: f64) -> (f64, f64) {
    let c = SymZrClosedForm::new(rho, lambda);
    (c.cdf(x, t), c.density(x, t))
}
