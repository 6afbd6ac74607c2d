//! Truncated Taylor series ("jets") for exact pointwise differentiation.

use std::ops::{Add, Mul, Neg, Sub};

/// Coefficients c_j = f^{(j)}(x₀)/j! for j = 0..=order.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet(pub Vec<f64>);

impl Jet {
    pub fn constant(v: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = v;
        Jet(c)
    }

    /// The identity map x ↦ x expanded at x₀.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = x0;
        if order >= 1 {
            c[1] = 1.0;
        }
        Jet(c)
    }

    /// Jet from derivative values f^{(j)}(x₀).
    pub fn from_derivatives(d: &[f64]) -> Self {
        let mut fact = 1.0;
        Jet(d
            .iter()
            .enumerate()
            .map(|(j, v)| {
                if j > 0 {
                    fact *= j as f64;
                }
                v / fact
            })
            .collect())
    }

    pub fn derivatives(&self) -> Vec<f64> {
        let mut fact = 1.0;
        self.0
            .iter()
            .enumerate()
            .map(|(j, c)| {
                if j > 0 {
                    fact *= j as f64;
                }
                c * fact
            })
            .collect()
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    pub fn truncate(&self, order: usize) -> Self {
        Jet(self.0[..=order.min(self.order())].to_vec())
    }

    pub fn scale(&self, s: f64) -> Self {
        Jet(self.0.iter().map(|c| c * s).collect())
    }

    /// d/dx, losing one order.
    pub fn deriv(&self) -> Self {
        if self.0.len() == 1 {
            return Jet(vec![0.0]);
        }
        Jet((1..self.0.len()).map(|j| j as f64 * self.0[j]).collect())
    }

    pub fn recip(&self) -> Self {
        let c = &self.0;
        let mut out = vec![0.0; c.len()];
        out[0] = 1.0 / c[0];
        for j in 1..c.len() {
            let s: f64 = (1..=j).map(|i| c[i] * out[j - i]).sum();
            out[j] = -s / c[0];
        }
        Jet(out)
    }

    pub fn sqrt(&self) -> Self {
        let c = &self.0;
        let mut out = vec![0.0; c.len()];
        out[0] = c[0].sqrt();
        for j in 1..c.len() {
            let s: f64 = (1..j).map(|i| out[i] * out[j - i]).sum();
            out[j] = (c[j] - s) / (2.0 * out[0]);
        }
        Jet(out)
    }

    /// f ∘ g where `outer` holds f^{(j)}(g(x₀)) for j = 0..=order.
    pub fn compose(outer: &[f64], inner: &Jet) -> Self {
        let order = inner.order().min(outer.len() - 1);
        let mut delta = inner.truncate(order);
        delta.0[0] = 0.0;
        let mut out = Jet::constant(0.0, order);
        let mut power = Jet::constant(1.0, order);
        let mut fact = 1.0;
        for (j, d) in outer.iter().enumerate().take(order + 1) {
            if j > 0 {
                fact *= j as f64;
                power = &power * &delta;
            }
            let coef = d / fact;
            for (o, p) in out.0.iter_mut().zip(&power.0) {
                *o += coef * p;
            }
        }
        out
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        let m = self.0.len().min(o.0.len());
        Jet((0..m).map(|j| self.0[j] + o.0[j]).collect())
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        let m = self.0.len().min(o.0.len());
        Jet((0..m).map(|j| self.0[j] - o.0[j]).collect())
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        let m = self.0.len().min(o.0.len());
        Jet((0..m).map(|j| (0..=j).map(|i| self.0[i] * o.0[j - i]).sum()).collect())
    }
}
