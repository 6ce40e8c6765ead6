//! Constant-coefficient tridiagonal solves (Thomas algorithm).

/// Factored form of the symmetric Toeplitz matrix with diagonal `d` and
/// off-diagonal `e`, of size `n`.
#[derive(Debug, Clone)]
pub struct Toeplitz3 {
    e: f64,
    inv_pivot: Vec<f64>,
    c_prime: Vec<f64>,
}

impl Toeplitz3 {
    pub fn new(n: usize, d: f64, e: f64) -> Self {
        let mut c_prime = vec![0.0; n];
        let mut inv_pivot = vec![0.0; n];
        let mut prev = 0.0;
        for i in 0..n {
            let pivot = d - e * prev;
            inv_pivot[i] = 1.0 / pivot;
            c_prime[i] = e / pivot;
            prev = c_prime[i];
        }
        Self {
            e,
            inv_pivot,
            c_prime,
        }
    }

    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    /// Solves in place.
    pub fn solve(&self, rhs: &mut [f64]) {
        let n = self.len();
        debug_assert_eq!(rhs.len(), n);
        if n == 0 {
            return;
        }
        rhs[0] = flush(rhs[0] * self.inv_pivot[0]);
        for i in 1..n {
            rhs[i] = flush((rhs[i] - self.e * rhs[i - 1]) * self.inv_pivot[i]);
        }
        for i in (0..n - 1).rev() {
            rhs[i] = flush(rhs[i] - self.c_prime[i] * rhs[i + 1]);
        }
    }
}

/// Values below this magnitude are set to zero. Implicit solves spread
/// geometrically decaying tails over the whole grid, and subnormal tails
/// slow the arithmetic down by orders of magnitude.
const FLUSH: f64 = 1e-250;

#[inline]
fn flush(x: f64) -> f64 {
    if x.abs() < FLUSH {
        0.0
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_discrete_laplacian() {
        let n = 50;
        let m = Toeplitz3::new(n, 2.0, -1.0);
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let mut b = vec![0.0; n];
        for i in 0..n {
            b[i] = 2.0 * x[i];
            if i > 0 {
                b[i] -= x[i - 1];
            }
            if i + 1 < n {
                b[i] -= x[i + 1];
            }
        }
        m.solve(&mut b);
        for i in 0..n {
            assert!((b[i] - x[i]).abs() < 1e-10);
        }
    }
}
