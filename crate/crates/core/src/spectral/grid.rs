use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Wavevector storage; only the first `dim` entries are meaningful.
pub type Wavevector = [f64; 3];

/// A periodic box `[0, L)^d` sampled with `n` points per axis.
///
/// Frequencies follow the usual transform order per axis,
/// `0, 1, ..., n/2 - 1, -n/2, ..., -1`, scaled by `2π/L`.
/// Flat indices are row-major with axis 0 slowest.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    dim: usize,
    n: usize,
    length: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, length: f64) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::arg(format!("dimension must be 2 or 3, got {dim}")));
        }
        if n < 8 || n % 2 != 0 {
            return Err(Error::arg(format!("modes per axis must be even and >= 8, got {n}")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::arg(format!("domain length must be positive, got {length}")));
        }
        Ok(Self { dim, n, length })
    }

    /// Grid on the standard torus `[0, 2π)^d`.
    pub fn periodic(dim: usize, n: usize) -> Result<Self> {
        Self::new(dim, n, 2.0 * PI)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Total number of grid points (and of Fourier modes), `n^d`.
    pub fn modes(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// Frequency spacing `2π/L`.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Physical cell volume `(L/n)^d`.
    pub fn cell_measure_x(&self) -> f64 {
        (self.length / self.n as f64).powi(self.dim as i32)
    }

    /// Frequency cell volume `(2π/L)^d`.
    pub fn cell_measure_xi(&self) -> f64 {
        self.dk().powi(self.dim as i32)
    }

    /// Factor converting normalized DFT coefficients into samples of the
    /// unitary continuum transform of one period, `(2π)^{-d/2} L^d`.
    pub fn density_factor(&self) -> f64 {
        (2.0 * PI).powf(-(self.dim as f64) / 2.0) * self.length.powi(self.dim as i32)
    }

    /// Signed wavenumber of axis position `i`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Axis position of signed wavenumber `k` (taken modulo `n`).
    pub fn position(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    /// Signed integer wavevector of a flat mode index.
    pub fn mode(&self, flat: usize) -> [i64; 3] {
        let mut out = [0i64; 3];
        let mut rem = flat;
        for axis in (0..self.dim).rev() {
            out[axis] = self.wavenumber(rem % self.n);
            rem /= self.n;
        }
        out
    }

    pub fn flat_index(&self, k: &[i64]) -> usize {
        k.iter().take(self.dim).fold(0usize, |acc, &ki| acc * self.n + self.position(ki))
    }

    /// Flat index of `-k`.
    pub fn negated(&self, flat: usize) -> usize {
        let k = self.mode(flat);
        let neg = [-k[0], -k[1], -k[2]];
        self.flat_index(&neg[..self.dim])
    }

    pub fn is_nyquist(&self, k: i64) -> bool {
        k == -(self.n as i64) / 2
    }

    /// Physical wavevector `ξ = (2π/L) k`.
    pub fn xi(&self, flat: usize) -> Wavevector {
        let k = self.mode(flat);
        let dk = self.dk();
        let mut xi = [0.0; 3];
        for a in 0..self.dim {
            xi[a] = dk * k[a] as f64;
        }
        xi
    }

    /// Wavevector used by odd symbols (first derivatives, Riesz, Leray):
    /// the Nyquist component is replaced by zero so that real fields stay real.
    pub fn xi_odd(&self, flat: usize) -> Wavevector {
        let k = self.mode(flat);
        let dk = self.dk();
        let mut xi = [0.0; 3];
        for a in 0..self.dim {
            if !self.is_nyquist(k[a]) {
                xi[a] = dk * k[a] as f64;
            }
        }
        xi
    }

    pub fn xi_norm2(&self, flat: usize) -> f64 {
        self.xi(flat).iter().map(|x| x * x).sum()
    }

    /// True when every component satisfies `|k_i| <= cutoff`.
    pub fn within_box(&self, flat: usize, cutoff: i64) -> bool {
        self.mode(flat)[..self.dim].iter().all(|k| k.abs() <= cutoff)
    }

    /// Largest retained `|k_i|` under the 2/3 rule (`|k_i| <= n/3`).
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n / 3) as i64
    }

    /// Physical coordinates of a flat grid point.
    pub fn point(&self, flat: usize) -> Wavevector {
        let h = self.length / self.n as f64;
        let mut x = [0.0; 3];
        let mut rem = flat;
        for axis in (0..self.dim).rev() {
            x[axis] = h * (rem % self.n) as f64;
            rem /= self.n;
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(Grid::periodic(1, 16).is_err());
        assert!(Grid::periodic(4, 16).is_err());
        assert!(Grid::periodic(2, 6).is_err());
        assert!(Grid::periodic(2, 15).is_err());
        assert!(Grid::new(2, 16, 0.0).is_err());
    }

    #[test]
    fn transform_order() {
        let g = Grid::periodic(2, 8).unwrap();
        let ks: Vec<i64> = (0..8).map(|i| g.wavenumber(i)).collect();
        assert_eq!(ks, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        for flat in 0..g.modes() {
            assert_eq!(g.flat_index(&g.mode(flat)[..2]), flat);
        }
    }

    #[test]
    fn negation_is_an_involution() {
        let g = Grid::periodic(3, 8).unwrap();
        for flat in 0..g.modes() {
            assert_eq!(g.negated(g.negated(flat)), flat);
        }
    }

    #[test]
    fn odd_wavevector_drops_nyquist() {
        let g = Grid::periodic(2, 8).unwrap();
        let flat = g.flat_index(&[-4, 1]);
        assert_eq!(g.xi(flat)[0], -4.0);
        assert_eq!(g.xi_odd(flat)[0], 0.0);
        assert_eq!(g.xi_odd(flat)[1], 1.0);
    }
}
