//! Periodic grid samples on the torus, their discrete Fourier transform and
//! the TFLD binary format.

use super::geometry::TorusGeometry;
use crate::error::{domain, Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::io::{Read, Write};

const MAGIC: &[u8; 4] = b"TFLD";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 32;

/// Values at the lattice points (j/m)·L, last axis varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusField {
    pub geometry: TorusGeometry,
    pub m: usize,
    pub values: Vec<f64>,
}

/// Normalized Fourier coefficients f̂_ξ = m^{−n} Σ_j f_j e^{−2πi ξ·j/m}.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub geometry: TorusGeometry,
    pub m: usize,
    pub coeffs: Vec<Complex64>,
}

pub(crate) fn check_grid(geometry: &TorusGeometry, m: usize) -> Result<usize> {
    if m < 2 || !m.is_power_of_two() {
        return domain(format!("grid size must be a power of two ≥ 2, got {m}"));
    }
    let total = (m as u128).pow(geometry.n);
    if total > 1u128 << 31 {
        return Err(Error::Budget(format!("grid {m}^{} is too large to materialize", geometry.n)));
    }
    Ok(total as usize)
}

/// Multi-index of a flat position.
pub fn unflatten(index: usize, n: usize, m: usize) -> Vec<usize> {
    let mut j = vec![0; n];
    let mut r = index;
    for a in (0..n).rev() {
        j[a] = r % m;
        r /= m;
    }
    j
}

pub fn flatten(j: &[usize], m: usize) -> usize {
    j.iter().fold(0, |acc, &c| acc * m + c)
}

/// Signed frequency of DFT bin j on an m-point axis, in [−m/2, m/2).
pub fn frequency(j: usize, m: usize) -> i64 {
    if j < m / 2 {
        j as i64
    } else {
        j as i64 - m as i64
    }
}

impl TorusField {
    pub fn zeros(geometry: TorusGeometry, m: usize) -> Result<Self> {
        let total = check_grid(&geometry, m)?;
        Ok(TorusField { geometry, m, values: vec![0.0; total] })
    }

    pub fn from_values(geometry: TorusGeometry, m: usize, values: Vec<f64>) -> Result<Self> {
        let total = check_grid(&geometry, m)?;
        if values.len() != total {
            return domain(format!("expected {total} values, got {}", values.len()));
        }
        Ok(TorusField { geometry, m, values })
    }

    /// Sample f at every grid point.
    pub fn sample(geometry: TorusGeometry, m: usize, f: impl Fn(&[f64]) -> f64 + Sync) -> Result<Self> {
        use rayon::prelude::*;
        let total = check_grid(&geometry, m)?;
        let values = (0..total)
            .into_par_iter()
            .map(|i| f(&point_of(&geometry, m, i)))
            .collect();
        Ok(TorusField { geometry, m, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.geometry.length / self.m as f64
    }

    /// Quadrature weight (L/m)^n of one cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.geometry.n as i32)
    }

    pub fn point(&self, index: usize) -> Vec<f64> {
        point_of(&self.geometry, self.m, index)
    }

    /// Value at a multi-index, wrapped periodically.
    pub fn at(&self, j: &[i64]) -> f64 {
        let m = self.m as i64;
        let idx = j.iter().fold(0usize, |acc, &c| acc * self.m + c.rem_euclid(m) as usize);
        self.values[idx]
    }

    /// Trapezoidal integral over the torus.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_volume()
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn spectrum(&self) -> Spectrum {
        let mut data: Vec<Complex64> = self.values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        fft_nd(&mut data, self.geometry.n as usize, self.m, false);
        let scale = 1.0 / data.len() as f64;
        for c in data.iter_mut() {
            *c *= scale;
        }
        Spectrum { geometry: self.geometry, m: self.m, coeffs: data }
    }

    /// Grid shift by an integer multi-index: g(j) = f(j + s).
    pub fn shifted(&self, s: &[i64]) -> TorusField {
        let n = self.geometry.n as usize;
        let values = (0..self.len())
            .map(|i| {
                let j = unflatten(i, n, self.m);
                let js: Vec<i64> = j.iter().zip(s).map(|(a, b)| *a as i64 + b).collect();
                self.at(&js)
            })
            .collect();
        TorusField { geometry: self.geometry, m: self.m, values }
    }

    pub fn write_tfld(&self, mut w: impl Write) -> Result<()> {
        let mut header = [0u8; HEADER_LEN];
        header[0..4].copy_from_slice(MAGIC);
        header[4..8].copy_from_slice(&self.geometry.n.to_le_bytes());
        header[8..12].copy_from_slice(&(self.m as u32).to_le_bytes());
        header[12..16].copy_from_slice(&VERSION.to_le_bytes());
        header[16..24].copy_from_slice(&self.geometry.length.to_le_bytes());
        w.write_all(&header)?;
        let mut buf = Vec::with_capacity(self.values.len() * 8);
        for v in &self.values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_tfld(mut r: impl Read) -> Result<Self> {
        let mut header = [0u8; HEADER_LEN];
        r.read_exact(&mut header).map_err(|e| Error::Format(format!("truncated TFLD header: {e}")))?;
        if &header[0..4] != MAGIC {
            return Err(Error::Format("missing TFLD magic".into()));
        }
        let word = |a: usize| u32::from_le_bytes(header[a..a + 4].try_into().unwrap());
        let n = word(4);
        let m = word(8) as usize;
        let version = word(12);
        if version != VERSION {
            return Err(Error::Format(format!("unsupported TFLD version {version}")));
        }
        let length = f64::from_le_bytes(header[16..24].try_into().unwrap());
        let geometry = TorusGeometry::new(n, length).map_err(|e| Error::Format(e.to_string()))?;
        let total = check_grid(&geometry, m).map_err(|e| Error::Format(e.to_string()))?;
        let mut bytes = vec![0u8; total * 8];
        r.read_exact(&mut bytes).map_err(|e| Error::Format(format!("truncated TFLD body: {e}")))?;
        let mut extra = [0u8; 1];
        if r.read(&mut extra)? != 0 {
            return Err(Error::Format("trailing bytes after TFLD body".into()));
        }
        let values = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        Ok(TorusField { geometry, m, values })
    }
}

fn point_of(geometry: &TorusGeometry, m: usize, index: usize) -> Vec<f64> {
    let h = geometry.length / m as f64;
    unflatten(index, geometry.n as usize, m).into_iter().map(|j| j as f64 * h).collect()
}

impl Spectrum {
    /// Integer mode of a flat bin.
    pub fn mode(&self, index: usize) -> Vec<i64> {
        unflatten(index, self.geometry.n as usize, self.m)
            .into_iter()
            .map(|j| frequency(j, self.m))
            .collect()
    }

    /// |ξ|² = (2π|mode|/L)².
    pub fn wavenumber_sq(&self, index: usize) -> f64 {
        let c = 2.0 * std::f64::consts::PI / self.geometry.length;
        self.mode(index).iter().map(|q| (c * *q as f64).powi(2)).sum()
    }

    /// Real part of the inverse transform.
    pub fn to_field(&self) -> TorusField {
        let mut data = self.coeffs.clone();
        fft_nd(&mut data, self.geometry.n as usize, self.m, true);
        TorusField { geometry: self.geometry, m: self.m, values: data.iter().map(|c| c.re).collect() }
    }

    /// Share of the energy in modes with some |ξ_i| above 2/3 of Nyquist.
    pub fn high_band_fraction(&self) -> f64 {
        let cut = self.m as i64 / 3;
        let mut high = 0.0;
        let mut total = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let e = c.norm_sqr();
            total += e;
            if self.mode(i).iter().any(|q| q.abs() > cut) {
                high += e;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            high / total
        }
    }
}

/// In-place n-dimensional DFT over an m^n row-major array (unnormalized).
pub fn fft_nd(data: &mut [Complex64], n: usize, m: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(m) } else { planner.plan_fft_forward(m) };
    let mut line = vec![Complex64::new(0.0, 0.0); m];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let total = data.len();
    for axis in 0..n {
        let stride = m.pow((n - 1 - axis) as u32);
        let block = stride * m;
        for base in (0..total).step_by(block) {
            for off in 0..stride {
                let start = base + off;
                for (t, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + t * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (t, slot) in line.iter().enumerate() {
                    data[start + t * stride] = *slot;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn geom() -> TorusGeometry {
        TorusGeometry::new(3, 1.0).unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(TorusField::zeros(geom(), 12).is_err());
        assert!(TorusField::zeros(geom(), 1).is_err());
        assert!(TorusField::from_values(geom(), 4, vec![0.0; 10]).is_err());
    }

    #[test]
    fn single_mode_spectrum() {
        let f = TorusField::sample(geom(), 8, |y| (2.0 * PI * (y[0] + 2.0 * y[2])).cos()).unwrap();
        let s = f.spectrum();
        for (i, c) in s.coeffs.iter().enumerate() {
            let mode = s.mode(i);
            let expect = if mode == vec![1, 0, 2] || mode == vec![-1, 0, -2] { 0.5 } else { 0.0 };
            assert!((c.re - expect).abs() < 1e-14 && c.im.abs() < 1e-14, "{mode:?} {c}");
        }
        let back = s.to_field();
        for (a, b) in back.values.iter().zip(&f.values) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn integral_of_constant() {
        let f = TorusField::sample(TorusGeometry::new(2, 2.0).unwrap(), 4, |_| 3.0).unwrap();
        assert!((f.integral() - 12.0).abs() < 1e-13);
    }

    #[test]
    fn tfld_round_trip() {
        let f = TorusField::sample(geom(), 4, |y| y[0] - 2.0 * y[1] + y[2] * y[2]).unwrap();
        let mut bytes = Vec::new();
        f.write_tfld(&mut bytes).unwrap();
        assert_eq!(bytes.len(), 32 + 64 * 8);
        assert_eq!(&bytes[0..4], b"TFLD");
        let g = TorusField::read_tfld(bytes.as_slice()).unwrap();
        assert_eq!(f, g);
        // last axis fastest
        let v1 = f64::from_le_bytes(bytes[40..48].try_into().unwrap());
        assert_eq!(v1, f.values[1]);
        assert_eq!(f.point(1), vec![0.0, 0.0, 0.25]);
        assert!(TorusField::read_tfld(&bytes[..40]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(TorusField::read_tfld(bad.as_slice()).is_err());
    }

    #[test]
    fn shift_is_periodic() {
        let f = TorusField::sample(geom(), 4, |y| y[0] + 10.0 * y[1] + 100.0 * y[2]).unwrap();
        let g = f.shifted(&[1, 0, -1]);
        assert_eq!(g.at(&[3, 2, 0]), f.at(&[0, 2, 3]));
    }
}
