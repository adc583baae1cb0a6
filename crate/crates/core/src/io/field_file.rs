//! Binary field files.
//!
//! Layout, all little-endian: magic `SFL1`, version `u32`, `d u32`,
//! components `u32`, `n` per axis (`d × u32`), `L f64`, then
//! `components × n^d` coefficients as `(re, im)` `f64` pairs in the same
//! order as [`SpectralField::coeffs`]. Total size `24 + 4d + 16·c·n^d`.

use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

pub const MAGIC: &[u8; 4] = b"SFL1";
pub const VERSION: u32 = 1;

pub fn encoded_len(dim: usize, components: usize, n: usize) -> usize {
    24 + 4 * dim + 16 * components * n.pow(dim as u32)
}

pub fn encode_field(field: &SpectralField) -> Vec<u8> {
    let g = field.grid();
    let mut out = Vec::with_capacity(encoded_len(g.dim(), field.components(), g.n()));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(g.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(field.components() as u32).to_le_bytes());
    for _ in 0..g.dim() {
        out.extend_from_slice(&(g.n() as u32).to_le_bytes());
    }
    out.extend_from_slice(&g.length().to_le_bytes());
    for z in field.coeffs() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let chunk = self
            .bytes
            .get(self.pos..self.pos + N)
            .ok_or_else(|| Error::Format(format!("field file truncated at byte {}", self.pos)))?;
        self.pos += N;
        Ok(chunk.try_into().expect("length checked"))
    }

    fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_le_bytes(self.take()?) as usize)
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }
}

pub fn decode_field(bytes: &[u8]) -> Result<SpectralField> {
    let mut r = Reader { bytes, pos: 0 };
    if &r.take::<4>()? != MAGIC {
        return Err(Error::Format("bad magic, not an SFL1 field file".into()));
    }
    let version = r.u32()?;
    if version != VERSION as usize {
        return Err(Error::Format(format!("unsupported field file version {version}")));
    }
    let dim = r.u32()?;
    let components = r.u32()?;
    if !(2..=3).contains(&dim) || components == 0 {
        return Err(Error::Format(format!("bad header: d = {dim}, components = {components}")));
    }
    let ns = (0..dim).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
    if ns.iter().any(|&n| n != ns[0]) {
        return Err(Error::Format(format!("axes must share one size, got {ns:?}")));
    }
    let length = r.f64()?;
    let grid = Grid::new(dim, ns[0], length).map_err(|e| Error::Format(e.to_string()))?;
    let expected = encoded_len(dim, components, ns[0]);
    if bytes.len() != expected {
        return Err(Error::Format(format!("field file has {} bytes, header implies {expected}", bytes.len())));
    }
    let count = components * grid.modes();
    let coeffs = (0..count).map(|_| Ok(Complex64::new(r.f64()?, r.f64()?))).collect::<Result<Vec<_>>>()?;
    SpectralField::from_coeffs(grid, components, coeffs)
}

pub fn write_field(path: impl AsRef<Path>, field: &SpectralField) -> Result<()> {
    std::fs::write(path, encode_field(field))?;
    Ok(())
}

pub fn read_field(path: impl AsRef<Path>) -> Result<SpectralField> {
    let path = path.as_ref();
    let bytes =
        std::fs::read(path).map_err(|e| Error::arg(format!("cannot read field file {}: {e}", path.display())))?;
    decode_field(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{FieldSampler, SpectrumShape};
    use rand::SeedableRng;

    fn sample(d: usize, n: usize, c: usize) -> SpectralField {
        let g = Grid::new(d, n, 3.5).unwrap();
        FieldSampler::new(g, c, SpectrumShape::default()).sample(&mut rand_chacha::ChaCha8Rng::seed_from_u64(2))
    }

    #[test]
    fn round_trip_is_byte_exact() {
        for (d, n, c) in [(2, 8, 1), (2, 8, 2), (3, 8, 3)] {
            let f = sample(d, n, c);
            let bytes = encode_field(&f);
            assert_eq!(bytes.len(), encoded_len(d, c, n));
            let back = decode_field(&bytes).unwrap();
            assert_eq!(back, f);
            assert_eq!(encode_field(&back), bytes);
        }
    }

    #[test]
    fn header_layout() {
        let bytes = encode_field(&sample(2, 8, 2));
        assert_eq!(&bytes[..4], b"SFL1");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 2);
        assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 2);
        assert_eq!(u32::from_le_bytes(bytes[16..20].try_into().unwrap()), 8);
        assert_eq!(f64::from_le_bytes(bytes[24..32].try_into().unwrap()), 3.5);
    }

    #[test]
    fn corrupt_files_are_rejected() {
        let bytes = encode_field(&sample(2, 8, 1));
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(decode_field(&bad), Err(Error::Format(m)) if m.contains("magic")));
        assert!(matches!(decode_field(&bytes[..bytes.len() - 1]), Err(Error::Format(_))));
        let mut version = bytes.clone();
        version[4] = 9;
        assert!(decode_field(&version).is_err());
        assert!(decode_field(&[]).is_err());
    }
}
