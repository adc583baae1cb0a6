use crate::error::{Error, Result};
use crate::lorentz::NormSpec;
use crate::spectral::{Grid, SpectralField};

/// Fields sampled on an increasing time grid `t_0 < t_1 < ... < t_M`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    fields: Vec<SpectralField>,
    monitor: Option<NormSpec>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, fields: Vec<SpectralField>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::arg("trajectory needs at least one time"));
        }
        if times.len() != fields.len() {
            return Err(Error::arg(format!("{} times but {} fields", times.len(), fields.len())));
        }
        if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::arg("trajectory times must be finite and nonnegative"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::arg("trajectory times must be strictly increasing"));
        }
        let (g, c) = (*fields[0].grid(), fields[0].components());
        if fields.iter().any(|f| *f.grid() != g || f.components() != c) {
            return Err(Error::arg("trajectory fields must share one grid and shape"));
        }
        Ok(Self { times, fields, monitor: None })
    }

    pub fn zeros(grid: Grid, components: usize, times: Vec<f64>) -> Result<Self> {
        let fields = vec![SpectralField::zeros(grid, components); times.len()];
        Self::new(times, fields)
    }

    pub fn with_monitor(mut self, spec: NormSpec) -> Self {
        self.monitor = Some(spec);
        self
    }

    pub fn monitor(&self) -> Option<&NormSpec> {
        self.monitor.as_ref()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[SpectralField] {
        &self.fields
    }

    pub fn field(&self, i: usize) -> &SpectralField {
        &self.fields[i]
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn grid(&self) -> &Grid {
        self.fields[0].grid()
    }

    pub fn components(&self) -> usize {
        self.fields[0].components()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &SpectralField)> {
        self.times.iter().copied().zip(&self.fields)
    }

    pub fn into_fields(self) -> Vec<SpectralField> {
        self.fields
    }

    fn check_aligned(&self, other: &Self) -> Result<()> {
        if self.times != other.times {
            return Err(Error::arg("trajectories use different time grids"));
        }
        if self.grid() != other.grid() || self.components() != other.components() {
            return Err(Error::arg("trajectories use different grids or shapes"));
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &Self,
        op: impl Fn(&SpectralField, &SpectralField) -> Result<SpectralField>,
    ) -> Result<Self> {
        self.check_aligned(other)?;
        let fields = self.fields.iter().zip(&other.fields).map(|(a, b)| op(a, b)).collect::<Result<Vec<_>>>()?;
        Ok(Self { times: self.times.clone(), fields, monitor: self.monitor })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.sub(b))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            times: self.times.clone(),
            fields: self.fields.iter().map(|f| f.scaled(factor)).collect(),
            monitor: self.monitor,
        }
    }

    /// Apply `op` to every sample, keeping the time grid.
    pub fn map(&self, op: impl Fn(f64, &SpectralField) -> Result<SpectralField>) -> Result<Self> {
        let fields = self.iter().map(|(t, f)| op(t, f)).collect::<Result<Vec<_>>>()?;
        Self::new(self.times.clone(), fields).map(|t| Self { monitor: self.monitor, ..t })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_times() {
        let g = Grid::periodic(2, 8).unwrap();
        assert!(Trajectory::zeros(g, 2, vec![]).is_err());
        assert!(Trajectory::zeros(g, 2, vec![0.0, 0.0]).is_err());
        assert!(Trajectory::zeros(g, 2, vec![0.5, 0.2]).is_err());
        assert!(Trajectory::zeros(g, 2, vec![-1.0, 0.2]).is_err());
        let t = Trajectory::zeros(g, 2, vec![0.0, 0.1, 0.4]).unwrap();
        assert_eq!(t.len(), 3);
    }

    #[test]
    fn arithmetic_requires_shared_grid() {
        let g = Grid::periodic(2, 8).unwrap();
        let a = Trajectory::zeros(g, 2, vec![0.0, 1.0]).unwrap();
        let b = Trajectory::zeros(g, 2, vec![0.0, 2.0]).unwrap();
        assert!(a.sub(&b).is_err());
        assert_eq!(a.sub(&a).unwrap(), a);
    }
}
