//! Dictionaries of atoms sampled on a parameter grid.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signal::grid::ParameterGrid;
use crate::signal::model::{inner, norm, ParametricModel};

/// Default cap on dictionary size (entries = atoms x samples), chosen to keep
/// the largest published configuration (10001 x 1000) comfortably in memory.
pub const DEFAULT_MAX_ENTRIES: usize = 30_000_000;

/// Atoms of a parametric model evaluated at every grid point, stored
/// column-major (one contiguous atom per grid index).
#[derive(Debug, Clone)]
pub struct Dictionary {
    model: ParametricModel,
    grid: ParameterGrid,
    data: Vec<Complex64>,
    norms: Vec<f64>,
    n: usize,
}

impl Dictionary {
    pub fn build(model: ParametricModel, grid: ParameterGrid) -> Result<Self> {
        Self::build_with_cap(model, grid, DEFAULT_MAX_ENTRIES)
    }

    pub fn build_with_cap(
        model: ParametricModel,
        grid: ParameterGrid,
        max_entries: usize,
    ) -> Result<Self> {
        let n = model.dimension();
        let l = grid.len();
        let entries = n.checked_mul(l).ok_or(Error::DictionaryTooLarge {
            entries: usize::MAX,
            cap: max_entries,
        })?;
        if entries > max_entries {
            return Err(Error::DictionaryTooLarge { entries, cap: max_entries });
        }
        let mut data = vec![Complex64::new(0.0, 0.0); entries];
        let mut norms = vec![0.0; l];
        for (i, chunk) in data.chunks_mut(n).enumerate() {
            model.atom_into(grid.value(i), chunk);
            norms[i] = norm(chunk);
        }
        Ok(Self { model, grid, data, norms, n })
    }

    pub fn model(&self) -> &ParametricModel {
        &self.model
    }

    pub fn grid(&self) -> &ParameterGrid {
        &self.grid
    }

    /// Number of atoms.
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Sample count per atom.
    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn column(&self, index: usize) -> &[Complex64] {
        &self.data[index * self.n..(index + 1) * self.n]
    }

    pub fn column_norm(&self, index: usize) -> f64 {
        self.norms[index]
    }

    /// Largest normalized inner-product magnitude over distinct atom pairs.
    /// Quadratic in the number of atoms; intended for small dictionaries.
    pub fn coherence(&self) -> Result<f64> {
        let l = self.len();
        if l < 2 {
            return Err(Error::InvalidGrid("coherence needs at least two atoms".into()));
        }
        if let Some(i) = self.norms.iter().position(|&v| v == 0.0) {
            return Err(Error::ZeroNormAtom(i));
        }
        let mut best: f64 = 0.0;
        for i in 0..l {
            for j in i + 1..l {
                let ip = inner(self.column(i), self.column(j)).norm();
                best = best.max(ip / (self.norms[i] * self.norms[j]));
            }
        }
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fe_integer_grid_is_orthonormal() {
        let model = ParametricModel::ComplexExpFe { samples: 8 };
        let grid = ParameterGrid::new(0.0, 7.0, 1.0).unwrap();
        let dict = Dictionary::build(model, grid).unwrap();
        assert_eq!(dict.len(), 8);
        for i in 0..8 {
            for j in 0..8 {
                let ip = inner(dict.column(i), dict.column(j)).norm();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-12, "gram[{i}][{j}] = {ip}");
            }
        }
    }

    #[test]
    fn fe_widely_spaced_grid_has_negligible_coherence() {
        let model = ParametricModel::ComplexExpFe { samples: 500 };
        let grid = ParameterGrid::new(0.0, 10.0, 1.0).unwrap();
        let dict = Dictionary::build(model, grid).unwrap();
        assert!(dict.coherence().unwrap() < 1e-12);
    }

    #[test]
    fn tde_grid_sizes_match_published_setups() {
        let dict = Dictionary::build(
            ParametricModel::chirp_tde_default(),
            ParameterGrid::new(0.0, 10e-6, 0.02e-6).unwrap(),
        )
        .unwrap();
        assert_eq!(dict.len(), 501);
        assert_eq!(dict.dimension(), 500);
    }

    #[test]
    fn cap_is_enforced() {
        let model = ParametricModel::ComplexExpFe { samples: 100 };
        let grid = ParameterGrid::new(0.0, 99.0, 1.0).unwrap();
        let err = Dictionary::build_with_cap(model, grid, 5000).unwrap_err();
        match err {
            Error::DictionaryTooLarge { entries, cap } => {
                assert_eq!(entries, 10000);
                assert_eq!(cap, 5000);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn coherence_rejects_zero_atoms() {
        // The top of the delay range is past the observation window, so the
        // final atoms are identically zero.
        let dict = Dictionary::build(
            ParametricModel::chirp_tde_default(),
            ParameterGrid::new(9.8e-6, 10.2e-6, 0.1e-6).unwrap(),
        )
        .unwrap();
        assert!(matches!(dict.coherence(), Err(Error::ZeroNormAtom(_))));
    }

    #[test]
    fn columns_match_direct_synthesis() {
        let model = ParametricModel::chirp_tde_default();
        let grid = ParameterGrid::new(0.0, 10e-6, 0.5e-6).unwrap();
        let dict = Dictionary::build(model.clone(), grid.clone()).unwrap();
        let direct = model.atom(grid.value(7));
        assert_eq!(dict.column(7), direct.as_slice());
    }
}
