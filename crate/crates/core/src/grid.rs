use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One axis of a rectangular grid: `cells` intervals on `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lower: f64,
    pub upper: f64,
    pub cells: usize,
}

impl Axis {
    pub fn spacing(&self) -> f64 {
        (self.upper - self.lower) / self.cells as f64
    }

    pub fn points(&self) -> usize {
        self.cells + 1
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.lower + i as f64 * self.spacing()
    }
}

/// Uniform rectangular grid in one or two dimensions.
///
/// Point values are stored row-major including the boundary, with the last
/// axis varying fastest. Boundary points carry the homogeneous Dirichlet
/// condition and are never updated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    axes: Vec<Axis>,
}

impl Grid {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1 or 2, got {}",
                axes.len()
            )));
        }
        for (k, ax) in axes.iter().enumerate() {
            if !(ax.upper > ax.lower) || !ax.lower.is_finite() || !ax.upper.is_finite() {
                return Err(Error::InvalidGrid(format!(
                    "axis {k}: bounds [{}, {}] must be finite with lower < upper",
                    ax.lower, ax.upper
                )));
            }
            if ax.cells == 0 || ax.cells % 2 != 0 {
                return Err(Error::InvalidGrid(format!(
                    "axis {k}: cell count {} must be even and positive",
                    ax.cells
                )));
            }
        }
        Ok(Grid { axes })
    }

    pub fn line(lower: f64, upper: f64, cells: usize) -> Result<Self> {
        Grid::new(vec![Axis {
            lower,
            upper,
            cells,
        }])
    }

    pub fn square(lower: f64, upper: f64, cells: usize) -> Result<Self> {
        let ax = Axis {
            lower,
            upper,
            cells,
        };
        Grid::new(vec![ax, ax])
    }

    /// Grid on `[lower, upper]^dim` with mesh size `h`, which must divide the
    /// interval into an even number of cells.
    pub fn with_spacing(dim: usize, lower: f64, upper: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidGrid(format!("mesh size {h} must be positive")));
        }
        let exact = (upper - lower) / h;
        let cells = exact.round();
        if (exact - cells).abs() > 1e-9 * exact.max(1.0) {
            return Err(Error::InvalidGrid(format!(
                "mesh size {h} does not divide [{lower}, {upper}]"
            )));
        }
        let ax = Axis {
            lower,
            upper,
            cells: cells as usize,
        };
        Grid::new(vec![ax; dim])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, k: usize) -> &Axis {
        &self.axes[k]
    }

    pub fn spacing(&self, k: usize) -> f64 {
        self.axes[k].spacing()
    }

    /// Total number of stored points, boundary included.
    pub fn len(&self) -> usize {
        self.axes.iter().map(Axis::points).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight `h^d` of one grid point.
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(Axis::spacing).product()
    }

    /// Stride between neighbours along the first axis (1 in one dimension).
    pub fn stride(&self) -> usize {
        if self.dim() == 2 {
            self.axes[1].points()
        } else {
            1
        }
    }

    /// Multi-index of a flat index.
    pub fn unflatten(&self, idx: usize) -> [usize; 2] {
        if self.dim() == 2 {
            let s = self.stride();
            [idx / s, idx % s]
        } else {
            [idx, 0]
        }
    }

    pub fn flatten(&self, i: usize, j: usize) -> usize {
        i * self.stride() + j
    }

    /// Physical coordinates of a flat index; unused entries are zero.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let [i, j] = self.unflatten(idx);
        let mut x = [0.0; 2];
        x[0] = self.axes[0].coord(i);
        if self.dim() == 2 {
            x[1] = self.axes[1].coord(j);
        }
        x
    }

    pub fn is_boundary(&self, idx: usize) -> bool {
        let [i, j] = self.unflatten(idx);
        let nx = self.axes[0].cells;
        if i == 0 || i == nx {
            return true;
        }
        if self.dim() == 2 {
            let ny = self.axes[1].cells;
            j == 0 || j == ny
        } else {
            false
        }
    }

    /// Flat indices of all interior points in storage order.
    pub fn interior(&self) -> impl Iterator<Item = usize> + '_ {
        let nx = self.axes[0].cells;
        let (ny, stride) = if self.dim() == 2 {
            (self.axes[1].cells, self.stride())
        } else {
            (2, 1)
        };
        let two_d = self.dim() == 2;
        (1..nx).flat_map(move |i| {
            let cols = if two_d { 1..ny } else { 0..1 };
            cols.map(move |j| if two_d { i * stride + j } else { i })
        })
    }

    pub fn interior_count(&self) -> usize {
        self.axes.iter().map(|a| a.cells - 1).product()
    }

    /// Samples `f` at every stored point (boundary included).
    pub fn sample<T>(&self, mut f: impl FnMut(&[f64]) -> T) -> Vec<T> {
        (0..self.len())
            .map(|idx| {
                let x = self.point(idx);
                f(&x[..self.dim()])
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_counts() {
        let g = Grid::with_spacing(1, -10.0, 10.0, 1.0 / 64.0).unwrap();
        assert_eq!(g.axis(0).cells, 1280);
        assert_eq!(g.len(), 1281);
        assert_eq!(g.interior_count(), 1279);
        assert_eq!(g.interior().count(), 1279);
        assert!((g.cell_volume() - 1.0 / 64.0).abs() < 1e-15);

        let g2 = Grid::square(-1.0, 1.0, 4).unwrap();
        assert_eq!(g2.len(), 25);
        let inner: Vec<_> = g2.interior().collect();
        assert_eq!(inner.len(), 9);
        assert!(inner.iter().all(|&k| !g2.is_boundary(k)));
        assert_eq!(g2.point(g2.flatten(2, 2)), [0.0, 0.0]);
    }

    #[test]
    fn rejects_odd_or_empty() {
        assert!(Grid::line(0.0, 1.0, 3).is_err());
        assert!(Grid::line(1.0, 0.0, 4).is_err());
        assert!(Grid::with_spacing(1, 0.0, 1.0, 0.3).is_err());
        assert!(Grid::new(vec![]).is_err());
    }
}
