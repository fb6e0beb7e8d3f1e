use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid2D;

/// Rectangular region of an image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Roi {
    pub row0: usize,
    pub col0: usize,
    pub height: usize,
    pub width: usize,
}

impl Roi {
    /// `size x size` window centred on `center` inside a `side x side` image.
    pub fn centered(center: (usize, usize), size: usize, side: usize) -> Result<Self> {
        let half = size / 2;
        if center.0 < half || center.1 < half || center.0 - half + size > side || center.1 - half + size > side {
            return Err(Error::RoiOutOfBounds { side });
        }
        Ok(Self {
            row0: center.0 - half,
            col0: center.1 - half,
            height: size,
            width: size,
        })
    }

    pub fn full(side: usize) -> Self {
        Self {
            row0: 0,
            col0: 0,
            height: side,
            width: side,
        }
    }

    fn check(&self, side: usize) -> Result<()> {
        if self.height == 0 || self.width == 0 || self.row0 + self.height > side || self.col0 + self.width > side {
            return Err(Error::RoiOutOfBounds { side });
        }
        Ok(())
    }

    fn values<'a>(&'a self, image: &'a Grid2D<f64>) -> impl Iterator<Item = f64> + 'a {
        (self.row0..self.row0 + self.height)
            .flat_map(move |r| (self.col0..self.col0 + self.width).map(move |c| *image.get(r, c)))
    }

    pub fn max(&self, image: &Grid2D<f64>) -> Result<f64> {
        self.check(image.side())?;
        Ok(self.values(image).fold(f64::NEG_INFINITY, f64::max))
    }

    pub fn mean(&self, image: &Grid2D<f64>) -> Result<f64> {
        self.check(image.side())?;
        Ok(self.values(image).sum::<f64>() / (self.height * self.width) as f64)
    }
}

/// Maximum of `corrected` over the ROI divided by the mean of `uncorrected`
/// over the same ROI.
pub fn snr(corrected: &Grid2D<f64>, uncorrected: &Grid2D<f64>, roi: &Roi) -> Result<f64> {
    if corrected.side() != uncorrected.side() {
        return Err(Error::DimensionMismatch {
            expected: uncorrected.side(),
            actual: corrected.side(),
        });
    }
    let mean = roi.mean(uncorrected)?;
    if !(mean > 0.0) {
        return Err(Error::DegenerateBaseline);
    }
    Ok(roi.max(corrected)? / mean)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_images_give_unity() {
        let c = Grid2D::filled(8, 3.0);
        assert_eq!(snr(&c, &c, &Roi::full(8)).unwrap(), 1.0);
    }

    #[test]
    fn single_bright_pixel() {
        let u = Grid2D::filled(8, 2.0);
        let mut c = u.clone();
        *c.get_mut(4, 5) = 20.0;
        let roi = Roi::centered((4, 4), 4, 8).unwrap();
        assert_eq!(snr(&c, &u, &roi).unwrap(), 10.0);
    }

    #[test]
    fn errors() {
        let z = Grid2D::filled(8, 0.0);
        assert_eq!(snr(&z, &z, &Roi::full(8)).unwrap_err(), Error::DegenerateBaseline);
        assert!(Roi::centered((1, 4), 4, 8).is_err());
        assert!(Roi::centered((6, 4), 4, 8).is_ok());
        assert!(Roi::centered((7, 4), 4, 8).is_err());
        let big = Roi::full(9);
        assert!(snr(&z, &z, &big).is_err());
    }
}
