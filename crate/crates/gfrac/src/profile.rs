//! Nodal representation of radial functions and their CSV serialization.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Node values of a radial function: one value per interior node
/// `0 = r_0 < … < r_M = 1` and, once closed, one per exterior node
/// `1 < ρ_1 < … < ρ_E`. Interpreted as piecewise-linear in `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub interior: Vec<f64>,
    pub exterior: Option<Vec<f64>>,
}

impl RadialProfile {
    pub fn new(interior: Vec<f64>) -> Self {
        RadialProfile {
            interior,
            exterior: None,
        }
    }

    pub fn constant(value: f64, interior_len: usize, exterior_len: usize) -> Self {
        RadialProfile {
            interior: vec![value; interior_len],
            exterior: Some(vec![value; exterior_len]),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.exterior.is_some()
    }

    /// Value at combined node index (interior nodes first, then exterior).
    #[inline]
    pub fn value(&self, idx: usize) -> f64 {
        if idx < self.interior.len() {
            self.interior[idx]
        } else {
            self.exterior.as_ref().expect("profile not closed")[idx - self.interior.len()]
        }
    }

    pub fn all_finite(&self) -> bool {
        self.interior.iter().all(|v| v.is_finite())
            && self
                .exterior
                .as_ref()
                .map_or(true, |e| e.iter().all(|v| v.is_finite()))
    }

    pub fn oscillation(&self) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in self
            .interior
            .iter()
            .chain(self.exterior.iter().flatten())
        {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if hi >= lo {
            hi - lo
        } else {
            0.0
        }
    }

    /// Piecewise-linear evaluation at an arbitrary radius. Radii beyond the
    /// outermost node clamp to the last value.
    pub fn eval(&self, radii_interior: &[f64], radii_exterior: &[f64], r: f64) -> f64 {
        debug_assert_eq!(radii_interior.len(), self.interior.len());
        let ext = self.exterior.as_deref().unwrap_or(&[]);
        let eval_segment = |rs: &[f64], vs: &[f64], r: f64, k: usize| -> f64 {
            let (r0, r1) = (rs[k - 1], rs[k]);
            let (v0, v1) = (vs[k - 1], vs[k]);
            v0 + (v1 - v0) * (r - r0) / (r1 - r0)
        };
        if r <= radii_interior[0] {
            return self.interior[0];
        }
        if r <= *radii_interior.last().unwrap() {
            let k = radii_interior.partition_point(|&x| x < r);
            return eval_segment(radii_interior, &self.interior, r, k.max(1));
        }
        if ext.is_empty() {
            return *self.interior.last().unwrap();
        }
        if r >= *radii_exterior.last().unwrap() {
            return *ext.last().unwrap();
        }
        // Bridge segment between the boundary node and the first exterior node.
        if r <= radii_exterior[0] {
            let r0 = *radii_interior.last().unwrap();
            let v0 = *self.interior.last().unwrap();
            let (r1, v1) = (radii_exterior[0], ext[0]);
            return v0 + (v1 - v0) * (r - r0) / (r1 - r0);
        }
        let k = radii_exterior.partition_point(|&x| x < r);
        eval_segment(radii_exterior, ext, r, k)
    }

    /// Write as CSV: `radius,value,region`.
    pub fn write_csv<W: Write>(
        &self,
        mut w: W,
        radii_interior: &[f64],
        radii_exterior: &[f64],
    ) -> Result<()> {
        writeln!(w, "radius,value,region")?;
        for (r, v) in radii_interior.iter().zip(&self.interior) {
            writeln!(w, "{r},{v},interior")?;
        }
        if let Some(ext) = &self.exterior {
            for (r, v) in radii_exterior.iter().zip(ext) {
                writeln!(w, "{r},{v},exterior")?;
            }
        }
        Ok(())
    }

    pub fn save_csv(
        &self,
        path: &Path,
        radii_interior: &[f64],
        radii_exterior: &[f64],
    ) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file), radii_interior, radii_exterior)
    }

    /// Read a profile CSV produced by [`write_csv`]. Returns
    /// `(radii, values, regions)` in file order.
    pub fn load_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>, Vec<String>)> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_path(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let mut radii = Vec::new();
        let mut values = Vec::new();
        let mut regions = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::Parse(e.to_string()))?;
            if record.len() < 3 {
                return Err(Error::Parse("expected columns radius,value,region".into()));
            }
            radii.push(
                record[0]
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad radius {:?}", &record[0])))?,
            );
            values.push(
                record[1]
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad value {:?}", &record[1])))?,
            );
            let region = record[2].trim().to_string();
            if region != "interior" && region != "exterior" {
                return Err(Error::Parse(format!("unknown region {region:?}")));
            }
            regions.push(region);
        }
        Ok((radii, values, regions))
    }
}
