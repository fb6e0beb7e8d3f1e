use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use insitu_core::basis::{BasisKind, BasisMatrix, Ordering};
use insitu_core::experiment::{RunRecord, CSV_HEADER};
use insitu_core::interferometry::InterferogramSet;
use insitu_core::optics::TWO_PI;
use insitu_core::Grid2D;
use serde::{Deserialize, Serialize};

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_pgm(path: &Path, side: usize, maxval: u16, samples: &[u8]) -> Result<()> {
    let mut w = create(path)?;
    write!(w, "P5\n{side} {side}\n{maxval}\n")?;
    w.write_all(samples)?;
    w.flush().with_context(|| format!("writing {}", path.display()))
}

/// 8-bit binary PGM.
pub fn write_pgm8(path: &Path, image: &Grid2D<u8>) -> Result<()> {
    write_pgm(path, image.side(), 255, image.values())
}

/// 16-bit binary PGM, big-endian samples.
pub fn write_pgm16(path: &Path, image: &Grid2D<u16>) -> Result<()> {
    let bytes: Vec<u8> = image.values().iter().flat_map(|v| v.to_be_bytes()).collect();
    write_pgm(path, image.side(), 65535, &bytes)
}

/// Phases in `[0, 2π)` to 256 grey levels.
pub fn phase_to_gray(phase: &Grid2D<f64>) -> Grid2D<u8> {
    phase.map(|p| ((p.rem_euclid(TWO_PI) / TWO_PI * 256.0).floor() as i64).clamp(0, 255) as u8)
}

/// Detector readings to 16-bit counts with `full_scale` at 65535.
pub fn intensity_to_gray16(image: &Grid2D<f64>, full_scale: f64) -> Grid2D<u16> {
    image.map(|v| (v / full_scale * 65535.0).round().clamp(0.0, 65535.0) as u16)
}

/// Sidecar describing an interferogram CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterferogramMeta {
    pub perturbation: String,
    pub n: usize,
    pub basis: BasisKind,
    pub ordering: Ordering,
    pub exposure_ms: f64,
    pub saturated_fraction: f64,
    pub seed: u64,
    pub master_seed: u64,
}

pub fn interferogram_stem(perturbation: &str, set: &InterferogramSet) -> String {
    let ordering = match set.kind {
        BasisKind::Canonical => "none".to_string(),
        BasisKind::Hadamard => set.ordering.to_string().replace(':', "-"),
    };
    format!("{perturbation}_n{}_{}_{ordering}", set.n, set.kind)
}

fn sidecar(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Writes `element,shift_index,intensity` rows and a JSON sidecar next to
/// them.
pub fn write_interferograms(csv_path: &Path, set: &InterferogramSet, meta: &InterferogramMeta) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(csv_path)?);
    w.write_record(["element", "shift_index", "intensity"])?;
    for (i, m, v) in set.records() {
        w.write_record([i.to_string(), m.to_string(), v.to_string()])?;
    }
    w.flush()?;
    write_json(&sidecar(csv_path), meta)
}

#[derive(Deserialize)]
struct Row {
    element: usize,
    shift_index: usize,
    intensity: f64,
}

/// Inverse of [`write_interferograms`].
pub fn read_interferograms(csv_path: &Path) -> Result<(InterferogramSet, InterferogramMeta)> {
    let mut reader = csv::Reader::from_path(csv_path).with_context(|| format!("reading {}", csv_path.display()))?;
    let rows = reader
        .deserialize::<Row>()
        .map(|r| r.map(|r| (r.element, r.shift_index, r.intensity)))
        .collect::<Result<Vec<_>, _>>()
        .with_context(|| format!("parsing {}", csv_path.display()))?;
    let meta_path = sidecar(csv_path);
    let meta: InterferogramMeta = serde_json::from_str(
        &fs::read_to_string(&meta_path).with_context(|| format!("reading {}", meta_path.display()))?,
    )
    .with_context(|| format!("parsing {}", meta_path.display()))?;
    let basis = BasisMatrix::new(meta.basis, meta.n, meta.ordering)?;
    let mut set = InterferogramSet::from_records(&basis, rows, meta.exposure_ms, meta.seed)?;
    set.saturated_fraction = meta.saturated_fraction;
    Ok((set, meta))
}

/// `index,perm` rows: measurement `index` uses natural Hadamard row `perm`.
pub fn write_permutation(path: &Path, basis: &BasisMatrix) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["index", "perm"])?;
    for (i, p) in basis.perm().iter().enumerate() {
        w.write_record([i.to_string(), p.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_permutation(path: &Path) -> Result<Vec<usize>> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let mut perm = Vec::new();
    for (k, row) in reader.deserialize::<(usize, usize)>().enumerate() {
        let (i, p) = row?;
        if i != k {
            bail!("{}: row {k} has index {i}", path.display());
        }
        perm.push(p);
    }
    Ok(perm)
}

pub fn write_results(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.csv_fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::GenericImageView;

    #[test]
    fn pgm16_round_trips_through_decoder() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.pgm");
        let img = Grid2D::new(2, vec![0u16, 1, 256, 65535]).unwrap();
        write_pgm16(&path, &img).unwrap();
        let raw = fs::read(&path).unwrap();
        // header, then big-endian samples
        assert!(raw.starts_with(b"P5"));
        assert_eq!(&raw[raw.len() - 8..], &[0, 0, 0, 1, 1, 0, 255, 255]);
        let decoded = image::open(&path).unwrap();
        assert_eq!(decoded.dimensions(), (2, 2));
        assert_eq!(decoded.to_luma16().into_raw(), vec![0, 1, 256, 65535]);
    }

    #[test]
    fn pgm8_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.pgm");
        let img = Grid2D::new(2, vec![0u8, 64, 128, 255]).unwrap();
        write_pgm8(&path, &img).unwrap();
        assert_eq!(image::open(&path).unwrap().to_luma8().into_raw(), vec![0, 64, 128, 255]);
    }

    #[test]
    fn gray_mappings() {
        let p = Grid2D::new(2, vec![0.0, std::f64::consts::PI, TWO_PI - 1e-9, -0.1]).unwrap();
        assert_eq!(phase_to_gray(&p).values(), &[0, 128, 255, 251]);
        let i = Grid2D::new(2, vec![0.0, 0.5, 1.0, 2.0]).unwrap();
        assert_eq!(intensity_to_gray16(&i, 1.0).values(), &[0, 32768, 65535, 65535]);
    }

    #[test]
    fn interferograms_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let basis = BasisMatrix::hadamard(16, Ordering::CakeCutting).unwrap();
        let values = [
            (0..16).map(|i| i as f64 * 0.1).collect(),
            (0..16).map(|i| 1.0 / (i as f64 + 3.0)).collect(),
            vec![0.25; 16],
        ];
        let set = InterferogramSet::new(&basis, values, 1.5, 42).unwrap();
        let meta = InterferogramMeta {
            perturbation: "glass".into(),
            n: 16,
            basis: BasisKind::Hadamard,
            ordering: Ordering::CakeCutting,
            exposure_ms: 1.5,
            saturated_fraction: 0.0,
            seed: 42,
            master_seed: 1,
        };
        let path = dir.path().join("ig/x.csv");
        write_interferograms(&path, &set, &meta).unwrap();
        let (back, back_meta) = read_interferograms(&path).unwrap();
        assert_eq!(back_meta, meta);
        assert_eq!(back.values, set.values);
        assert_eq!(back.perm, set.perm);
    }

    #[test]
    fn permutation_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let basis = BasisMatrix::hadamard(64, Ordering::Random(5)).unwrap();
        let path = dir.path().join("p.csv");
        write_permutation(&path, &basis).unwrap();
        assert_eq!(read_permutation(&path).unwrap(), basis.perm());
    }
}
