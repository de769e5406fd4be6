//! Trained ranking model: seed, coefficient rows, and fitted thresholds.
//!
//! A model never stores its random frequencies. Scoring regenerates each
//! iteration's frequency block from the master seed, exactly as the trainer
//! did, so the file holds only the coefficient rows plus a small header.
//!
//! On-disk layout, all little-endian:
//!
//! ```text
//! magic   4 bytes  "QS3O"
//! version u32      currently 1
//! d       u32      input dimension
//! k       u32      number of classes
//! m       u32      frequencies per block (rows are 2m wide)
//! t       u64      coefficient rows
//! sigma   f64      kernel bandwidth
//! seed    u64      master seed
//! b       (k-1) * f64   thresholds, strictly increasing
//! coeff   t * 2m * f64  coefficient rows, row-major
//! crc     u32      CRC-32 of every preceding byte
//! ```

use ndarray::{Array2, ArrayView1, ArrayView2};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::features::{score_points, FeatureStream, KernelSpec};
use crate::thresholds::{predict_label, Thresholds};

const MAGIC: [u8; 4] = *b"QS3O";
const VERSION: u32 = 1;

/// A trained scoring function with ordered cut points.
#[derive(Debug, Clone)]
pub struct RankModel {
    spec: KernelSpec,
    master_seed: u64,
    m: usize,
    coefficients: Array2<f64>,
    thresholds: Thresholds,
    k: usize,
}

impl RankModel {
    /// Assembles a model from its parts, checking shape consistency.
    pub fn new(
        spec: KernelSpec,
        master_seed: u64,
        m: usize,
        coefficients: Array2<f64>,
        thresholds: Thresholds,
        k: usize,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidData("m must be at least 1".into()));
        }
        if k < 2 {
            return Err(Error::InvalidData("need at least 2 classes".into()));
        }
        if coefficients.ncols() != 2 * m {
            return Err(Error::InvalidData(format!(
                "coefficient rows are {} wide but m = {m} needs {}",
                coefficients.ncols(),
                2 * m
            )));
        }
        if thresholds.len() != k - 1 {
            return Err(Error::InvalidData(format!(
                "{} thresholds for {k} classes; expected {}",
                thresholds.len(),
                k - 1
            )));
        }
        if coefficients.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("non-finite coefficient".into()));
        }
        Ok(Self {
            spec,
            master_seed,
            m,
            coefficients,
            thresholds,
            k,
        })
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of training iterations, equal to the coefficient row count.
    pub fn t(&self) -> usize {
        self.coefficients.nrows()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn coefficients(&self) -> &Array2<f64> {
        &self.coefficients
    }

    pub fn thresholds(&self) -> &Thresholds {
        &self.thresholds
    }

    /// Bytes held by the coefficient rows, the only part of the model that
    /// grows with training length.
    pub fn coeff_bytes(&self) -> u64 {
        (self.coefficients.len() * std::mem::size_of::<f64>()) as u64
    }

    fn stream(&self) -> FeatureStream {
        FeatureStream::new(self.master_seed, self.m, self.spec.clone())
            .expect("validated at construction")
    }

    /// Scores one point by regenerating every frequency block.
    pub fn predict_score(&self, x: ArrayView1<f64>) -> Result<f64> {
        let row = x.to_owned().insert_axis(ndarray::Axis(0));
        Ok(self.predict_scores(row.view())?[0])
    }

    /// Scores each row, regenerating every frequency block exactly once.
    pub fn predict_scores(&self, xs: ArrayView2<f64>) -> Result<Vec<f64>> {
        let coeffs = self
            .coefficients
            .as_slice()
            .expect("coefficients are row-major");
        let scores = score_points(&self.stream(), coeffs, self.t(), xs)?;
        #[cfg(debug_assertions)]
        {
            // Each feature vector has unit norm, so no score can exceed the
            // sum of coefficient row norms.
            let bound: f64 = self
                .coefficients
                .rows()
                .into_iter()
                .map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt())
                .sum();
            for &s in &scores {
                debug_assert!(
                    s.abs() <= bound * (1.0 + 1e-9) + 1e-12,
                    "score {s} outside coefficient-norm bound {bound}"
                );
            }
        }
        Ok(scores)
    }

    /// Scores each row and maps it through the thresholds to a class label.
    pub fn predict_labels(&self, xs: ArrayView2<f64>) -> Result<Vec<usize>> {
        let scores = self.predict_scores(xs)?;
        Ok(scores
            .iter()
            .map(|&s| predict_label(s, &self.thresholds))
            .collect())
    }

    /// Writes the model in the versioned binary layout.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        let bytes = self.to_bytes();
        out.write_all(&bytes)?;
        out.flush()?;
        Ok(())
    }

    fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(48 + 8 * (self.thresholds.len() + self.coefficients.len()));
        buf.extend_from_slice(&MAGIC);
        buf.extend_from_slice(&VERSION.to_le_bytes());
        buf.extend_from_slice(&(self.spec.d() as u32).to_le_bytes());
        buf.extend_from_slice(&(self.k as u32).to_le_bytes());
        buf.extend_from_slice(&(self.m as u32).to_le_bytes());
        buf.extend_from_slice(&(self.t() as u64).to_le_bytes());
        buf.extend_from_slice(&self.spec.sigma().to_le_bytes());
        buf.extend_from_slice(&self.master_seed.to_le_bytes());
        for &b in self.thresholds.values() {
            buf.extend_from_slice(&b.to_le_bytes());
        }
        for &c in self.coefficients.iter() {
            buf.extend_from_slice(&c.to_le_bytes());
        }
        let mut hasher = crc32fast::Hasher::new();
        hasher.update(&buf);
        let crc = hasher.finalize();
        buf.extend_from_slice(&crc.to_le_bytes());
        buf
    }

    /// Reads a model back, verifying magic, version, length, and checksum.
    pub fn load(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }

    fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 4 {
            return Err(Error::Truncated);
        }
        if bytes[..4] != MAGIC {
            return Err(Error::BadMagic);
        }
        if bytes.len() < 8 {
            return Err(Error::Truncated);
        }
        let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
        if version != VERSION {
            return Err(Error::UnsupportedVersion {
                found: version,
                supported: VERSION,
            });
        }
        const HEADER: usize = 4 + 4 + 4 + 4 + 4 + 8 + 8 + 8;
        if bytes.len() < HEADER {
            return Err(Error::Truncated);
        }
        let d = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        let k = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
        let m = u32::from_le_bytes(bytes[16..20].try_into().unwrap()) as usize;
        let t = u64::from_le_bytes(bytes[20..28].try_into().unwrap()) as usize;
        let sigma = f64::from_le_bytes(bytes[28..36].try_into().unwrap());
        let seed = u64::from_le_bytes(bytes[36..44].try_into().unwrap());

        if k < 2 {
            return Err(Error::InvalidData(format!("stored class count {k} < 2")));
        }
        if m == 0 {
            return Err(Error::InvalidData("stored block width m is 0".into()));
        }
        let coeff_vals = t
            .checked_mul(2 * m)
            .ok_or_else(|| Error::InvalidData("coefficient count overflows".into()))?;
        let payload_vals = coeff_vals + (k - 1);
        let expected = HEADER
            .checked_add(
                payload_vals
                    .checked_mul(8)
                    .ok_or_else(|| Error::InvalidData("payload size overflows".into()))?,
            )
            .and_then(|n| n.checked_add(4))
            .ok_or_else(|| Error::InvalidData("payload size overflows".into()))?;
        if bytes.len() < expected {
            return Err(Error::Truncated);
        }
        if bytes.len() > expected {
            return Err(Error::InvalidData(format!(
                "{} trailing bytes after checksum",
                bytes.len() - expected
            )));
        }

        let body = &bytes[..expected - 4];
        let stored_crc = u32::from_le_bytes(bytes[expected - 4..].try_into().unwrap());
        let mut hasher = crc32fast::Hasher::new();
        hasher.update(body);
        if hasher.finalize() != stored_crc {
            return Err(Error::ChecksumMismatch);
        }

        let mut off = HEADER;
        let mut read_f64 = || {
            let v = f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
            off += 8;
            v
        };
        let thresholds: Vec<f64> = (0..k - 1).map(|_| read_f64()).collect();
        let coeffs: Vec<f64> = (0..coeff_vals).map(|_| read_f64()).collect();

        let spec = KernelSpec::new(sigma, d)?;
        let coefficients = Array2::from_shape_vec((t, 2 * m), coeffs)
            .map_err(|e| Error::InvalidData(e.to_string()))?;
        Self::new(
            spec,
            seed,
            m,
            coefficients,
            Thresholds::new(thresholds)?,
            k,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{gaussian_ordinal, make_semi_split};
    use crate::trainer::{train, TrainConfig};
    use ndarray::array;

    fn small_model(seed: u64) -> RankModel {
        let ds = gaussian_ordinal(&[-1.5, 0.0, 1.5], 0.5, 12, 3, seed).expect("synth");
        let split = make_semi_split(&ds, 15, seed).expect("split");
        let config = TrainConfig {
            m: 6,
            t_max: 40,
            batch: 2,
            master_seed: seed,
            ..TrainConfig::default()
        };
        train(&split, &config).expect("train")
    }

    #[test]
    fn save_load_round_trip_is_byte_identical() {
        let model = small_model(5);
        let dir = tempfile::tempdir().expect("tempdir");
        let first = dir.path().join("a.qs3");
        let second = dir.path().join("b.qs3");
        model.save(&first).expect("save");
        let reloaded = RankModel::load(&first).expect("load");
        reloaded.save(&second).expect("save again");
        let bytes_a = std::fs::read(&first).expect("read a");
        let bytes_b = std::fs::read(&second).expect("read b");
        assert_eq!(bytes_a, bytes_b);

        let probe = array![[0.3, 0.1, -0.2], [1.0, -1.0, 0.5]];
        let before = model.predict_scores(probe.view()).expect("score");
        let after = reloaded.predict_scores(probe.view()).expect("score");
        for (x, y) in before.iter().zip(&after) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        assert_eq!(
            model.predict_labels(probe.view()).expect("labels"),
            reloaded.predict_labels(probe.view()).expect("labels")
        );
    }

    #[test]
    fn corrupted_magic_is_rejected() {
        let model = small_model(6);
        let dir = tempfile::tempdir().expect("tempdir");
        let path = dir.path().join("m.qs3");
        model.save(&path).expect("save");
        let mut bytes = std::fs::read(&path).expect("read");
        bytes[0] = b'X';
        std::fs::write(&path, &bytes).expect("write");
        assert!(matches!(RankModel::load(&path), Err(Error::BadMagic)));
    }

    #[test]
    fn future_version_is_rejected_with_both_numbers() {
        let model = small_model(7);
        let dir = tempfile::tempdir().expect("tempdir");
        let path = dir.path().join("m.qs3");
        model.save(&path).expect("save");
        let mut bytes = std::fs::read(&path).expect("read");
        bytes[4] = 9;
        std::fs::write(&path, &bytes).expect("write");
        match RankModel::load(&path) {
            Err(Error::UnsupportedVersion { found, supported }) => {
                assert_eq!(found, 9);
                assert_eq!(supported, 1);
            }
            other => panic!("expected version error, got {other:?}"),
        }
    }

    #[test]
    fn truncated_file_is_rejected() {
        let model = small_model(8);
        let dir = tempfile::tempdir().expect("tempdir");
        let path = dir.path().join("m.qs3");
        model.save(&path).expect("save");
        let bytes = std::fs::read(&path).expect("read");
        for keep in [2, 6, 20, bytes.len() / 2, bytes.len() - 1] {
            std::fs::write(&path, &bytes[..keep]).expect("write");
            assert!(
                matches!(RankModel::load(&path), Err(Error::Truncated)),
                "length {keep} should read as truncated"
            );
        }
    }

    #[test]
    fn flipped_coefficient_byte_fails_the_checksum() {
        let model = small_model(9);
        let dir = tempfile::tempdir().expect("tempdir");
        let path = dir.path().join("m.qs3");
        model.save(&path).expect("save");
        let mut bytes = std::fs::read(&path).expect("read");
        let mid = 60 + (bytes.len() - 60) / 2;
        bytes[mid] ^= 0x40;
        std::fs::write(&path, &bytes).expect("write");
        assert!(matches!(
            RankModel::load(&path),
            Err(Error::ChecksumMismatch)
        ));
    }

    #[test]
    fn trailing_bytes_are_rejected() {
        let model = small_model(10);
        let dir = tempfile::tempdir().expect("tempdir");
        let path = dir.path().join("m.qs3");
        model.save(&path).expect("save");
        let mut bytes = std::fs::read(&path).expect("read");
        bytes.push(0);
        std::fs::write(&path, &bytes).expect("write");
        assert!(matches!(
            RankModel::load(&path),
            Err(Error::InvalidData(_))
        ));
    }

    #[test]
    fn zero_iteration_model_scores_zero_and_round_trips() {
        let spec = KernelSpec::new(1.0, 3).expect("spec");
        let model = RankModel::new(
            spec,
            7,
            4,
            Array2::zeros((0, 8)),
            Thresholds::new(vec![0.0]).expect("thresholds"),
            2,
        )
        .expect("build");
        let probe = array![[1.0, 2.0, 3.0]];
        assert_eq!(model.predict_score(probe.row(0)).expect("score"), 0.0);
        assert_eq!(model.predict_labels(probe.view()).expect("labels"), vec![2]);
        let dir = tempfile::tempdir().expect("tempdir");
        let path = dir.path().join("null.qs3");
        model.save(&path).expect("save");
        let back = RankModel::load(&path).expect("load");
        assert_eq!(back.t(), 0);
        assert_eq!(back.predict_score(probe.row(0)).expect("score"), 0.0);
    }

    #[test]
    fn constructor_rejects_shape_mismatches() {
        let spec = KernelSpec::new(1.0, 2).expect("spec");
        let th = Thresholds::new(vec![0.0]).expect("thresholds");
        assert!(RankModel::new(
            spec.clone(),
            0,
            4,
            Array2::zeros((3, 6)),
            th.clone(),
            2
        )
        .is_err());
        assert!(RankModel::new(spec, 0, 4, Array2::zeros((3, 8)), th, 3).is_err());
    }
}
